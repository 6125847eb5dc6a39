#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embedlab/error.hpp"

namespace embedlab {

// A point of M: the root, a positive integer (2nd floor), or a nonempty
// finite set of positive integers (3rd floor). Sets are bitmasks over
// {1..64}; bit k-1 stands for element k.
class PointM {
 public:
  enum class Kind : std::uint8_t { Root = 0, Integer = 1, FiniteSet = 2 };

  static constexpr int kMaxElement = 64;

  PointM() = default;

  static PointM root() { return PointM(Kind::Root, 0); }

  static PointM integer(int k) {
    if (k < 1 || k > kMaxElement)
      throw Error(ErrorKind::Domain,
                  "integer point must lie in 1.." + std::to_string(kMaxElement));
    return PointM(Kind::Integer, static_cast<std::uint64_t>(k));
  }

  static PointM from_mask(std::uint64_t mask) {
    if (mask == 0) throw Error(ErrorKind::Domain, "set point must be nonempty");
    return PointM(Kind::FiniteSet, mask);
  }

  static PointM set(std::span<const int> elements) {
    std::uint64_t mask = 0;
    for (int k : elements) {
      if (k < 1 || k > kMaxElement)
        throw Error(ErrorKind::Domain, "set element " + std::to_string(k) +
                                           " outside 1.." +
                                           std::to_string(kMaxElement));
      mask |= bit(k);
    }
    return from_mask(mask);
  }
  static PointM set(std::initializer_list<int> elements) {
    return set(std::span<const int>(elements.begin(), elements.size()));
  }

  Kind kind() const { return kind_; }
  bool is_root() const { return kind_ == Kind::Root; }
  bool is_integer() const { return kind_ == Kind::Integer; }
  bool is_set() const { return kind_ == Kind::FiniteSet; }

  int value() const { return static_cast<int>(payload_); }
  std::uint64_t mask() const { return payload_; }

  bool contains(int k) const {
    return is_set() && k >= 1 && k <= kMaxElement && (payload_ & bit(k)) != 0;
  }

  // Largest integer mentioned by the point (0 for the root).
  int max_element() const {
    switch (kind_) {
      case Kind::Root: return 0;
      case Kind::Integer: return value();
      case Kind::FiniteSet: return 64 - std::countl_zero(payload_);
    }
    return 0;
  }

  std::vector<int> elements() const {
    std::vector<int> out;
    if (!is_set()) return out;
    for (std::uint64_t m = payload_; m != 0; m &= m - 1)
      out.push_back(std::countr_zero(m) + 1);
    return out;
  }

  // "root", "3", "{1,3,4}".
  std::string to_string() const {
    switch (kind_) {
      case Kind::Root: return "root";
      case Kind::Integer: return std::to_string(value());
      case Kind::FiniteSet: {
        std::string s = "{";
        bool first = true;
        for (int k : elements()) {
          if (!first) s += ',';
          s += std::to_string(k);
          first = false;
        }
        return s + "}";
      }
    }
    return {};
  }

  // Inverse of to_string(). "0" is accepted as the root (N0 spelling).
  static PointM parse(std::string_view text);

  friend bool operator==(const PointM&, const PointM&) = default;
  friend auto operator<=>(const PointM&, const PointM&) = default;

  static constexpr std::uint64_t bit(int k) { return std::uint64_t{1} << (k - 1); }

 private:
  PointM(Kind kind, std::uint64_t payload) : kind_(kind), payload_(payload) {}

  Kind kind_ = Kind::Root;
  std::uint64_t payload_ = 0;
};

namespace detail {

inline int parse_positive(std::string_view s, std::string_view original) {
  auto fail = [&]() -> int {
    throw Error(ErrorKind::Validation,
                "malformed point '" + std::string(original) + "'");
  };
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty() || s.size() > 3) return fail();
  int value = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return fail();
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace detail

inline PointM PointM::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s == "root" || s == "0") return root();
  if (s.empty() || s == "{}")
    throw Error(ErrorKind::Validation,
                "malformed point '" + std::string(text) + "'");
  if (s.front() == '{') {
    if (s.back() != '}')
      throw Error(ErrorKind::Validation,
                  "malformed point '" + std::string(text) + "'");
    s = s.substr(1, s.size() - 2);
    std::vector<int> elements;
    while (true) {
      auto comma = s.find(',');
      elements.push_back(detail::parse_positive(s.substr(0, comma), text));
      if (comma == std::string_view::npos) break;
      s.remove_prefix(comma + 1);
    }
    for (std::size_t i = 1; i < elements.size(); ++i)
      if (elements[i] <= elements[i - 1])
        throw Error(ErrorKind::Validation,
                    "set elements must be strictly increasing in '" +
                        std::string(text) + "'");
    return set(elements);
  }
  return integer(detail::parse_positive(s, text));
}

// Closed-form shortest-path distance of M.
inline int distance(const PointM& x, const PointM& y) {
  if (x == y) return 0;
  using K = PointM::Kind;
  const PointM& lo = x.kind() <= y.kind() ? x : y;
  const PointM& hi = x.kind() <= y.kind() ? y : x;
  switch (lo.kind()) {
    case K::Root:
      return hi.is_integer() ? 1 : 2;
    case K::Integer:
      if (hi.is_integer()) return 2;
      return hi.contains(lo.value()) ? 1 : 3;
    case K::FiniteSet:
      return (lo.mask() & hi.mask()) != 0 ? 2 : 4;
  }
  return 0;
}

}  // namespace embedlab

template <>
struct std::hash<embedlab::PointM> {
  std::size_t operator()(const embedlab::PointM& p) const noexcept {
    return std::hash<std::uint64_t>{}(p.mask() * 4 +
                                      static_cast<std::uint64_t>(p.kind()));
  }
};
