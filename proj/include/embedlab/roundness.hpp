#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embedlab/error.hpp"
#include "embedlab/metric_space.hpp"
#include "embedlab/rational.hpp"

namespace embedlab {

// Relative tolerance for non-integral exponents, where sums are floating point.
inline constexpr double kRoundnessTolerance = 1e-12;

// The two sides of the roundness-q inequality for one configuration:
//   within = sum_{i<j} d(a_i,a_j)^q + d(b_i,b_j)^q
//   cross  = sum_{i,j} d(a_i,b_j)^q
// Exact when q is an integer; otherwise only the floating sums are set.
struct RoundnessSums {
  bool exact = false;
  Rational within;
  Rational cross;
  double within_approx = 0.0;
  double cross_approx = 0.0;

  Rational deficit() const {
    if (!exact) throw Error(ErrorKind::Domain, "deficit is not exact for fractional q");
    return cross - within;
  }
  double deficit_approx() const { return cross_approx - within_approx; }

  bool holds() const {
    if (exact) return cross >= within;
    return deficit_approx() >= -kRoundnessTolerance * std::max(1.0, cross_approx);
  }
};

struct RoundnessCertificate {
  Rational q;
  std::vector<PointM> a_list;
  std::vector<PointM> b_list;
  RoundnessSums sums;
};

namespace detail {

inline void check_configuration(std::size_t a_size, std::size_t b_size,
                                const Rational& q) {
  if (a_size != b_size)
    throw Error(ErrorKind::Validation,
                "a-list and b-list differ in length (" + std::to_string(a_size) +
                    " vs " + std::to_string(b_size) + ")");
  if (a_size < 2)
    throw Error(ErrorKind::Domain, "roundness configurations need n >= 2 points per side");
  if (q <= 0) throw Error(ErrorKind::Domain, "exponent q must be positive");
}

// dist(side_x, x, side_y, y) with side 0 = a-list, 1 = b-list; returns a
// Rational distance.
template <class DistFn>
RoundnessSums roundness_sums(std::size_t n, const Rational& q, DistFn dist) {
  RoundnessSums sums;
  sums.exact = is_integral(q);
  if (sums.exact) {
    const auto power = numerator(q).convert_to<unsigned>();
    auto pw = [power](const Rational& d) {
      Rational r = 1;
      for (unsigned k = 0; k < power; ++k) r *= d;
      return r;
    };
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        sums.cross += pw(dist(0, i, 1, j));
        if (i < j) sums.within += pw(dist(0, i, 0, j)) + pw(dist(1, i, 1, j));
      }
    sums.within_approx = to_double(sums.within);
    sums.cross_approx = to_double(sums.cross);
    return sums;
  }
  const long double qd = static_cast<long double>(to_double(q));
  auto pw = [qd](const Rational& d) {
    return std::pow(static_cast<long double>(to_double(d)), qd);
  };
  long double within = 0, cross = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cross += pw(dist(0, i, 1, j));
      if (i < j) within += pw(dist(0, i, 0, j)) + pw(dist(1, i, 1, j));
    }
  sums.within_approx = static_cast<double>(within);
  sums.cross_approx = static_cast<double>(cross);
  return sums;
}

}  // namespace detail

// RHS - LHS of the roundness-q inequality for a configuration in `space`.
inline RoundnessSums roundness_deficit(const TruncatedSpace& space,
                                       std::span<const PointM> a_list,
                                       std::span<const PointM> b_list,
                                       const Rational& q) {
  detail::check_configuration(a_list.size(), b_list.size(), q);
  std::vector<std::size_t> a_idx, b_idx;
  for (const auto& p : a_list) a_idx.push_back(space.require_index(p));
  for (const auto& p : b_list) b_idx.push_back(space.require_index(p));
  const std::vector<std::size_t>* sides[2] = {&a_idx, &b_idx};
  return detail::roundness_sums(
      a_list.size(), q, [&](int sx, std::size_t x, int sy, std::size_t y) {
        return Rational(space.at((*sides[sx])[x], (*sides[sy])[y]));
      });
}

inline RoundnessCertificate make_certificate(const TruncatedSpace& space,
                                             std::vector<PointM> a_list,
                                             std::vector<PointM> b_list,
                                             const Rational& q) {
  RoundnessCertificate cert{q, std::move(a_list), std::move(b_list), {}};
  cert.sums = roundness_deficit(space, cert.a_list, cert.b_list, q);
  return cert;
}

struct CertificateConfiguration {
  std::vector<PointM> a_list;
  std::vector<PointM> b_list;
};

// a_i = i-th chosen integer, b_i = {chosen integers} \ {a_i}. Requires at
// least three indices so that the b-sets pairwise intersect.
inline CertificateConfiguration paper_certificate(const TruncatedSpace& space,
                                                  std::span<const int> indices) {
  if (space.label() != SpaceLabel::MSpace)
    throw Error(ErrorKind::Domain, "certificate requires an M truncation");
  if (indices.size() < 3)
    throw Error(ErrorKind::Domain, "certificate needs n >= 3 indices");
  std::uint64_t all = 0;
  for (int k : indices) {
    if (k < 1 || k > space.level())
      throw Error(ErrorKind::Domain, "index " + std::to_string(k) +
                                         " outside 1.." + std::to_string(space.level()));
    if (all & PointM::bit(k))
      throw Error(ErrorKind::Domain, "index " + std::to_string(k) + " repeated");
    all |= PointM::bit(k);
  }
  CertificateConfiguration config;
  for (int k : indices) {
    config.a_list.push_back(PointM::integer(k));
    config.b_list.push_back(PointM::from_mask(all & ~PointM::bit(k)));
  }
  return config;
}

struct LowerBoundRecord {
  int n = 0;
  Rational q;
  std::optional<Rational> exact;  // set for q = 1
  double value = 0.0;
};

// 2 / (1 + 3^q/(n-1))^(1/q): no embedding of the n-point certificate into a
// space of roundness q has smaller distortion.
inline LowerBoundRecord distortion_lower_bound(int n, const Rational& q) {
  if (n < 3) throw Error(ErrorKind::Domain, "lower bound needs n >= 3");
  if (q <= 0) throw Error(ErrorKind::Domain, "exponent q must be positive");
  LowerBoundRecord rec;
  rec.n = n;
  rec.q = q;
  if (q == 1) {
    rec.exact = Rational(2 * (n - 1), n + 2);
    rec.value = to_double(*rec.exact);
    return rec;
  }
  const long double qd = static_cast<long double>(to_double(q));
  const long double inner = 1.0L + std::pow(3.0L, qd) / static_cast<long double>(n - 1);
  rec.value = static_cast<double>(2.0L / std::pow(inner, 1.0L / qd));
  return rec;
}

template <class T>
struct ImageCheck {
  bool holds = false;
  T deficit{};
};

template <class T>
T l1_distance(std::span<const T> u, std::span<const T> v) {
  T total{};
  for (std::size_t i = 0; i < u.size(); ++i) total += u[i] > v[i] ? T(u[i] - v[i]) : T(v[i] - u[i]);
  return total;
}

// q = 1 roundness deficit of a configuration of vectors under the
// sum-of-absolute-values metric. L1 has roundness 1, so `holds` is
// expected to be true for every input.
template <class T>
ImageCheck<T> check_inequality_on_images(const std::vector<std::vector<T>>& vectors,
                                         std::span<const std::size_t> a_indices,
                                         std::span<const std::size_t> b_indices) {
  if (a_indices.size() != b_indices.size())
    throw Error(ErrorKind::Validation, "a and b index lists differ in length");
  if (a_indices.empty()) throw Error(ErrorKind::Domain, "empty configuration");
  for (std::size_t i = 1; i < vectors.size(); ++i)
    if (vectors[i].size() != vectors[0].size())
      throw Error(ErrorKind::Validation, "image vectors have different dimensions");
  for (auto idx : a_indices)
    if (idx >= vectors.size()) throw Error(ErrorKind::Membership, "a index out of range");
  for (auto idx : b_indices)
    if (idx >= vectors.size()) throw Error(ErrorKind::Membership, "b index out of range");

  auto dist = [&](std::size_t x, std::size_t y) {
    return l1_distance<T>(vectors[x], vectors[y]);
  };
  const std::size_t n = a_indices.size();
  T within{}, cross{};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cross += dist(a_indices[i], b_indices[j]);
      if (i < j) within += dist(a_indices[i], a_indices[j]) + dist(b_indices[i], b_indices[j]);
    }
  ImageCheck<T> out;
  out.deficit = cross - within;
  out.holds = out.deficit >= T{};
  return out;
}

}  // namespace embedlab
