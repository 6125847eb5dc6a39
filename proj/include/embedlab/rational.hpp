#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "embedlab/error.hpp"

namespace embedlab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw Error(ErrorKind::Domain, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(Integer(num), Integer(den));
}

// Always "p/q" with q > 0 and gcd(p, q) = 1, including integers ("3/1").
inline std::string format_rational(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline Integer parse_integer(std::string_view s, std::string_view original) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s))
    throw Error(ErrorKind::Validation,
                "malformed rational '" + std::string(original) + "'");
  Integer value{std::string(s)};
  return negative ? Integer(-value) : value;
}

}  // namespace detail

// Accepts "p/q", "p", and finite decimals such as "-0.25" (converted exactly).
inline Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = detail::parse_integer(s.substr(0, slash), text);
    std::string_view den_text = s.substr(slash + 1);
    if (!detail::all_digits(den_text))
      throw Error(ErrorKind::Validation,
                  "malformed rational '" + std::string(text) + "'");
    Integer den(std::string{den_text});
    if (den == 0)
      throw Error(ErrorKind::Validation,
                  "zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }

  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+'))
      whole.remove_prefix(1);
    if ((whole.empty() && frac.empty()) ||
        (!whole.empty() && !detail::all_digits(whole)) ||
        (!frac.empty() && !detail::all_digits(frac)))
      throw Error(ErrorKind::Validation,
                  "malformed rational '" + std::string(text) + "'");
    Integer scale = boost::multiprecision::pow(Integer(10),
                                               static_cast<unsigned>(frac.size()));
    Integer digits{std::string(whole.empty() ? "0" : whole) + std::string(frac)};
    Rational value(digits, scale);
    return negative ? Rational(-value) : value;
  }

  return Rational(detail::parse_integer(s, text));
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline bool is_integral(const Rational& r) { return denominator(r) == 1; }

}  // namespace embedlab
