#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "embedlab/error.hpp"
#include "embedlab/metric_space.hpp"
#include "embedlab/rational.hpp"

namespace embedlab {

enum class Norm { L1, L2, LInf };

inline const char* to_string(Norm norm) {
  switch (norm) {
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
    case Norm::LInf: return "linf";
  }
  return "?";
}

inline Norm parse_norm(std::string_view text) {
  if (text == "l1") return Norm::L1;
  if (text == "l2") return Norm::L2;
  if (text == "linf") return Norm::LInf;
  throw Error(ErrorKind::Validation, "unknown norm '" + std::string(text) + "'");
}

// Relative tolerance for floating-point comparisons of embedding constants.
inline constexpr double kEmbeddingTolerance = 1e-9;

// Images of every point of a space, indexed like space.points().
template <class T = double>
struct EmbeddingMap {
  const TruncatedSpace* space = nullptr;
  Norm norm = Norm::L1;
  std::size_t dim = 0;
  std::vector<std::vector<T>> vectors;

  EmbeddingMap() = default;
  EmbeddingMap(const TruncatedSpace& s, Norm n, std::size_t k, std::vector<std::vector<T>> v)
      : space(&s), norm(n), dim(k), vectors(std::move(v)) {
    if (vectors.size() != s.size())
      throw Error(ErrorKind::Validation, "embedding must give an image for every point");
    for (const auto& row : vectors)
      if (row.size() != dim)
        throw Error(ErrorKind::Validation, "image vector has wrong dimension");
  }

  const std::vector<T>& image(const PointM& p) const {
    return vectors[space->require_index(p)];
  }
};

template <class T>
T norm_of_difference(const std::vector<T>& u, const std::vector<T>& v, Norm norm) {
  T acc{};
  switch (norm) {
    case Norm::L1:
      for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] > v[i] ? T(u[i] - v[i]) : T(v[i] - u[i]);
      return acc;
    case Norm::LInf:
      for (std::size_t i = 0; i < u.size(); ++i) {
        T diff = u[i] > v[i] ? T(u[i] - v[i]) : T(v[i] - u[i]);
        if (diff > acc) acc = diff;
      }
      return acc;
    case Norm::L2:
      if constexpr (std::is_floating_point_v<T>) {
        for (std::size_t i = 0; i < u.size(); ++i) acc += (u[i] - v[i]) * (u[i] - v[i]);
        return std::sqrt(acc);
      } else {
        throw Error(ErrorKind::Domain, "exact arithmetic does not support the l2 norm");
      }
  }
  return acc;
}

template <class T>
struct DistortionReport {
  T c1{};   // min ||f(x)-f(y)|| / d(x,y)
  T c2{};   // max of the same ratio
  T dist{}; // c2 / c1; meaningful only when !collapsed
  bool collapsed = false;

  double value() const {
    if (collapsed) return std::numeric_limits<double>::infinity();
    if constexpr (std::is_floating_point_v<T>) return dist;
    else return to_double(dist);
  }
};

template <class T>
DistortionReport<T> distortion(const EmbeddingMap<T>& f) {
  const TruncatedSpace& space = *f.space;
  if (space.size() < 2) throw Error(ErrorKind::Domain, "distortion needs at least two points");
  DistortionReport<T> out;
  bool first = true;
  T largest_image{};
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t j = i + 1; j < space.size(); ++j) {
      T image = norm_of_difference(f.vectors[i], f.vectors[j], f.norm);
      if (image > largest_image) largest_image = image;
      T ratio = image / T(space.at(i, j));
      if (first || ratio < out.c1) out.c1 = ratio;
      if (first || ratio > out.c2) out.c2 = ratio;
      first = false;
    }
  if constexpr (std::is_floating_point_v<T>) {
    out.collapsed = out.c1 <= kEmbeddingTolerance * largest_image || out.c1 == T{};
    out.dist = out.collapsed ? std::numeric_limits<T>::infinity() : out.c2 / out.c1;
  } else {
    out.collapsed = out.c1 == T{};
    if (!out.collapsed) out.dist = out.c2 / out.c1;
  }
  return out;
}

// x -> (d(x, z))_z into the max norm; an isometry.
template <class T = double>
EmbeddingMap<T> frechet_embedding(const TruncatedSpace& space) {
  std::vector<std::vector<T>> v(space.size(), std::vector<T>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t z = 0; z < space.size(); ++z) v[i][z] = T(space.at(i, z));
  return EmbeddingMap<T>(space, Norm::LInf, space.size(), std::move(v));
}

// x -> 2 e_x into l1: every pair lands at distance 4.
template <class T = double>
EmbeddingMap<T> simplex_embedding(const TruncatedSpace& space) {
  std::vector<std::vector<T>> v(space.size(), std::vector<T>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i) v[i][i] = T(2);
  return EmbeddingMap<T>(space, Norm::L1, space.size(), std::move(v));
}

template <class T>
struct WitnessEntry {
  PointM a_set;
  PointM b_set;
  bool feasible = false;
  std::size_t coordinate = 0;
  int sign = 1;
  T sup_norm{};        // ||f(A) - f(B)||_inf, attained at `coordinate`
  T min_separation{};  // min over a in A, b in B of sign*(f(a)_j - f(b)_j)
  T eta{};             // 4 - 2D
};

namespace detail {

template <class T>
bool at_least(const T& value, const T& bound) {
  if constexpr (std::is_floating_point_v<T>)
    return value >= bound - kEmbeddingTolerance * std::max(T(1), std::abs(bound));
  else
    return value >= bound;
}

}  // namespace detail

// Separating coordinate for disjoint sets A, B under an embedding into the
// max norm with 1 <= C1 and C2 <= D < 2. Since d(A, B) = 4 some coordinate
// j separates f(A) and f(B) by at least 4, and then every pair a in A,
// b in B is separated along j by at least 4 - 2D. Working with differences
// makes the result independent of the normalization f(root) = 0.
template <class T>
WitnessEntry<T> extract_witness(const EmbeddingMap<T>& f, const PointM& a_set,
                                const PointM& b_set, const T& expansion) {
  if (f.norm != Norm::LInf)
    throw Error(ErrorKind::Domain, "witness extraction requires the linf target");
  if (!a_set.is_set() || !b_set.is_set())
    throw Error(ErrorKind::Domain, "A and B must be finite-set points");
  if ((a_set.mask() & b_set.mask()) != 0)
    throw Error(ErrorKind::Domain, "A and B must be disjoint");
  if (!(expansion < T(2)))
    throw Error(ErrorKind::Domain, "expansion constant D must be below 2");

  const TruncatedSpace& space = *f.space;
  space.require_index(PointM::root());
  const auto& fa_set = f.image(a_set);
  const auto& fb_set = f.image(b_set);
  std::vector<std::size_t> a_points, b_points;
  for (int k : a_set.elements()) a_points.push_back(space.require_index(PointM::integer(k)));
  for (int k : b_set.elements()) b_points.push_back(space.require_index(PointM::integer(k)));

  WitnessEntry<T> entry;
  entry.a_set = a_set;
  entry.b_set = b_set;
  entry.eta = T(4) - T(2) * expansion;
  for (std::size_t j = 0; j < f.dim; ++j) {
    T diff = fa_set[j] - fb_set[j];
    T mag = diff < T{} ? T(-diff) : diff;
    if (j == 0 || mag > entry.sup_norm) {
      entry.sup_norm = mag;
      entry.coordinate = j;
      entry.sign = diff < T{} ? -1 : 1;
    }
  }
  if (f.dim == 0 || !detail::at_least(entry.sup_norm, T(4))) return entry;

  entry.feasible = true;
  const std::size_t j = entry.coordinate;
  bool first = true;
  for (std::size_t a : a_points)
    for (std::size_t b : b_points) {
      T sep = T(entry.sign) * (f.vectors[a][j] - f.vectors[b][j]);
      if (first || sep < entry.min_separation) entry.min_separation = sep;
      first = false;
    }
  return entry;
}

// Ordered pairs (A, B) of disjoint nonempty subsets of {1..n}.
inline std::vector<std::pair<PointM, PointM>> disjoint_set_pairs(int n) {
  std::vector<std::pair<PointM, PointM>> out;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t a = 1; a <= full; ++a)
    for (std::uint64_t b = 1; b <= full; ++b)
      if ((a & b) == 0) out.emplace_back(PointM::from_mask(a), PointM::from_mask(b));
  return out;
}

template <class T>
struct PerturbedConstants {
  T c1;
  T c2;
};

// Bi-Lipschitz constants that survive moving every image by at most eta:
// pair distances move by at most 2*eta, and d(x, y) >= min_distance.
template <class T>
PerturbedConstants<T> perturbation_bound(const T& c1, const T& c2, const T& eta,
                                         const T& min_distance = T(1)) {
  if (!(c1 > T{})) throw Error(ErrorKind::Domain, "C1 must be positive");
  if (c2 < c1) throw Error(ErrorKind::Domain, "C2 must be at least C1");
  if (eta < T{}) throw Error(ErrorKind::Domain, "eta must be nonnegative");
  if (!(min_distance > T{})) throw Error(ErrorKind::Domain, "minimum distance must be positive");
  const T shift = T(2) * eta / min_distance;
  PerturbedConstants<T> out{c1 - shift, c2 + shift};
  if (!(out.c1 > T{}))
    throw Error(ErrorKind::Infeasible, "perturbation too large: lower constant is not positive");
  return out;
}

}  // namespace embedlab
