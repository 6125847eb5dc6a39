#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "embedlab/error.hpp"
#include "embedlab/metric_space.hpp"
#include "embedlab/min_cost_flow.hpp"
#include "embedlab/rational.hpp"

namespace embedlab {

// Finitely supported zero-sum function on the points of a space. Zero
// weights are dropped, so the support holds nonzero weights only.
class Molecule {
 public:
  explicit Molecule(const TruncatedSpace& space) : space_(&space) {}

  Molecule(const TruncatedSpace& space, const std::map<PointM, Rational>& weights)
      : space_(&space) {
    Rational total;
    for (const auto& [p, w] : weights) {
      space.require_index(p);
      total += w;
      if (w != 0) weights_.emplace(p, w);
    }
    if (total != 0)
      throw Error(ErrorKind::Validation,
                  "molecule weights sum to " + format_rational(total) + ", not 0");
  }

  // delta_x - delta_y
  static Molecule dipole(const TruncatedSpace& space, const PointM& x, const PointM& y) {
    std::map<PointM, Rational> w;
    w[x] += 1;
    w[y] -= 1;
    return Molecule(space, w);
  }

  const TruncatedSpace& space() const { return *space_; }
  const std::map<PointM, Rational>& weights() const { return weights_; }
  bool empty() const { return weights_.empty(); }

  Rational weight(const PointM& p) const {
    auto it = weights_.find(p);
    return it == weights_.end() ? Rational(0) : it->second;
  }

  friend Molecule operator+(const Molecule& a, const Molecule& b) {
    if (a.space_ != b.space_)
      throw Error(ErrorKind::Domain, "molecules live over different spaces");
    std::map<PointM, Rational> w = a.weights_;
    for (const auto& [p, v] : b.weights_) w[p] += v;
    return Molecule(*a.space_, w);
  }

  friend Molecule operator*(const Rational& c, const Molecule& m) {
    std::map<PointM, Rational> w;
    for (const auto& [p, v] : m.weights_) w[p] = c * v;
    return Molecule(*m.space_, w);
  }

 private:
  const TruncatedSpace* space_;
  std::map<PointM, Rational> weights_;
};

struct FlowArc {
  PointM from;
  PointM to;
  Rational mass;
};

struct FlowCertificate {
  std::vector<FlowArc> arcs;
  Rational cost;
};

struct LipschitzWitness {
  std::map<PointM, Rational> values;
};

struct FreeNormResult {
  Rational norm;
  FlowCertificate primal;
  LipschitzWitness dual;
  Rational gap;  // primal cost minus dual pairing; zero for every solve
};

inline Rational pairing(const Molecule& m, const LipschitzWitness& f) {
  Rational total;
  for (const auto& [p, w] : m.weights()) {
    auto it = f.values.find(p);
    if (it == f.values.end())
      throw Error(ErrorKind::Validation, "witness undefined at " + p.to_string());
    total += w * it->second;
  }
  return total;
}

inline bool is_one_lipschitz(const TruncatedSpace& space, const LipschitzWitness& f) {
  for (auto a = f.values.begin(); a != f.values.end(); ++a)
    for (auto b = std::next(a); b != f.values.end(); ++b)
      if (abs(a->second - b->second) > space.distance(a->first, b->first)) return false;
  return true;
}

// Net outflow at every point matches the molecule and the cost is the
// mass-weighted distance total.
inline bool is_valid_plan(const Molecule& m, const FlowCertificate& plan) {
  std::map<PointM, Rational> divergence;
  Rational cost;
  for (const auto& arc : plan.arcs) {
    if (arc.mass <= 0) return false;
    divergence[arc.from] += arc.mass;
    divergence[arc.to] -= arc.mass;
    cost += arc.mass * m.space().distance(arc.from, arc.to);
  }
  if (cost != plan.cost) return false;
  for (const auto& [p, v] : divergence)
    if (v != m.weight(p)) return false;
  for (const auto& [p, w] : m.weights()) {
    auto it = divergence.find(p);
    if (it == divergence.end() || it->second != w) return false;
  }
  return true;
}

// Transportation (Kantorovich-Rubinstein) norm of m: cheapest plan moving
// the positive part onto the negative part at cost d per unit mass. Solved
// over the support only; the dual is read off the flow potentials and made
// 1-Lipschitz on the whole support by a min-of-cones extension.
inline FreeNormResult free_norm(const Molecule& m) {
  const TruncatedSpace& space = m.space();
  std::vector<PointM> sources, sinks;
  std::vector<Rational> supply, demand;
  for (const auto& [p, w] : m.weights()) {
    if (w > 0) {
      sources.push_back(p);
      supply.push_back(w);
    } else {
      sinks.push_back(p);
      demand.push_back(-w);
    }
  }
  FreeNormResult result;
  if (sources.empty()) return result;

  std::vector<std::size_t> src_idx, snk_idx;
  for (const auto& p : sources) src_idx.push_back(space.require_index(p));
  for (const auto& p : sinks) snk_idx.push_back(space.require_index(p));

  const auto solution = solve_transport<Rational>(
      supply, demand, [&](std::size_t i, std::size_t j) {
        return Rational(space.at(src_idx[i], snk_idx[j]));
      });

  result.norm = solution.cost;
  result.primal.cost = solution.cost;
  for (const auto& arc : solution.arcs)
    result.primal.arcs.push_back({sources[arc.supply], sinks[arc.demand], arc.mass});

  for (const auto& [p, w] : m.weights()) {
    const std::size_t x = space.require_index(p);
    Rational best = solution.demand_price[0] + space.at(x, snk_idx[0]);
    for (std::size_t j = 1; j < sinks.size(); ++j) {
      Rational candidate = solution.demand_price[j] + space.at(x, snk_idx[j]);
      if (candidate < best) best = std::move(candidate);
    }
    result.dual.values.emplace(p, std::move(best));
  }
  result.gap = result.primal.cost - pairing(m, result.dual);
  return result;
}

struct IsometryMismatch {
  PointM x;
  PointM y;
  int expected = 0;
  Rational norm;
  Rational gap;
  bool witness_ok = true;
  bool plan_ok = true;
};

struct IsometryReport {
  std::size_t pairs_checked = 0;
  std::vector<IsometryMismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
};

// ||delta_x - delta_y|| = d(x, y) for every pair, with zero duality gap and
// valid certificates on both sides.
inline IsometryReport check_delta_isometry(const TruncatedSpace& space) {
  IsometryReport report;
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t j = i + 1; j < space.size(); ++j) {
      const PointM& x = space.point(i);
      const PointM& y = space.point(j);
      const Molecule m = Molecule::dipole(space, x, y);
      const FreeNormResult r = free_norm(m);
      ++report.pairs_checked;
      const int expected = space.at(i, j);
      const bool witness_ok = is_one_lipschitz(space, r.dual);
      const bool plan_ok = is_valid_plan(m, r.primal);
      if (r.norm != expected || r.gap != 0 || !witness_ok || !plan_ok)
        report.mismatches.push_back({x, y, expected, r.norm, r.gap, witness_ok, plan_ok});
    }
  }
  return report;
}

// sum_k c_k (delta_k - delta_0) on an N0 truncation; coefficients[k-1] = c_k.
inline Molecule n0_molecule(const TruncatedSpace& space, std::span<const Rational> coefficients) {
  if (space.label() != SpaceLabel::N0Space)
    throw Error(ErrorKind::Domain, "n0_molecule requires an N0 truncation");
  if (coefficients.size() > static_cast<std::size_t>(space.level()))
    throw Error(ErrorKind::Membership, "more coefficients than points in N0");
  std::map<PointM, Rational> w;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    w[PointM::integer(static_cast<int>(k + 1))] += coefficients[k];
    w[PointM::root()] -= coefficients[k];
  }
  return Molecule(space, w);
}

struct L1Mismatch {
  std::size_t molecule = 0;
  Rational norm;
  Rational l1;
};

struct L1Report {
  std::size_t checked = 0;
  std::vector<L1Mismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
};

// ||m|| in F(N0) equals the l1 norm of its coordinates in the basis
// (delta_k - delta_0); the coordinate of k >= 1 is simply m(k).
inline L1Report check_n0_is_l1(std::span<const Molecule> molecules) {
  L1Report report;
  for (std::size_t i = 0; i < molecules.size(); ++i) {
    const Molecule& m = molecules[i];
    if (m.space().label() != SpaceLabel::N0Space)
      throw Error(ErrorKind::Domain, "molecule is not over an N0 truncation");
    Rational l1;
    for (const auto& [p, w] : m.weights())
      if (!p.is_root()) l1 += abs(w);
    const FreeNormResult r = free_norm(m);
    ++report.checked;
    if (r.norm != l1 || r.gap != 0) report.mismatches.push_back({i, r.norm, l1});
  }
  return report;
}

struct BijectionConstants {
  Rational lip_forward;  // max rho(h x, h y) / d(x, y)
  Rational lip_inverse;  // max d(x, y) / rho(h x, h y)
  Rational product;
};

// h sends the i-th point of M_n (canonical order) to i in N0, so the root
// goes to 0.
inline BijectionConstants canonical_bijection_constants(int n) {
  if (n < 2) throw Error(ErrorKind::Domain, "bijection constants need n >= 2");
  const TruncatedSpace space = TruncatedSpace::m_space(n);
  BijectionConstants out;
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t j = i + 1; j < space.size(); ++j) {
      const int d = space.at(i, j);
      const int rho = i == 0 ? 1 : 2;
      Rational forward(rho, d), inverse(d, rho);
      if (forward > out.lip_forward) out.lip_forward = forward;
      if (inverse > out.lip_inverse) out.lip_inverse = inverse;
    }
  out.product = out.lip_forward * out.lip_inverse;
  return out;
}

}  // namespace embedlab
