#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "embedlab/embeddings.hpp"
#include "embedlab/error.hpp"
#include "embedlab/metric_space.hpp"

namespace embedlab {

struct SearchOptions {
  std::size_t restarts = 1;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  double step = 0.5;         // initial step; decays as step / sqrt(t)
  double active_band = 1e-3; // pairs within this relative band of the max/min share the subgradient
  unsigned threads = 0;      // 0 = hardware concurrency
};

struct SearchResult {
  EmbeddingMap<double> map;
  DistortionReport<double> report;
  std::size_t best_restart = 0;
};

namespace detail {

class DistortionDescent {
 public:
  DistortionDescent(const TruncatedSpace& space, Norm norm, std::size_t dim)
      : space_(space), norm_(norm), dim_(dim) {
    for (std::size_t i = 0; i < space.size(); ++i)
      for (std::size_t j = i + 1; j < space.size(); ++j)
        pairs_.push_back({i, j, static_cast<double>(space.at(i, j))});
    ratios_.resize(pairs_.size());
  }

  // Baseline isometric or bounded-distortion start, when the dimension allows.
  bool baseline(std::vector<double>& x) const {
    const std::size_t n = space_.size();
    if (dim_ < n) return false;
    x.assign(n * dim_, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (norm_ == Norm::LInf) {
        for (std::size_t z = 0; z < n; ++z) x[i * dim_ + z] = space_.at(i, z);
      } else {
        x[i * dim_ + i] = 2.0;
      }
    }
    return true;
  }

  void random_start(std::vector<double>& x, std::mt19937_64& rng) const {
    double diameter = 0;
    for (const auto& p : pairs_) diameter = std::max(diameter, p.d);
    std::normal_distribution<double> gauss(0.0, diameter / 2.0);
    x.resize(space_.size() * dim_);
    for (auto& v : x) v = gauss(rng);
  }

  // Returns distortion (inf when collapsed) and fills min/max ratios.
  double evaluate(const std::vector<double>& x, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const double r = image_norm(x, pairs_[p].i, pairs_[p].j) / pairs_[p].d;
      ratios_[p] = r;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
  }

  // One subgradient step on log C2 - log C1 using the ratios from the last
  // evaluate(); afterwards rescales so that C1 = 1.
  void step(std::vector<double>& x, double lo, double hi, double alpha, double band) {
    grad_.assign(x.size(), 0.0);
    std::size_t n_hi = 0, n_lo = 0;
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      n_hi += ratios_[p] >= hi * (1.0 - band);
      n_lo += ratios_[p] <= lo * (1.0 + band);
    }
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      double weight = 0.0;
      if (ratios_[p] >= hi * (1.0 - band)) weight += 1.0 / static_cast<double>(n_hi);
      if (ratios_[p] <= lo * (1.0 + band)) weight -= 1.0 / static_cast<double>(n_lo);
      if (weight != 0.0) accumulate_log_gradient(x, pairs_[p].i, pairs_[p].j, weight);
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= alpha * grad_[i];

    double new_lo = std::numeric_limits<double>::infinity();
    for (const auto& p : pairs_) new_lo = std::min(new_lo, image_norm(x, p.i, p.j) / p.d);
    if (new_lo > 0.0 && std::isfinite(new_lo))
      for (auto& v : x) v /= new_lo;
  }

 private:
  struct Pair {
    std::size_t i;
    std::size_t j;
    double d;
  };

  double image_norm(const std::vector<double>& x, std::size_t a, std::size_t b) const {
    const double* u = &x[a * dim_];
    const double* v = &x[b * dim_];
    double acc = 0.0;
    switch (norm_) {
      case Norm::L1:
        for (std::size_t k = 0; k < dim_; ++k) acc += std::abs(u[k] - v[k]);
        return acc;
      case Norm::L2:
        for (std::size_t k = 0; k < dim_; ++k) acc += (u[k] - v[k]) * (u[k] - v[k]);
        return std::sqrt(acc);
      case Norm::LInf:
        for (std::size_t k = 0; k < dim_; ++k) acc = std::max(acc, std::abs(u[k] - v[k]));
        return acc;
    }
    return acc;
  }

  // weight * d/dx log ||x_a - x_b|| added into grad_.
  void accumulate_log_gradient(const std::vector<double>& x, std::size_t a, std::size_t b,
                               double weight) {
    const double len = image_norm(x, a, b);
    if (len <= 0.0) return;
    const double* u = &x[a * dim_];
    const double* v = &x[b * dim_];
    double* ga = &grad_[a * dim_];
    double* gb = &grad_[b * dim_];
    const double scale = weight / len;
    auto sign = [](double t) { return t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0); };
    switch (norm_) {
      case Norm::L1:
        for (std::size_t k = 0; k < dim_; ++k) {
          const double g = scale * sign(u[k] - v[k]);
          ga[k] += g;
          gb[k] -= g;
        }
        break;
      case Norm::L2:
        for (std::size_t k = 0; k < dim_; ++k) {
          const double g = scale * (u[k] - v[k]) / len;
          ga[k] += g;
          gb[k] -= g;
        }
        break;
      case Norm::LInf: {
        std::size_t arg = 0;
        for (std::size_t k = 1; k < dim_; ++k)
          if (std::abs(u[k] - v[k]) > std::abs(u[arg] - v[arg])) arg = k;
        const double g = scale * sign(u[arg] - v[arg]);
        ga[arg] += g;
        gb[arg] -= g;
        break;
      }
    }
  }

  const TruncatedSpace& space_;
  Norm norm_;
  std::size_t dim_;
  std::vector<Pair> pairs_;
  std::vector<double> ratios_;
  std::vector<double> grad_;
};

struct RestartOutcome {
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
};

inline RestartOutcome run_restart(const TruncatedSpace& space, Norm norm, std::size_t dim,
                                  const SearchOptions& opt, std::size_t restart) {
  DistortionDescent descent(space, norm, dim);
  std::seed_seq seq{static_cast<std::uint64_t>(opt.seed), static_cast<std::uint64_t>(restart)};
  std::mt19937_64 rng(seq);
  std::vector<double> x;
  if (restart != 0 || !descent.baseline(x)) descent.random_start(x, rng);

  RestartOutcome out;
  double lo = 0, hi = 0;
  for (std::size_t t = 1; t <= opt.iterations; ++t) {
    const double dist = descent.evaluate(x, lo, hi);
    if (dist < out.best_dist) {
      out.best_dist = dist;
      out.best = x;
    }
    if (!std::isfinite(dist)) {
      descent.random_start(x, rng);
      continue;
    }
    descent.step(x, lo, hi, opt.step / std::sqrt(static_cast<double>(t)), opt.active_band);
  }
  const double final_dist = descent.evaluate(x, lo, hi);
  if (final_dist < out.best_dist || out.best.empty()) {
    out.best_dist = final_dist;
    out.best = x;
  }
  return out;
}

}  // namespace detail

// Multi-restart subgradient descent on log C2 - log C1 over all pairs.
// Restart 0 starts from the Frechet map (linf) or the scaled simplex (l1,
// l2) when dim >= |space|; all other restarts start from Gaussian noise.
// Results are independent of the thread count: each restart has its own
// seeded generator and the merge keeps the lowest restart index on ties.
inline SearchResult search_min_distortion(const TruncatedSpace& space, Norm norm,
                                          std::size_t dim, const SearchOptions& opt) {
  if (dim < 1) throw Error(ErrorKind::Domain, "target dimension must be at least 1");
  if (opt.restarts < 1 || opt.iterations < 1)
    throw Error(ErrorKind::Domain, "search budget must be at least one restart and iteration");
  if (space.size() < 2) throw Error(ErrorKind::Domain, "search needs at least two points");

  std::vector<detail::RestartOutcome> outcomes(opt.restarts);
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, opt.restarts));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < opt.restarts; r = next++)
      outcomes[r] = detail::run_restart(space, norm, dim, opt, r);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r)
    if (outcomes[r].best_dist < outcomes[best].best_dist) best = r;

  std::vector<std::vector<double>> vectors(space.size(), std::vector<double>(dim));
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t k = 0; k < dim; ++k) vectors[i][k] = outcomes[best].best[i * dim + k];

  SearchResult result;
  result.map = EmbeddingMap<double>(space, norm, dim, std::move(vectors));
  result.report = distortion(result.map);
  if (!result.report.collapsed) {
    const double c1 = result.report.c1;
    for (auto& row : result.map.vectors)
      for (auto& v : row) v /= c1;
    result.report = distortion(result.map);
  }
  result.best_restart = best;
  return result;
}

}  // namespace embedlab
