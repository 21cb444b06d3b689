#pragma once

// Search-performance protocol: the runtime metric t0/p(t0), coupling sweeps
// locating gamma'_* (max success probability) and gamma_* (min runtime), and
// scaling-exponent extraction across tree depths.

#include "qsearch/evolution.hpp"
#include "qsearch/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace qsearch {

// Predicted scaling exponent of t0/p(t0) ~ N^beta for a marked site at
// level l of a depth-n tree.
inline double beta_prediction(int l, int n) {
  if (n < 1 || l < 1 || l > n) throw std::invalid_argument("level must satisfy 1 <= l <= n");
  return 0.5 + static_cast<double>(l) / (2.0 * n);
}

// Heuristic optimal coupling (~ 2 / marked-site degree, adjusted at l = 2):
// used to center sweep grids, never reported as a measurement.
inline double gamma_star_rule(int l, int n) {
  if (n < 1 || l < 1 || l > n) throw std::invalid_argument("level must satisfy 1 <= l <= n");
  if (l == 1) return 1.0;
  if (l == 2) return 0.75;
  if (l == n) return 2.0;
  return 2.0 / 3.0;
}

// Runtime metric t0/p(t0).  Searches whose metric is undefined (no peak) or
// no better than exhaustive enumeration (metric >= N) carry the
// linear-regime flag and report no value.
struct EfficiencyResult {
  std::optional<Peak> peak;
  std::optional<double> value;
  bool linear_regime = true;
};

template <typename Scalar>
EfficiencyResult efficiency_from_modes(const Vector<Scalar>& lambda, const Vector<Scalar>& weights,
                                       int n, int l, double gamma, const PeakPolicy& pol = {}) {
  EfficiencyResult res;
  res.peak = first_peak_from_modes(lambda, weights, n, l, gamma, pol);
  if (res.peak) res.value = res.peak->time / res.peak->probability;
  res.linear_regime = !res.value || *res.value >= tree_size_d(n);
  return res;
}

template <typename Scalar>
EfficiencyResult efficiency(const ReducedSystem<Scalar>& sys, const PeakPolicy& pol = {}) {
  const SpectralDecomposition<Scalar> d = decompose(sys.dense());
  const Vector<Scalar> c = mode_weights(d, sys.initial_state, sys.marked_index);
  return efficiency_from_modes(d.eigenvalues, c, sys.params.n, sys.params.l, sys.params.gamma,
                               pol);
}

// ---------------------------------------------------------------------------
// Coupling sweeps

struct SweepPoint {
  double gamma = 0.0;
  double max_prob = 0.0;
  double max_prob_time = 0.0;
  std::optional<Peak> peak;
  std::optional<double> efficiency;
  bool linear_regime = true;
};

struct SweepPolicy {
  double gamma_max = 3.0;
  double coarse_step = 0.05;
  double fine_step = 0.005;
  std::size_t max_samples = std::size_t{1} << 18;
  int workers = 1;
};

struct GammaSweep {
  std::vector<SweepPoint> points;  // ascending in gamma, coarse plus refined
  double gamma_prime_star = 0.0;   // argmax of max_prob
  double max_prob_star = 0.0;
  std::optional<double> gamma_star;  // argmin of t0/p(t0) among non-flagged points
  std::optional<double> efficiency_star;
};

namespace detail {

template <typename Scalar>
SweepPoint sweep_point(int n, int l, double gamma, const PeakPolicy& pol) {
  const ReducedSystem<Scalar> sys = reduce_comb<Scalar>({n, l, gamma});
  const SpectralDecomposition<Scalar> d = decompose(sys.dense());
  const Vector<Scalar> c = mode_weights(d, sys.initial_state, sys.marked_index);
  SweepPoint pt;
  pt.gamma = gamma;
  const Peak mp = max_probability_from_modes(d.eigenvalues, c, n, l, pol);
  pt.max_prob = mp.probability;
  pt.max_prob_time = mp.time;
  pt.peak = first_peak_from_modes(d.eigenvalues, c, n, l, gamma, pol);
  if (pt.peak) pt.efficiency = pt.peak->time / pt.peak->probability;
  pt.linear_regime = !pt.efficiency || *pt.efficiency >= tree_size_d(n);
  return pt;
}

}  // namespace detail

// Coarse scan of (0, gamma_max] followed by one fine refinement pass around
// each optimum (one coarse cell on either side).  Grid gammas are integer
// multiples of fine_step so refined and coarse points merge exactly;
// evaluation order never affects the result.
template <typename Scalar = double>
GammaSweep sweep_gamma(int n, int l, const SweepPolicy& policy = {}) {
  if (policy.gamma_max < policy.coarse_step) throw std::invalid_argument("empty sweep grid");
  PeakPolicy pol;
  pol.max_samples = policy.max_samples;
  const long long per_cell = std::llround(policy.coarse_step / policy.fine_step);
  const long long cells = std::llround(policy.gamma_max / policy.coarse_step);
  const auto gamma_of = [&](long long key) { return static_cast<double>(key) * policy.fine_step; };

  const auto evaluate = [&](const std::vector<long long>& keys,
                            std::map<long long, SweepPoint>& table) {
    std::vector<SweepPoint> slots(keys.size());
    parallel_for(keys.size(), policy.workers, [&](std::size_t i) {
      slots[i] = detail::sweep_point<Scalar>(n, l, gamma_of(keys[i]), pol);
    });
    for (std::size_t i = 0; i < keys.size(); ++i) table.emplace(keys[i], slots[i]);
  };

  std::vector<long long> coarse_keys;
  for (long long k = 1; k <= cells; ++k) coarse_keys.push_back(k * per_cell);
  std::map<long long, SweepPoint> table;
  evaluate(coarse_keys, table);

  // Bracket each coarse optimum by its neighbours and fill with fine steps.
  std::set<long long> wanted;
  const auto add_bracket = [&](std::size_t at) {
    const long long lo = coarse_keys[at == 0 ? 0 : at - 1];
    const long long hi = coarse_keys[std::min(at + 1, coarse_keys.size() - 1)];
    for (long long k = lo; k <= hi; ++k) wanted.insert(k);
  };
  std::size_t i_prob = 0, i_eff = 0;
  double best_prob = -1.0, best_eff = std::numeric_limits<double>::infinity();
  bool has_eff = false;
  for (std::size_t i = 0; i < coarse_keys.size(); ++i) {
    const SweepPoint& pt = table.at(coarse_keys[i]);
    if (pt.max_prob > best_prob) { best_prob = pt.max_prob; i_prob = i; }
    if (!pt.linear_regime && *pt.efficiency < best_eff) {
      best_eff = *pt.efficiency; i_eff = i; has_eff = true;
    }
  }
  add_bracket(i_prob);
  if (has_eff) add_bracket(i_eff);

  std::vector<long long> fresh;
  for (const long long k : wanted)
    if (!table.count(k)) fresh.push_back(k);
  evaluate(fresh, table);

  GammaSweep sweep;
  sweep.points.reserve(table.size());
  for (const auto& [key, pt] : table) sweep.points.push_back(pt);
  bool first = true;
  for (const SweepPoint& pt : sweep.points) {
    if (first || pt.max_prob > sweep.max_prob_star) {
      sweep.max_prob_star = pt.max_prob;
      sweep.gamma_prime_star = pt.gamma;
      first = false;
    }
    if (!pt.linear_regime && (!sweep.efficiency_star || *pt.efficiency < *sweep.efficiency_star)) {
      sweep.efficiency_star = pt.efficiency;
      sweep.gamma_star = pt.gamma;
    }
  }
  return sweep;
}

// ---------------------------------------------------------------------------
// Scaling experiments

struct ScalingProtocol {
  std::vector<int> depths;  // ascending tree depths n
  std::optional<double> level_ratio;  // marked level l = round(ratio * n) ...
  int fixed_level = 1;                // ... or this level at every depth
  std::optional<double> gamma;        // default: gamma_star_rule per size
  std::size_t max_samples = std::size_t{1} << 21;
  int workers = 1;
  int verify_depth_cap = 10;  // cross-check reduction at min(cap, largest n)

  int level_for(int n) const {
    if (!level_ratio) return fixed_level;
    const long long l = std::llround(*level_ratio * n);
    return static_cast<int>(std::clamp(l, 1ll, static_cast<long long>(n)));
  }
  double gamma_for(int n) const {
    return gamma ? *gamma : gamma_star_rule(level_for(n), n);
  }
};

struct ScalingPoint {
  int n = 0;
  int l = 0;
  double gamma = 0.0;
  double log_size = 0.0;  // ln N
  std::optional<Peak> peak;
  std::optional<double> efficiency;
  bool linear_regime = true;
  std::optional<double> local_slope;  // vs previous non-flagged size
};

struct ScalingFit {
  std::vector<ScalingPoint> points;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double beta_stderr = std::numeric_limits<double>::quiet_NaN();
  double slope_coefficient = std::numeric_limits<double>::quiet_NaN();  // 1/n term
  int verified_n = 0;
  int verified_l = 0;
  bool verify_pass = false;
};

// Measures t0/p(t0) per depth, forms local slopes of ln(metric) vs ln(N)
// between consecutive non-flagged sizes, and extrapolates the exponent by an
// unweighted line fit of slopes against the pair midpoint 2/(n_i + n_j);
// beta is the 1/n -> 0 intercept, its stderr comes from the fit residuals.
// When three or more slopes are available the smallest-size pair is dropped
// as a corrections-to-scaling guard.  Linear-regime sizes are excluded from
// the fit and flagged in the returned points.
template <typename Scalar = double>
ScalingFit scaling_experiment(const ScalingProtocol& protocol) {
  if (protocol.depths.size() < 4)
    throw std::invalid_argument("scaling experiment requires at least 4 sizes");
  PeakPolicy pol;
  pol.max_samples = protocol.max_samples;

  ScalingFit fit;
  fit.points.resize(protocol.depths.size());
  parallel_for(protocol.depths.size(), protocol.workers, [&](std::size_t i) {
    const int n = protocol.depths[i];
    const int l = protocol.level_for(n);
    const double gamma = protocol.gamma_for(n);
    const ReducedSystem<Scalar> sys = reduce_comb<Scalar>({n, l, gamma});
    const SpectralDecomposition<Scalar> d = decompose(sys.dense());
    const Vector<Scalar> c = mode_weights(d, sys.initial_state, sys.marked_index);
    const EfficiencyResult eff = efficiency_from_modes(d.eigenvalues, c, n, l, gamma, pol);
    ScalingPoint& pt = fit.points[i];
    pt.n = n;
    pt.l = l;
    pt.gamma = gamma;
    pt.log_size = log_tree_size(n);
    pt.peak = eff.peak;
    pt.efficiency = eff.value;
    pt.linear_regime = eff.linear_regime;
  });

  std::vector<double> xs, ys;
  const ScalingPoint* prev = nullptr;
  for (ScalingPoint& pt : fit.points) {
    if (pt.linear_regime) continue;
    if (prev) {
      const double slope = (std::log(*pt.efficiency) - std::log(*prev->efficiency)) /
                           (pt.log_size - prev->log_size);
      pt.local_slope = slope;
      ys.push_back(slope);
      xs.push_back(2.0 / (prev->n + pt.n));
    }
    prev = &pt;
  }
  if (ys.size() >= 3) {  // drop the smallest-size pair
    xs.erase(xs.begin());
    ys.erase(ys.begin());
  }
  const std::size_t m = ys.size();
  if (m == 1) {
    fit.beta = ys[0];
  } else if (m >= 2) {
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < m; ++i) { xbar += xs[i]; ybar += ys[i]; }
    xbar /= static_cast<double>(m);
    ybar /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sxx += (xs[i] - xbar) * (xs[i] - xbar);
      sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    const double b = sxy / sxx;
    const double a = ybar - b * xbar;
    fit.beta = a;
    fit.slope_coefficient = b;
    if (m > 2) {
      double ssr = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double e = ys[i] - (a + b * xs[i]);
        ssr += e * e;
      }
      const double sigma2 = ssr / static_cast<double>(m - 2);
      fit.beta_stderr = std::sqrt(sigma2 * (1.0 / static_cast<double>(m) + xbar * xbar / sxx));
    } else {
      fit.beta_stderr = 0.0;  // two points determine the line exactly
    }
  }

  // Provenance: re-derive the lumping at the largest directly checkable
  // depth and verify it against the full system.
  const int n_check = std::min(protocol.verify_depth_cap, protocol.depths.back());
  const int l_check = std::min(protocol.level_for(n_check), n_check);
  const double g_check = protocol.gamma_for(n_check);
  const TreeParams check_params{n_check, l_check, g_check};
  const FullSystem<Scalar> full = build_full_hamiltonian<Scalar>(check_params);
  const ReductionMap map = reduction_map(n_check, l_check);
  const ReducedSystem<Scalar> reduced = reduce_comb<Scalar>(check_params);
  fit.verified_n = n_check;
  fit.verified_l = l_check;
  fit.verify_pass = verify_reduction(full, map, reduced).all_pass;
  return fit;
}

}  // namespace qsearch
