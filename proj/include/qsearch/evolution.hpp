#pragma once

// Exact time evolution of real-symmetric Hamiltonians via spectral
// decomposition, plus the peak analysis used for runtime measurements.
//
// The marked-site amplitude is a finite mode sum
//   a(t) = sum_k c_k exp(-i lambda_k t),  c_k = <w|v_k><v_k|psi0>,
// so one m^3 decomposition serves arbitrary, widely spaced times.  Uniform
// grids use a per-mode phase recurrence (one complex multiply per sample)
// re-anchored with sincos every 4096 steps to keep rounding drift below
// 1e-12 in amplitude.

#include "qsearch/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qsearch {

class numerical_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar = double>
struct SpectralDecomposition {
  Vector<Scalar> eigenvalues;   // ascending
  Matrix<Scalar> eigenvectors;  // orthonormal columns
};

template <typename Scalar = double>
SpectralDecomposition<Scalar> decompose(const Matrix<Scalar>& H) {
  if (H.rows() != H.cols()) throw std::invalid_argument("matrix must be square");
  const double scale = std::max(1.0, static_cast<double>(H.cwiseAbs().maxCoeff()));
  const double asym = static_cast<double>((H - H.transpose()).cwiseAbs().maxCoeff());
  if (asym > 1e-12 * scale) throw std::invalid_argument("matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(H);
  if (es.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigensolver failed to converge: m=" << H.rows() << " trace=" << H.trace()
        << " max|H|=" << scale;
    throw numerical_failure(msg.str());
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

// Per-mode weights of the marked-site amplitude, c_k = <w|v_k><v_k|psi0>.
template <typename Scalar>
Vector<Scalar> mode_weights(const SpectralDecomposition<Scalar>& d, const Vector<Scalar>& initial,
                            Index marked) {
  return d.eigenvectors.row(marked).transpose().cwiseProduct(d.eigenvectors.transpose() * initial);
}

template <typename Scalar>
std::complex<Scalar> amplitude_at(const Vector<Scalar>& lambda, const Vector<Scalar>& weights,
                                  Scalar t) {
  Scalar re{0}, im{0};
  for (Index k = 0; k < lambda.size(); ++k) {
    const Scalar ph = -lambda[k] * t;
    re += weights[k] * std::cos(ph);
    im += weights[k] * std::sin(ph);
  }
  return {re, im};
}

template <typename Scalar>
Scalar probability_at(const Vector<Scalar>& lambda, const Vector<Scalar>& weights, Scalar t) {
  return std::norm(amplitude_at(lambda, weights, t));
}

// |a(t)|^2 on the uniform grid t = t0 + j*dt, j = 0..count-1.
template <typename Scalar>
std::vector<Scalar> probability_grid(const Vector<Scalar>& lambda, const Vector<Scalar>& weights,
                                     Scalar t0, Scalar dt, std::size_t count) {
  constexpr std::size_t kAnchor = 4096;
  const Index m = lambda.size();
  std::vector<Scalar> out(count);
  std::vector<Scalar> zr(static_cast<std::size_t>(m)), zi(static_cast<std::size_t>(m));
  std::vector<Scalar> ur(static_cast<std::size_t>(m)), ui(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) {
    const Scalar ph = -lambda[k] * dt;
    ur[static_cast<std::size_t>(k)] = std::cos(ph);
    ui[static_cast<std::size_t>(k)] = std::sin(ph);
  }
  for (std::size_t j = 0; j < count; ++j) {
    if (j % kAnchor == 0) {
      const Scalar tj = t0 + static_cast<Scalar>(j) * dt;
      for (Index k = 0; k < m; ++k) {
        const Scalar ph = -lambda[k] * tj;
        zr[static_cast<std::size_t>(k)] = std::cos(ph);
        zi[static_cast<std::size_t>(k)] = std::sin(ph);
      }
    }
    Scalar re{0}, im{0};
    const Scalar* cw = weights.data();
    for (Index k = 0; k < m; ++k) {
      re += cw[k] * zr[static_cast<std::size_t>(k)];
      im += cw[k] * zi[static_cast<std::size_t>(k)];
    }
    out[j] = re * re + im * im;
    for (Index k = 0; k < m; ++k) {
      const std::size_t q = static_cast<std::size_t>(k);
      const Scalar nr = zr[q] * ur[q] - zi[q] * ui[q];
      zi[q] = zr[q] * ui[q] + zi[q] * ur[q];
      zr[q] = nr;
    }
  }
  return out;
}

template <typename Scalar = double>
struct EvolutionTrace {
  Vector<Scalar> times;
  Vector<std::complex<Scalar>> amplitude;  // marked-site amplitude
  Vector<Scalar> probability;
};

template <typename Scalar>
EvolutionTrace<Scalar> evolve_amplitude(const ReducedSystem<Scalar>& sys,
                                        const Vector<Scalar>& times) {
  if (times.size() == 0) throw std::invalid_argument("empty time grid");
  const SpectralDecomposition<Scalar> d = decompose(sys.dense());
  const Vector<Scalar> c = mode_weights(d, sys.initial_state, sys.marked_index);
  EvolutionTrace<Scalar> trace;
  trace.times = times;
  trace.amplitude.resize(times.size());
  trace.probability.resize(times.size());
  for (Index i = 0; i < times.size(); ++i) {
    trace.amplitude[i] = amplitude_at(d.eigenvalues, c, times[i]);
    trace.probability[i] = std::norm(trace.amplitude[i]);
  }
  return trace;
}

// Full lumped state at one instant (norm is conserved exactly).
template <typename Scalar>
Vector<std::complex<Scalar>> evolve_state(const SpectralDecomposition<Scalar>& d,
                                          const Vector<Scalar>& initial, Scalar t) {
  const Vector<Scalar> coeff = d.eigenvectors.transpose() * initial;
  Vector<std::complex<Scalar>> state = Vector<std::complex<Scalar>>::Zero(initial.size());
  for (Index k = 0; k < coeff.size(); ++k) {
    const Scalar ph = -d.eigenvalues[k] * t;
    const std::complex<Scalar> phase{std::cos(ph), std::sin(ph)};
    state += (coeff[k] * phase) * d.eigenvectors.col(k).template cast<std::complex<Scalar>>();
  }
  return state;
}

// Characteristic timescales of the mode sum, from modes carrying at least
// eta of the largest |c_k|: `dominant` is the beat period of the two
// heaviest modes, `fastest` the period of the full retained bandwidth.
struct ScanScales {
  std::optional<double> dominant;
  std::optional<double> fastest;
};

template <typename Scalar>
ScanScales scan_scales(const Vector<Scalar>& lambda, const Vector<Scalar>& weights,
                       double eta = 1e-3) {
  const Index m = lambda.size();
  const Scalar cmax = weights.cwiseAbs().maxCoeff();
  std::vector<Index> keep;
  for (Index k = 0; k < m; ++k)
    if (std::abs(weights[k]) > eta * cmax) keep.push_back(k);
  if (keep.size() < 2) return {};

  double lo = lambda[keep.front()], hi = lambda[keep.front()], amax = 0.0;
  Index top1 = keep.front(), top2 = keep.front();
  Scalar best1 = -1, best2 = -1;
  for (const Index k : keep) {
    lo = std::min(lo, static_cast<double>(lambda[k]));
    hi = std::max(hi, static_cast<double>(lambda[k]));
    amax = std::max(amax, std::abs(static_cast<double>(lambda[k])));
    const Scalar a = std::abs(weights[k]);
    if (a > best1) {
      best2 = best1; top2 = top1;
      best1 = a; top1 = k;
    } else if (a > best2) {
      best2 = a; top2 = k;
    }
  }
  ScanScales scales;
  const double spread = hi - lo;
  if (spread > 1e-14) scales.fastest = 2.0 * std::numbers::pi / spread;
  const double gap = std::abs(static_cast<double>(lambda[top1] - lambda[top2]));
  if (gap > 1e-14 * std::max(1.0, amax)) scales.dominant = 2.0 * std::numbers::pi / gap;
  return scales;
}

// Golden-section maximization on [a, b]; returns the bracket midpoint and
// its value once the bracket width drops below rel_tol * |b|.
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b, double rel_tol) {
  constexpr double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > rel_tol * std::max(std::abs(b), 1e-300)) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  const double tm = 0.5 * (a + b);
  return {tm, f(tm)};
}

struct Peak {
  double time = 0.0;
  double probability = 0.0;
};

// Scan policy for locating the first measurement-worthy maximum of |a(t)|^2.
//
// The scan horizon starts at min(8*N^beta_pred, 16*dominant beat) and doubles
// on failure; beta_pred = 1/2 + l/(2n) is only a horizon heuristic, never a
// result.  The step resolves both the dominant beat (64 samples) and the
// fastest retained mode (8 samples), floored so a scan never exceeds
// max_samples.  A grid candidate must (i) reach qualify * p(0), (ii) reach
// keep_frac of the scan's refined global maximum, and (iii) drop by
// prominence * (global maximum) before any later sample exceeds it -- this
// rejects shoulder ripples riding the resonance envelope.  Accepted
// candidates are refined by golden section.
struct PeakPolicy {
  double qualify = 1.5;
  double keep_frac = 0.5;
  double prominence = 0.1;
  double mode_eta = 1e-3;
  std::size_t max_samples = std::size_t{1} << 21;
  int max_scans = 11;
  double golden_rel_tol = 1e-7;
};

namespace detail {

inline double initial_horizon(const ScanScales& scales, int n, int l) {
  const double beta_pred = 0.5 + static_cast<double>(l) / (2.0 * n);
  const double cap = 8.0 * std::pow(tree_size_d(n), beta_pred);
  if (scales.dominant) return std::min(cap, 16.0 * *scales.dominant);
  return cap;
}

inline double scan_step(const ScanScales& scales, double horizon, std::size_t max_samples) {
  double step = horizon / 4096.0;
  if (scales.dominant) step = std::min(step, *scales.dominant / 64.0);
  if (scales.fastest) step = std::min(step, *scales.fastest / 8.0);
  return std::max(step, horizon / static_cast<double>(max_samples));
}

}  // namespace detail

template <typename Scalar>
std::optional<Peak> first_peak_from_modes(const Vector<Scalar>& lambda,
                                          const Vector<Scalar>& weights, int n, int l,
                                          double gamma, const PeakPolicy& pol = {}) {
  if (gamma == 0.0) return std::nullopt;  // |a(t)| is constant
  const double p0 = static_cast<double>(probability_at(lambda, weights, Scalar{0}));
  const ScanScales scales = scan_scales(lambda, weights, pol.mode_eta);
  double horizon = detail::initial_horizon(scales, n, l);
  const auto prob = [&](double t) {
    return static_cast<double>(probability_at(lambda, weights, static_cast<Scalar>(t)));
  };

  for (int scan = 0; scan < pol.max_scans; ++scan, horizon *= 2.0) {
    const double step = detail::scan_step(scales, horizon, pol.max_samples);
    const std::size_t count = static_cast<std::size_t>(horizon / step) + 2;
    const std::vector<Scalar> ps =
        probability_grid(lambda, weights, Scalar{0}, static_cast<Scalar>(step), count);

    std::size_t ia = 0;
    double pmax = -1.0;
    for (std::size_t j = 0; j < count; ++j)
      if (static_cast<double>(ps[j]) > pmax) { pmax = static_cast<double>(ps[j]); ia = j; }
    if (pmax < pol.qualify * p0) continue;

    const double lo = step * static_cast<double>(ia == 0 ? 0 : ia - 1);
    const double hi = step * static_cast<double>(std::min(ia + 1, count - 1));
    pmax = std::max(pmax, golden_max(prob, lo, hi, pol.golden_rel_tol).second);

    for (std::size_t i = 1; i + 1 < count; ++i) {
      const double pi = static_cast<double>(ps[i]);
      if (!(pi >= static_cast<double>(ps[i - 1]) && pi > static_cast<double>(ps[i + 1]) &&
            pi >= pol.keep_frac * pmax))
        continue;
      double valley = pi;
      for (std::size_t j = i + 1; j < count; ++j) {
        valley = std::min(valley, static_cast<double>(ps[j]));
        if (static_cast<double>(ps[j]) > pi) break;
      }
      if (pi - valley < pol.prominence * pmax) continue;
      const auto [t, p] =
          golden_max(prob, step * static_cast<double>(i - 1), step * static_cast<double>(i + 1),
                     pol.golden_rel_tol);
      return Peak{t, p};
    }
  }
  return std::nullopt;
}

// Largest |a(t)|^2 over the initial scan horizon (no doubling): the dominant
// beat window already contains the full envelope.  Used by coupling sweeps.
template <typename Scalar>
Peak max_probability_from_modes(const Vector<Scalar>& lambda, const Vector<Scalar>& weights,
                                int n, int l, const PeakPolicy& pol = {}) {
  const ScanScales scales = scan_scales(lambda, weights, pol.mode_eta);
  const double horizon = detail::initial_horizon(scales, n, l);
  const double step = detail::scan_step(scales, horizon, pol.max_samples);
  const std::size_t count = static_cast<std::size_t>(horizon / step) + 2;
  const std::vector<Scalar> ps =
      probability_grid(lambda, weights, Scalar{0}, static_cast<Scalar>(step), count);

  std::size_t ia = 0;
  double pmax = -1.0;
  for (std::size_t j = 0; j < count; ++j)
    if (static_cast<double>(ps[j]) > pmax) { pmax = static_cast<double>(ps[j]); ia = j; }
  const auto prob = [&](double t) {
    return static_cast<double>(probability_at(lambda, weights, static_cast<Scalar>(t)));
  };
  const double lo = step * static_cast<double>(ia == 0 ? 0 : ia - 1);
  const double hi = step * static_cast<double>(std::min(ia + 1, count - 1));
  Peak best{step * static_cast<double>(ia), pmax};
  const auto [t, p] = golden_max(prob, lo, hi, pol.golden_rel_tol);
  if (p > best.probability) best = {t, p};
  return best;
}

template <typename Scalar>
std::optional<Peak> first_peak(const ReducedSystem<Scalar>& sys,
                               const SpectralDecomposition<Scalar>& d,
                               const PeakPolicy& pol = {}) {
  const Vector<Scalar> c = mode_weights(d, sys.initial_state, sys.marked_index);
  return first_peak_from_modes(d.eigenvalues, c, sys.params.n, sys.params.l, sys.params.gamma,
                               pol);
}

template <typename Scalar>
std::optional<Peak> first_peak(const ReducedSystem<Scalar>& sys, const PeakPolicy& pol = {}) {
  return first_peak(sys, decompose(sys.dense()), pol);
}

template <typename Scalar>
Peak max_probability(const ReducedSystem<Scalar>& sys, const SpectralDecomposition<Scalar>& d,
                     const PeakPolicy& pol = {}) {
  const Vector<Scalar> c = mode_weights(d, sys.initial_state, sys.marked_index);
  return max_probability_from_modes(d.eigenvalues, c, sys.params.n, sys.params.l, pol);
}

}  // namespace qsearch
