#pragma once

// Closed-form marked-site amplitude for the root case (l = 1), where the
// lumped system is an open chain: Laplace-domain solution, its dominant pole
// pair at the critical coupling gamma = 1, and the small-gamma two-term
// approximation, plus the Theta(sqrt(N)) runtime formula they imply.

#include "qsearch/tree.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace qsearch {

using Complex = std::complex<double>;

// Roots of x^2 - ((3 - i*alpha*s)/sqrt(2)) x + 1 with alpha = 1/gamma.
// x0 lies in the closed unit disk and x0*x1 = 1 by construction: the large
// root is formed from the sign of sqrt(b^2-4) aligned with b (no
// cancellation) and the small root as its reciprocal.
struct QuadraticRoots {
  Complex x0;
  Complex x1;
  bool degenerate = false;  // double root |x0| = |x1| = 1
};

inline QuadraticRoots solve_quadratic(Complex s, double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  const double alpha = 1.0 / gamma;
  const Complex b = (3.0 - Complex{0, 1} * alpha * s) / std::numbers::sqrt2;
  const Complex disc = b * b - 4.0;
  Complex sq = std::sqrt(disc);
  if ((std::conj(b) * sq).real() < 0.0) sq = -sq;
  QuadraticRoots roots;
  roots.x1 = 0.5 * (b + sq);
  roots.x0 = 1.0 / roots.x1;
  roots.degenerate = std::abs(disc) <= 1e-12 * std::max(1.0, std::norm(b));
  if (std::abs(roots.x0) == std::abs(roots.x1) && roots.x1.real() < roots.x0.real())
    std::swap(roots.x0, roots.x1);
  return roots;
}

// z^e by binary exponentiation, e >= 0.
inline Complex ipow(Complex z, int e) {
  Complex acc{1.0, 0.0};
  for (; e > 0; e >>= 1, z *= z)
    if (e & 1) acc *= z;
  return acc;
}

namespace detail {

// Denominator of the Laplace-domain amplitude with x1^{n-1} factored out,
//   D(s) = [(is+1)x1 - sqrt2] - q^{n-1} [(is+1)x0 - sqrt2],  q = x0/x1,
// together with its s-derivative (x' = -(i/sqrt2) x / (x - other root)).
struct ChainDenominator {
  Complex D, dD;
  Complex x0, x1, qn1;
};

inline ChainDenominator chain_denominator(Complex s, int n) {
  constexpr Complex kI{0, 1};
  const double s2 = std::numbers::sqrt2;
  const QuadraticRoots r = solve_quadratic(s, 1.0);
  const Complex x0 = r.x0, x1 = r.x1;
  const Complex A = kI * s + 1.0;
  const Complex dx1 = -(kI / s2) * x1 / (x1 - x0);
  const Complex dx0 = -(kI / s2) * x0 / (x0 - x1);
  const Complex q = x0 / x1;
  const Complex qn1 = ipow(q, n - 1);
  const Complex qn2 = ipow(q, n - 2);
  const Complex dq = (dx0 * x1 - x0 * dx1) / (x1 * x1);
  const Complex D = (A * x1 - s2) - qn1 * (A * x0 - s2);
  const Complex dD = (kI * x1 + A * dx1) -
                     (static_cast<double>(n - 1) * qn2 * dq * (A * x0 - s2) +
                      qn1 * (kI * x0 + A * dx0));
  return {D, dD, x0, x1, qn1};
}

}  // namespace detail

// Laplace transform of the marked-site amplitude at gamma = 1,
//   (i/sqrtN)(x1^n - x0^n) / (x1^{n-1}[(is+1)x1 - sqrt2] - x0^{n-1}[(is+1)x0 - sqrt2]),
// evaluated with x1^{n-1} divided out of numerator and denominator so all
// magnitudes stay O(1) at any depth.
inline Complex laplace_psi1(Complex s, int n) {
  if (n < 1) throw std::invalid_argument("depth must be at least 1");
  if (!(s.real() > 0.0)) throw std::invalid_argument("frequency must have positive real part");
  const auto d = detail::chain_denominator(s, n);
  const Complex num = d.x1 - d.x0 * d.qn1;
  return Complex{0, 1} / std::sqrt(tree_size_d(n)) * num / d.D;
}

// Conjugate pole pair of laplace_psi1 nearest the origin and its residues,
// located by Newton iteration from the asymptotic seeds +-i/sqrt(2^{n+1}).
struct PolePair {
  Complex p_plus, p_minus;  // poles, Im p_plus > 0
  Complex r_plus, r_minus;  // residues
};

inline PolePair critical_poles(int n) {
  if (n < 2) throw std::invalid_argument("depth must be at least 2");
  const auto refine = [n](Complex s) {
    for (int it = 0; it < 60; ++it) {
      const auto d = detail::chain_denominator(s, n);
      const Complex step = d.D / d.dD;
      s -= step;
      if (std::abs(step) < 1e-15 * std::abs(s)) break;
    }
    return s;
  };
  const auto residue = [n](Complex p) {
    const auto d = detail::chain_denominator(p, n);
    return Complex{0, 1} / std::sqrt(tree_size_d(n)) * (d.x1 - d.x0 * d.qn1) / d.dD;
  };
  const Complex seed{0.0, std::exp2(-0.5 * (n + 1))};
  PolePair pair;
  pair.p_plus = refine(seed);
  pair.p_minus = refine(-seed);
  pair.r_plus = residue(pair.p_plus);
  pair.r_minus = residue(pair.p_minus);
  return pair;
}

enum class CriticalForm { pair, sine };

// Two-pole approximation of the marked-site amplitude at gamma = 1: the
// residue pair r+ e^{p+ t} + r- e^{p- t}, or its symmetric simplification
// (i/sqrt2) sin(t / sqrt(2^{n+1})).
inline Complex approx_critical(double t, int n, CriticalForm form, const PolePair& poles) {
  if (form == CriticalForm::sine)
    return Complex{0, 1} / std::numbers::sqrt2 * std::sin(t / std::sqrt(std::exp2(n + 1)));
  return poles.r_plus * std::exp(poles.p_plus * t) + poles.r_minus * std::exp(poles.p_minus * t);
}

inline Complex approx_critical(double t, int n, CriticalForm form) {
  if (form == CriticalForm::sine) return approx_critical(t, n, form, PolePair{});
  return approx_critical(t, n, form, critical_poles(n));
}

// Two-term small-coupling approximation of the marked-site amplitude,
//   (1/sqrtN)[ 1/(1-a) + ((a^2+2a-1)/(a^2-1)) e^{i(a-1)/(a+1) t} ],  a = 1/gamma,
// exact at gamma = 0 where it reduces to (1/sqrtN) e^{it}.
inline Complex approx_small_gamma(double t, double gamma, double N) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("small-coupling form requires 0 <= gamma < 1");
  const double root_n = std::sqrt(N);
  if (gamma == 0.0) return std::exp(Complex{0, 1} * t) / root_n;
  const double a = 1.0 / gamma;
  const Complex osc = std::exp(Complex{0, 1} * ((a - 1.0) / (a + 1.0)) * t);
  return (1.0 / (1.0 - a) + (a * a + 2.0 * a - 1.0) / (a * a - 1.0) * osc) / root_n;
}

// Root-case runtime t0 / p(t0) at the critical coupling: pi sqrt(2^{n+1}).
inline double asymptotic_runtime(int n) {
  if (n < 2) throw std::invalid_argument("depth must be at least 2");
  return std::numbers::pi * std::sqrt(std::exp2(n + 1));
}

// O(N) efficiency of the small-coupling regime, pi (a+1)^3 (a-1) / (a^2 (a+3)^2) N.
inline double small_gamma_efficiency(double gamma, double N) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("small-coupling efficiency requires 0 < gamma < 1");
  const double a = 1.0 / gamma;
  const double ap1 = a + 1.0, ap3 = a + 3.0;
  return std::numbers::pi * ap1 * ap1 * ap1 * (a - 1.0) / (a * a * ap3 * ap3) * N;
}

}  // namespace qsearch
