#include "qsearch/classical.hpp"

#include "qsearch/parallel.hpp"
#include "qsearch/tree.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace qsearch {

namespace {

std::int64_t checked_cast(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
  return static_cast<std::int64_t>(v);
}

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

}  // namespace

Rational Rational::normalize(__int128 num, __int128 den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const __int128 g = num == 0 ? den : gcd128(num, den);
  Rational r;
  r.num_ = checked_cast(num / g);
  r.den_ = checked_cast(den / g);
  return r;
}

Rational::Rational(std::int64_t num, std::int64_t den) {
  *this = normalize(num, den);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::normalize(static_cast<__int128>(a.num_) * b.den_ +
                                 static_cast<__int128>(b.num_) * a.den_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational::normalize(static_cast<__int128>(a.num_) * b.den_ -
                                 static_cast<__int128>(b.num_) * a.den_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::normalize(static_cast<__int128>(a.num_) * b.num_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  return Rational::normalize(static_cast<__int128>(a.num_) * b.den_,
                             static_cast<__int128>(a.den_) * b.num_);
}

// Level-chain equations: t_1 = 0; t_k = 1 + t_{k-1}/3 + 2 t_{k+1}/3 for
// 1 < k < n; t_n = 1 + t_{n-1}.  Forward elimination with the ansatz
// t_k = (1 - s_k) t_{k+1} + d_k.  The pivot complement s_k = s_{k-1}/(2 +
// s_{k-1}) = 1/(2^k - 1) is tracked directly: the eliminated coefficient
// itself approaches 1 and would round to it in doubles near k = 53, turning
// the closing division into 0/0.
template <typename Num>
static std::vector<Num> solve_chain(int n) {
  std::vector<Num> s(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
  s[0] = Num{1};
  d[0] = Num{0};
  for (int k = 2; k < n; ++k) {
    const Num pivot = Num{2} + s[static_cast<std::size_t>(k - 2)];
    s[static_cast<std::size_t>(k - 1)] = s[static_cast<std::size_t>(k - 2)] / pivot;
    d[static_cast<std::size_t>(k - 1)] = (d[static_cast<std::size_t>(k - 2)] + Num{3}) / pivot;
  }
  std::vector<Num> t(static_cast<std::size_t>(n));
  t[static_cast<std::size_t>(n - 1)] = (Num{1} + d[static_cast<std::size_t>(n - 2)]) /
                                       s[static_cast<std::size_t>(n - 2)];
  for (int k = n - 1; k >= 1; --k)
    t[static_cast<std::size_t>(k - 1)] = (Num{1} - s[static_cast<std::size_t>(k - 1)]) *
                                             t[static_cast<std::size_t>(k)] +
                                         d[static_cast<std::size_t>(k - 1)];
  return t;
}

std::vector<Rational> hitting_times_exact(int n) {
  if (n < 2) throw std::invalid_argument("depth must be at least 2");
  if (n > kMaxExactDepth) throw std::invalid_argument("exact solve limited to depth 30");
  return solve_chain<Rational>(n);
}

Rational average_hitting_time_exact(int n) {
  const std::vector<Rational> t = hitting_times_exact(n);
  Rational num{0};
  for (int k = 1; k <= n; ++k)
    num = num + Rational{std::int64_t{1} << (k - 1)} * t[static_cast<std::size_t>(k - 1)];
  return num / Rational{static_cast<std::int64_t>(tree_size(n))};
}

HittingTimes hitting_times(int n) {
  if (n < 2) throw std::invalid_argument("depth must be at least 2");
  HittingTimes result;
  result.n = n;
  result.exact = n <= kMaxExactDepth;
  result.per_level.resize(static_cast<std::size_t>(n));
  if (result.exact) {
    const std::vector<Rational> t = hitting_times_exact(n);
    for (int k = 0; k < n; ++k)
      result.per_level[static_cast<std::size_t>(k)] = t[static_cast<std::size_t>(k)].to_double();
  } else {
    const std::vector<double> t = solve_chain<double>(n);
    result.per_level = t;
  }
  result.weighted.resize(static_cast<std::size_t>(n));
  const double N = tree_size_d(n);
  double total = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double w = std::exp2(k - 1) / N;
    result.weighted[static_cast<std::size_t>(k - 1)] =
        w * result.per_level[static_cast<std::size_t>(k - 1)];
    total += result.weighted[static_cast<std::size_t>(k - 1)];
  }
  result.average = total;
  return result;
}

ClassicalComplexityReport classical_complexity_class(int n) {
  const HittingTimes times = hitting_times(n);
  ClassicalComplexityReport report;
  report.n = n;
  report.t2 = times.per_level[1];
  const double N = tree_size_d(n);
  report.t2_is_n_minus_2 = std::abs(report.t2 - (N - 2.0)) <= 1e-9 * N;
  report.average = times.average;
  report.deep_weight = (N - 1.0) / N;
  report.linear_lower_bound = report.average >= report.t2 * report.deep_weight;
  return report;
}

McResult mc_hitting_time(int n, int start_level, std::uint64_t walks, std::uint64_t seed,
                         int workers) {
  if (n < 2) throw std::invalid_argument("depth must be at least 2");
  if (start_level < 1 || start_level > n) throw std::invalid_argument("invalid start level");
  constexpr std::uint64_t kBatches = 64;
  const std::uint64_t per_batch = walks / kBatches;
  if (per_batch == 0) throw std::invalid_argument("need at least 64 walks");

  std::vector<double> sums(kBatches), sumsqs(kBatches);
  parallel_for(kBatches, workers, [&](std::size_t b) {
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (b + 1)));
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t w = 0; w < per_batch; ++w) {
      int level = start_level;
      std::uint64_t steps = 0;
      while (level > 1) {
        if (level == n)
          --level;
        else if (rng() % 3 == 0)
          --level;
        else
          ++level;
        ++steps;
      }
      const double s = static_cast<double>(steps);
      sum += s;
      sumsq += s * s;
    }
    sums[b] = sum;
    sumsqs[b] = sumsq;
  });

  const double total_walks = static_cast<double>(per_batch * kBatches);
  const double sum = std::accumulate(sums.begin(), sums.end(), 0.0);
  const double sumsq = std::accumulate(sumsqs.begin(), sumsqs.end(), 0.0);
  McResult result;
  result.walks = per_batch * kBatches;
  result.mean = sum / total_walks;
  const double var = (sumsq - sum * sum / total_walks) / (total_walks - 1.0);
  result.stderr_mean = std::sqrt(var / total_walks);
  return result;
}

}  // namespace qsearch
