#pragma once

// Classical random-walk baseline: expected hitting times to the root of the
// level chain (up with probability 1/3 from interior levels, leaves
// deterministic), solved exactly in rational arithmetic where it fits and by
// the same elimination in floating point beyond.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsearch {

// Reduced fraction of two int64 values; intermediates run through 128-bit
// products and overflow of the reduced result throws.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value) : num_(value) {}  // NOLINT: implicit by design
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

 private:
  static Rational normalize(__int128 num, __int128 den);
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline constexpr int kMaxExactDepth = 30;  // rational solve fits in int64

struct HittingTimes {
  int n = 0;
  bool exact = false;              // solved in rational arithmetic
  std::vector<double> per_level;   // t_k, k = 1..n
  std::vector<double> weighted;    // (2^{k-1}/N) t_k
  double average = 0.0;            // T = sum of weighted
};

// Exact per-level hitting times for n <= kMaxExactDepth (all integers).
std::vector<Rational> hitting_times_exact(int n);

// Exact level-weighted average T for n <= kMaxExactDepth.
Rational average_hitting_time_exact(int n);

// Hitting times at any depth: rational solve converted to double in the
// exact regime, the same forward elimination in double beyond.
HittingTimes hitting_times(int n);

struct ClassicalComplexityReport {
  int n = 0;
  double t2 = 0.0;                  // expected steps from level 2
  bool t2_is_n_minus_2 = false;     // t2 == N - 2
  double average = 0.0;             // T
  double deep_weight = 0.0;         // stationary weight of levels >= 2, (N-1)/N
  bool linear_lower_bound = false;  // T >= t2 * deep_weight
};

// Evidence that the classical search is Omega(N): t2 pins the wall between
// the root and everything else, and nearly all weight sits behind it.
ClassicalComplexityReport classical_complexity_class(int n);

struct McResult {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::uint64_t walks = 0;
};

// Monte-Carlo mean hitting time from start_level, split over 64 fixed
// batches with seeds derived from `seed` so the estimate is independent of
// the worker count.
McResult mc_hitting_time(int n, int start_level, std::uint64_t walks, std::uint64_t seed,
                         int workers = 1);

}  // namespace qsearch
