#include "qsearch/centrality.hpp"

#include "qsearch/search_analysis.hpp"
#include "qsearch/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qsearch {

std::uint64_t distance_sum(int n, int l) {
  if (n < 1 || l < 1 || l > n) throw std::invalid_argument("level must satisfy 1 <= l <= n");
  if (n > 56) throw std::invalid_argument("distance sum limited to depth 56");
  std::uint64_t total = 0;
  for (int a = 0; a < l; ++a) {
    const int du = l - a;  // level of the a-th ancestor
    if (a == 0) {
      // descendants of v itself: 2^b sites at distance b
      for (int b = 0; b <= n - l; ++b)
        total += (std::uint64_t{1} << b) * static_cast<std::uint64_t>(b);
    } else {
      total += static_cast<std::uint64_t>(a);  // the ancestor
      // its subtree away from v, rooted one step further
      for (int b = 0; b < n - du; ++b)
        total += (std::uint64_t{1} << b) * static_cast<std::uint64_t>(a + 1 + b);
    }
  }
  return total;
}

Closeness closeness(int n, int l) {
  if (n == 1) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  const double sum = static_cast<double>(distance_sum(n, l));
  return {1.0 / sum, (tree_size_d(n) - 1.0) / sum};
}

Betweenness betweenness(int n, int l) {
  if (n < 1 || l < 1 || l > n) throw std::invalid_argument("level must satisfy 1 <= l <= n");
  if (n == 1) return {0.0, 0.0};
  using u128 = unsigned __int128;
  const std::uint64_t N = tree_size(n);
  const std::uint64_t others = N - 1;
  u128 component_pairs = 0;
  if (l < n) {
    const std::uint64_t child = tree_size(n - l);  // each child subtree
    component_pairs += 2 * (static_cast<u128>(child) * child);
  }
  if (l > 1) {
    const std::uint64_t above = N - (tree_size(n - l + 1));  // all sites outside v's subtree
    component_pairs += static_cast<u128>(above) * above;
  }
  const u128 raw = static_cast<u128>(others) * others - component_pairs;
  const double raw_d = static_cast<double>(raw);
  const double Nd = tree_size_d(n);
  return {raw_d, raw_d / ((Nd - 1.0) * (Nd - 2.0))};
}

int eccentricity(int n, int l) {
  if (n < 1 || l < 1 || l > n) throw std::invalid_argument("level must satisfy 1 <= l <= n");
  // farthest site: a deepest leaf reached back through the root
  return n == 1 ? 0 : n + l - 2;
}

double kappa_hat(int n, int l) {
  return static_cast<double>(distance_sum(n, l)) / (static_cast<double>(n) *
                                                    (tree_size_d(n) - 1.0));
}

double kappa_refined(int n, int l) {
  const int m = n - 4;
  if (m < 2) return kappa_hat(n, l);
  const long long lm = std::llround(static_cast<double>(l) * m / n);
  const int l2 = static_cast<int>(std::clamp(lm, 1ll, static_cast<long long>(m)));
  return (n * kappa_hat(n, l) - m * kappa_hat(m, l2)) / static_cast<double>(n - m);
}

CentralityTable centrality_table(int n) {
  if (n < 4 || n % 4 != 0) throw std::invalid_argument("depth must be divisible by 4");
  CentralityTable table;
  table.n = n;
  for (const int l : {1, n / 4, n / 2, 3 * n / 4, n}) {
    CentralityRow row;
    row.level = l;
    row.beta_pred = beta_prediction(l, n);
    row.closeness_norm = closeness(n, l).normalized;
    row.kappa = kappa_refined(n, l);
    row.betweenness_norm = betweenness(n, l).normalized;
    row.kappa_minus_two_beta = row.kappa - 2.0 * row.beta_pred;
    table.rows.push_back(row);
    table.max_kappa_two_beta_dev =
        std::max(table.max_kappa_two_beta_dev, std::abs(row.kappa_minus_two_beta));
  }
  return table;
}

}  // namespace qsearch
