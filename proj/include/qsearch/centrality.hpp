#pragma once

// Path-based centralities of balanced-tree sites, exact at any depth via
// level counting (no graph materialized), normalized against the star
// center as the maximal reference.

#include <cstdint>
#include <vector>

namespace qsearch {

// Sum of distances from the canonical level-l site to every site, exact in
// O(n): descendant levels counted directly, every other site counted
// through the unique ancestor its path turns at.
std::uint64_t distance_sum(int n, int l);

struct Closeness {
  double raw = 0.0;         // 1 / sum of distances
  double normalized = 0.0;  // raw / star-center raw = (N-1) / sum
};

// Closeness of the canonical level-l site; undefined (NaN) for the
// single-site tree.
Closeness closeness(int n, int l);

struct Betweenness {
  double raw = 0.0;         // ordered site pairs whose path crosses v
  double normalized = 0.0;  // raw / ((N-1)(N-2))
};

// Betweenness via the tree identity: removing v splits the remaining N-1
// sites into components c_i, and exactly (N-1)^2 - sum c_i^2 ordered pairs
// route through v.
Betweenness betweenness(int n, int l);

// Largest distance from the canonical level-l site to any site.
int eccentricity(int n, int l);

// Closeness growth constant: sum of distances ~ kappa * n * (N-1).
double kappa_hat(int n, int l);

// Richardson step in 1/n against depth n-4 at the same level fraction.
double kappa_refined(int n, int l);

struct CentralityRow {
  int level = 0;
  double beta_pred = 0.0;
  double closeness_norm = 0.0;
  double kappa = 0.0;  // refined estimate of the closeness constant
  double betweenness_norm = 0.0;
  double kappa_minus_two_beta = 0.0;
};

struct CentralityTable {
  int n = 0;
  std::vector<CentralityRow> rows;  // levels 1, n/4, n/2, 3n/4, n
  double max_kappa_two_beta_dev = 0.0;
};

// Five-level summary relating the closeness constant to the predicted
// search exponent (kappa = 2 beta).  Depth must be divisible by 4.
CentralityTable centrality_table(int n);

}  // namespace qsearch
