#pragma once

// Exact lumping of the search Hamiltonian onto its symmetry orbits.
//
// Two sites belong to the same orbit iff they share (distance to the marked
// site, level); orbit-averaging with weights 1/sqrt(orbit size) is an
// isometry V (V V^T = I) that commutes with the dynamics started from the
// uniform state, so the m-dimensional system V H V^T reproduces the marked
// amplitude exactly.  The lumped graph is a comb: the backbone keeps the
// marked site's ancestor path, each ancestor carries a side chain for the
// sibling subtree hanging off it, and the marked site continues into a chain
// for its own descendants.  Edges representing 2-fold bundles of tree edges
// get weight -sqrt(2)*gamma, single edges -gamma, and diagonals stay
// gamma*degree with the oracle -1 at the marked backbone site.

#include "qsearch/tree.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsearch {

struct CombSite {
  int level = 1;            // level of the represented sites in the tree
  int dist_to_marked = 0;   // common distance to the marked site
  int mult_log2 = 0;        // orbit size is 2^mult_log2
};

struct CombLayout {
  int n = 1, l = 1;
  Index marked_index = 0;
  std::vector<CombSite> sites;
  struct Edge {
    Index a = 0, b = 0;
    bool doubled = false;  // true: bundle of two tree edges, weight -sqrt(2)*gamma
  };
  std::vector<Edge> edges;

  Index size() const { return static_cast<Index>(sites.size()); }
};

// Number of lumped sites: backbone l, one side chain of length n-k per
// ancestor level k < l, one descendant chain of length n-l.
inline Index comb_size(int n, int l) {
  Index m = l + (n - l);
  for (int k = 1; k < l; ++k) m += n - k;
  return m;
}

inline CombLayout comb_layout(int n, int l) {
  TreeParams{n, l, 0.0}.validate();
  CombLayout lay;
  lay.n = n;
  lay.l = l;
  lay.sites.reserve(static_cast<std::size_t>(comb_size(n, l)));

  // Backbone: ancestor path down to the marked site, orbit size 1 each.
  for (int k = 1; k <= l; ++k) {
    lay.sites.push_back({k, l - k, 0});
    if (k > 1) lay.edges.push_back({static_cast<Index>(k - 2), static_cast<Index>(k - 1), false});
  }
  lay.marked_index = l - 1;

  // Side chains: the sibling subtree below the level-k ancestor, lumped by
  // level; j-th chain site holds the 2^(j-1) subtree sites at level k+j.
  for (int k = 1; k < l; ++k) {
    const Index backbone = static_cast<Index>(k - 1);
    for (int j = 1; j <= n - k; ++j) {
      const Index idx = lay.size();
      lay.sites.push_back({k + j, (l - k) + j, j - 1});
      lay.edges.push_back({j == 1 ? backbone : idx - 1, idx, j != 1});
    }
  }

  // Descendant chain: levels below the marked site, 2^j sites at level l+j;
  // already the attachment bundles the two children of the marked site.
  for (int j = 1; j <= n - l; ++j) {
    const Index idx = lay.size();
    lay.sites.push_back({l + j, j, j});
    lay.edges.push_back({j == 1 ? lay.marked_index : idx - 1, idx, true});
  }
  return lay;
}

template <typename Scalar = double>
struct ReducedSystem {
  TreeParams params;
  Sparse<Scalar> hamiltonian;               // symmetric, tree-structured
  Vector<Scalar> initial_state;             // orbit-lumped uniform state, sqrt(mult/N)
  std::vector<std::uint64_t> multiplicities;
  Index marked_index = 0;

  Index size() const { return hamiltonian.rows(); }
  Matrix<Scalar> dense() const { return Matrix<Scalar>(hamiltonian); }
};

template <typename Scalar = double>
ReducedSystem<Scalar> reduce_comb(const TreeParams& params) {
  params.validate();
  const CombLayout lay = comb_layout(params.n, params.l);
  const Index m = lay.size();
  const Scalar g = static_cast<Scalar>(params.gamma);
  const Scalar g2 = static_cast<Scalar>(params.gamma * std::sqrt(2.0));

  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(static_cast<std::size_t>(m + 2 * lay.edges.size()));
  for (Index i = 0; i < m; ++i) {
    Scalar diag = g * static_cast<Scalar>(level_degree(params.n, lay.sites[i].level));
    if (i == lay.marked_index) diag -= Scalar{1};
    trip.emplace_back(i, i, diag);
  }
  for (const auto& e : lay.edges) {
    const Scalar w = e.doubled ? -g2 : -g;
    trip.emplace_back(e.a, e.b, w);
    trip.emplace_back(e.b, e.a, w);
  }

  ReducedSystem<Scalar> sys;
  sys.params = params;
  sys.marked_index = lay.marked_index;
  sys.hamiltonian = Sparse<Scalar>(m, m);
  sys.hamiltonian.setFromTriplets(trip.begin(), trip.end());
  sys.hamiltonian.makeCompressed();

  // sqrt(2^e / (2^n - 1)) evaluated as 2^((e-n)/2) / sqrt(1 - 2^-n) so the
  // n = 64 instances stay exact in double precision.
  const double renorm = 1.0 / std::sqrt(1.0 - std::exp2(static_cast<double>(-params.n)));
  sys.initial_state.resize(m);
  sys.multiplicities.resize(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const int e = lay.sites[i].mult_log2;
    sys.multiplicities[static_cast<std::size_t>(i)] = std::uint64_t{1} << e;
    sys.initial_state[i] =
        static_cast<Scalar>(std::exp2(0.5 * (e - params.n)) * renorm);
  }
  return sys;
}

// Marked root: the chain diag(2*gamma - 1, 3*gamma, ..., 3*gamma, gamma) with
// every off-diagonal -sqrt(2)*gamma and orbit sizes (1, 2, 4, ...).  Built
// directly; must coincide with reduce_comb at l = 1.
template <typename Scalar = double>
ReducedSystem<Scalar> reduce_root_case(const TreeParams& params) {
  if (params.l != 1)
    throw std::invalid_argument("root-case reduction requires l = 1");
  if (params.n < 2) throw std::invalid_argument("root-case reduction requires n >= 2");
  params.validate();
  const int n = params.n;
  const Scalar g = static_cast<Scalar>(params.gamma);
  const Scalar g2 = static_cast<Scalar>(params.gamma * std::sqrt(2.0));

  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(static_cast<std::size_t>(3 * n));
  for (int j = 0; j < n; ++j) {
    Scalar diag = g * static_cast<Scalar>(j == 0 ? 2 : (j == n - 1 ? 1 : 3));
    if (j == 0) diag -= Scalar{1};
    trip.emplace_back(j, j, diag);
    if (j > 0) {
      trip.emplace_back(j - 1, j, -g2);
      trip.emplace_back(j, j - 1, -g2);
    }
  }

  ReducedSystem<Scalar> sys;
  sys.params = params;
  sys.marked_index = 0;
  sys.hamiltonian = Sparse<Scalar>(n, n);
  sys.hamiltonian.setFromTriplets(trip.begin(), trip.end());
  sys.hamiltonian.makeCompressed();
  const double renorm = 1.0 / std::sqrt(1.0 - std::exp2(static_cast<double>(-n)));
  sys.initial_state.resize(n);
  sys.multiplicities.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    sys.multiplicities[static_cast<std::size_t>(j)] = std::uint64_t{1} << j;
    sys.initial_state[j] = static_cast<Scalar>(std::exp2(0.5 * (j - n)) * renorm);
  }
  return sys;
}

// Explicit orbit partition, 0-based site indices per lumped site, ordered to
// match the comb layout.  Only available while the full system fits.
struct ReductionMap {
  std::vector<std::vector<Index>> groups;

  Index size() const { return static_cast<Index>(groups.size()); }
};

inline ReductionMap reduction_map(int n, int l) {
  if (n > kMaxFullDepth) throw std::invalid_argument("explicit orbit maps limited to depth <= 14");
  const CombLayout lay = comb_layout(n, l);
  std::map<std::pair<int, int>, Index> key_to_index;  // (distance to w, level)
  for (Index i = 0; i < lay.size(); ++i)
    key_to_index[{lay.sites[i].dist_to_marked, lay.sites[i].level}] = i;

  ReductionMap map;
  map.groups.resize(lay.sites.size());
  const std::uint64_t w = marked_site(l);
  const std::uint64_t N = tree_size(n);
  for (std::uint64_t k = 1; k <= N; ++k) {
    const auto it = key_to_index.find({tree_distance(k, w), site_level(k)});
    if (it == key_to_index.end())
      throw std::logic_error("site does not match any lumped orbit");
    map.groups[static_cast<std::size_t>(it->second)].push_back(static_cast<Index>(k) - 1);
  }
  for (Index i = 0; i < lay.size(); ++i) {
    const auto expect = std::uint64_t{1} << lay.sites[static_cast<std::size_t>(i)].mult_log2;
    if (map.groups[static_cast<std::size_t>(i)].size() != expect)
      throw std::logic_error("orbit size does not match the comb multiplicity");
  }
  return map;
}

// Row-orthonormal lumping matrix V (m x N) with entries 1/sqrt(orbit size).
template <typename Scalar = double>
Sparse<Scalar> lumping_matrix(const ReductionMap& map, Index full_size) {
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(static_cast<std::size_t>(full_size));
  for (Index i = 0; i < map.size(); ++i) {
    const auto& group = map.groups[static_cast<std::size_t>(i)];
    const Scalar w = Scalar{1} / std::sqrt(static_cast<Scalar>(group.size()));
    for (const Index j : group) trip.emplace_back(i, j, w);
  }
  Sparse<Scalar> V(map.size(), full_size);
  V.setFromTriplets(trip.begin(), trip.end());
  return V;
}

struct VerifyCheck {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass = false;

  std::string first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return c.name;
    return {};
  }
};

// Checks, in order: (a) V V^T = I, (b) V H V^T = H_reduced entrywise,
// (c) the Krylov vectors H^k psi(0) stay inside the lumped subspace,
// (d) every reduced eigenvalue appears in the full spectrum.
template <typename Scalar = double>
VerifyReport verify_reduction(const FullSystem<Scalar>& full, const ReductionMap& map,
                              const ReducedSystem<Scalar>& reduced, int krylov_depth = 8) {
  const Index N = full.size();
  const Index m = reduced.size();
  const Sparse<Scalar> V = lumping_matrix<Scalar>(map, N);
  VerifyReport report;

  {
    Matrix<Scalar> gram = Matrix<Scalar>(V * Sparse<Scalar>(V.transpose()));
    gram -= Matrix<Scalar>::Identity(m, m);
    const double dev = static_cast<double>(gram.cwiseAbs().maxCoeff());
    report.checks.push_back({"row-orthonormality", dev, 1e-12, dev <= 1e-12});
  }
  {
    const Sparse<Scalar> VH = V * full.hamiltonian;
    Matrix<Scalar> diff = Matrix<Scalar>(VH * Sparse<Scalar>(V.transpose())) - reduced.dense();
    const double dev = static_cast<double>(diff.cwiseAbs().maxCoeff());
    report.checks.push_back({"lumped-hamiltonian", dev, 1e-12, dev <= 1e-12});
  }
  {
    Vector<Scalar> u = uniform_state<Scalar>(N);
    double dev = 0.0;
    for (int k = 0; k <= krylov_depth; ++k) {
      const Vector<Scalar> proj = Sparse<Scalar>(V.transpose()) * (V * u);
      dev = std::max(dev, static_cast<double>((proj - u).cwiseAbs().maxCoeff()));
      u = full.hamiltonian * u;
      const Scalar norm = u.norm();
      if (norm > Scalar{0}) u /= norm;
    }
    report.checks.push_back({"krylov-invariance", dev, 1e-10, dev <= 1e-10});
  }
  {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> full_eig(full.dense_hamiltonian(),
                                                           Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> red_eig(reduced.dense(), Eigen::EigenvaluesOnly);
    const auto& lf = full_eig.eigenvalues();
    const auto& lr = red_eig.eigenvalues();
    double dev = 0.0;
    for (Index i = 0; i < lr.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < lf.size(); ++j)
        best = std::min(best, static_cast<double>(std::abs(lr[i] - lf[j])));
      dev = std::max(dev, best);
    }
    report.checks.push_back({"spectrum-containment", dev, 1e-8, dev <= 1e-8});
  }

  report.all_pass = true;
  for (const auto& c : report.checks) report.all_pass = report.all_pass && c.pass;
  return report;
}

}  // namespace qsearch
