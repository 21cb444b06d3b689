#pragma once

// Balanced binary tree primitives: heap-indexed adjacency, graph Laplacian,
// search Hamiltonian H = gamma*L - |w><w|, and tree distances.
//
// Sites carry 1-based heap keys (children of key k are 2k and 2k+1, root is
// key 1); matrix and vector storage is 0-based, site k stored at index k-1.
// The level of a site is 1-based as well: the root sits on level 1, leaves
// on level n.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace qsearch {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Sparse = Eigen::SparseMatrix<Scalar>;

// Explicit N x N systems are verification oracles only; larger instances
// exist exclusively through the lumped reductions.
inline constexpr int kMaxFullDepth = 14;

struct TreeParams {
  int n = 1;           // tree depth, N = 2^n - 1 sites
  int l = 1;           // marked level, 1 <= l <= n
  double gamma = 1.0;  // search coupling, >= 0

  void validate() const {
    if (n < 1 || n > 64) throw std::invalid_argument("tree depth must be in [1, 64]");
    if (l < 1 || l > n) throw std::invalid_argument("marked level must satisfy 1 <= l <= n");
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  }
};

inline std::uint64_t tree_size(int n) {
  if (n < 1 || n > 64) throw std::invalid_argument("tree depth must be in [1, 64]");
  return (n == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

// log2(N+1) sites as a double, exact up to rounding of 2^n - 1.
inline double tree_size_d(int n) { return std::exp2(static_cast<double>(n)) - 1.0; }

// ln(2^n - 1) without forming 2^n, stable for n up to 64.
inline double log_tree_size(int n) {
  return n * std::numbers::ln2 + std::log1p(-std::exp2(static_cast<double>(-n)));
}

inline int site_level(std::uint64_t key) {
  if (key == 0) throw std::invalid_argument("heap keys are 1-based");
  return std::bit_width(key);
}

// Canonical marked site on level l: the leftmost one, key 2^(l-1).
inline std::uint64_t marked_site(int l) { return std::uint64_t{1} << (l - 1); }

inline int site_degree(int n, std::uint64_t key) {
  const int lev = site_level(key);
  if (lev > n) throw std::invalid_argument("site below leaf level");
  if (n == 1) return 0;
  if (lev == n) return 1;
  return (key == 1) ? 2 : 3;
}

// Degree of any site on a given level (all sites of a level share it).
inline int level_degree(int n, int level) {
  if (level < 1 || level > n) throw std::invalid_argument("level out of range");
  if (n == 1) return 0;
  if (level == n) return 1;
  return (level == 1) ? 2 : 3;
}

// Path length between heap keys a and b (tree paths are unique).
inline int tree_distance(std::uint64_t a, std::uint64_t b) {
  int la = site_level(a), lb = site_level(b);
  int d = 0;
  while (la > lb) { a >>= 1; --la; ++d; }
  while (lb > la) { b >>= 1; --lb; ++d; }
  while (a != b) { a >>= 1; b >>= 1; d += 2; }
  return d;
}

// BFS distances from a 0-based site index over the implicit adjacency.
inline Eigen::VectorXi bfs_distances(int n, Index site) {
  if (n < 1 || n > 24) throw std::invalid_argument("BFS limited to depth <= 24");
  const Index N = static_cast<Index>(tree_size(n));
  if (site < 0 || site >= N) throw std::out_of_range("site index out of range");
  Eigen::VectorXi dist = Eigen::VectorXi::Constant(N, -1);
  std::vector<Index> queue;
  queue.reserve(static_cast<std::size_t>(N));
  queue.push_back(site);
  dist[site] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const Index idx = queue[h];
    const std::uint64_t k = static_cast<std::uint64_t>(idx) + 1;
    const int dk = dist[idx];
    const auto visit = [&](std::uint64_t j) {
      const Index v = static_cast<Index>(j) - 1;
      if (dist[v] < 0) {
        dist[v] = dk + 1;
        queue.push_back(v);
      }
    };
    if (k > 1) visit(k >> 1);
    if (2 * k <= static_cast<std::uint64_t>(N)) visit(2 * k);
    if (2 * k + 1 <= static_cast<std::uint64_t>(N)) visit(2 * k + 1);
  }
  return dist;
}

template <typename Scalar = double>
Sparse<Scalar> build_laplacian(int n) {
  if (n < 1) throw std::invalid_argument("tree depth must be >= 1");
  if (n > kMaxFullDepth) throw std::invalid_argument("explicit systems limited to depth <= 14");
  const Index N = static_cast<Index>(tree_size(n));
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(static_cast<std::size_t>(3 * N));
  for (Index i = 0; i < N; ++i)
    trip.emplace_back(i, i, static_cast<Scalar>(site_degree(n, static_cast<std::uint64_t>(i) + 1)));
  for (std::uint64_t k = 2; k <= static_cast<std::uint64_t>(N); ++k) {
    const Index child = static_cast<Index>(k) - 1;
    const Index parent = static_cast<Index>(k >> 1) - 1;
    trip.emplace_back(child, parent, Scalar{-1});
    trip.emplace_back(parent, child, Scalar{-1});
  }
  Sparse<Scalar> L(N, N);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

template <typename Scalar = double>
struct FullSystem {
  TreeParams params;
  Sparse<Scalar> laplacian;
  Sparse<Scalar> hamiltonian;
  Index marked = 0;  // 0-based storage index of |w>

  Index size() const { return hamiltonian.rows(); }
  Matrix<Scalar> dense_hamiltonian() const { return Matrix<Scalar>(hamiltonian); }
};

// H = gamma*L - |w><w| with an explicit marked heap key (must sit on level l).
template <typename Scalar = double>
FullSystem<Scalar> build_full_hamiltonian(const TreeParams& params, std::uint64_t marked_key) {
  params.validate();
  if (params.n > kMaxFullDepth) throw std::invalid_argument("explicit systems limited to depth <= 14");
  if (marked_key < 1 || marked_key > tree_size(params.n))
    throw std::out_of_range("marked site out of range");
  if (site_level(marked_key) != params.l)
    throw std::invalid_argument("marked site is not on the marked level");
  FullSystem<Scalar> sys;
  sys.params = params;
  sys.laplacian = build_laplacian<Scalar>(params.n);
  sys.hamiltonian = sys.laplacian * static_cast<Scalar>(params.gamma);
  sys.marked = static_cast<Index>(marked_key) - 1;
  sys.hamiltonian.coeffRef(sys.marked, sys.marked) -= Scalar{1};
  sys.hamiltonian.makeCompressed();
  return sys;
}

// Canonical representative: the leftmost site of the marked level.
template <typename Scalar = double>
FullSystem<Scalar> build_full_hamiltonian(const TreeParams& params) {
  return build_full_hamiltonian<Scalar>(params, marked_site(params.l));
}

template <typename Scalar = double>
Vector<Scalar> uniform_state(Index size) {
  if (size < 1) throw std::invalid_argument("state size must be >= 1");
  using std::sqrt;
  return Vector<Scalar>::Constant(size, Scalar{1} / sqrt(static_cast<Scalar>(size)));
}

// Edge list as `src,dst` CSV, 1-based heap keys, one row per tree edge.
inline void write_edge_list(int n, std::ostream& os) {
  if (n < 1 || n > kMaxFullDepth) throw std::invalid_argument("edge list limited to depth <= 14");
  os << "src,dst\n";
  const std::uint64_t N = tree_size(n);
  for (std::uint64_t k = 2; k <= N; ++k) os << (k >> 1) << ',' << k << '\n';
}

}  // namespace qsearch
