#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qsearch/reduction.hpp"

#include <cmath>
#include <cstdint>

using namespace qsearch;

namespace {

// Oracle: lump the explicitly built full system through the orbit map and
// compare against the directly assembled comb.
double lumping_deviation(int n, int l, double gamma) {
  const TreeParams params{n, l, gamma};
  const FullSystem<double> full = build_full_hamiltonian<double>(params);
  const ReductionMap map = reduction_map(n, l);
  const Sparse<double> V = lumping_matrix<double>(map, full.size());
  const Matrix<double> lumped = Matrix<double>(V * full.hamiltonian * V.transpose());
  const ReducedSystem<double> comb = reduce_comb<double>(params);
  return (lumped - comb.dense()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("comb Hamiltonian equals the lumped full Hamiltonian") {
  for (int n = 2; n <= 8; ++n)
    for (int l = 1; l <= n; ++l)
      for (const double gamma : {2.0 / 3.0, 1.7}) {
        CAPTURE(n);
        CAPTURE(l);
        CAPTURE(gamma);
        CHECK(lumping_deviation(n, l, gamma) <= 1e-13);
      }
}

TEST_CASE("comb initial state is the lumped uniform state") {
  for (const auto& [n, l] : {std::pair{6, 3}, {9, 1}, {9, 9}, {10, 5}}) {
    const ReductionMap map = reduction_map(n, l);
    const Sparse<double> V = lumping_matrix<double>(map, static_cast<Index>(tree_size(n)));
    const Vector<double> lumped = V * uniform_state<double>(static_cast<Index>(tree_size(n)));
    const ReducedSystem<double> comb = reduce_comb<double>(TreeParams{n, l, 1.0});
    CHECK((lumped - comb.initial_state).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("comb size follows the chain bookkeeping") {
  // backbone l, one side chain of length n-k per ancestor level k < l,
  // one descendant chain of length n-l
  CHECK(comb_size(1, 1) == 1);
  CHECK(comb_size(6, 1) == 6);
  CHECK(comb_size(64, 32) == 1552);
  for (int n = 1; n <= 12; ++n)
    for (int l = 1; l <= n; ++l) {
      Index expect = l + (n - l);
      for (int k = 1; k < l; ++k) expect += n - k;
      CHECK(comb_size(n, l) == expect);
      CHECK(comb_layout(n, l).size() == expect);
      CHECK(reduce_comb<double>(TreeParams{n, l, 1.0}).size() == expect);
    }
}

TEST_CASE("orbit map covers every site exactly once") {
  for (const auto& [n, l] : {std::pair{5, 2}, {8, 4}, {10, 10}}) {
    const ReductionMap map = reduction_map(n, l);
    CHECK(map.size() == comb_size(n, l));
    std::uint64_t covered = 0;
    for (const auto& group : map.groups) covered += group.size();
    CHECK(covered == tree_size(n));
    const CombLayout layout = comb_layout(n, l);
    for (Index i = 0; i < layout.size(); ++i)
      CHECK(map.groups[static_cast<std::size_t>(i)].size() ==
            (std::uint64_t{1} << layout.sites[static_cast<std::size_t>(i)].mult_log2));
  }
}

TEST_CASE("multiplicities sum to the tree size") {
  for (const auto& [n, l] : {std::pair{10, 5}, {30, 7}, {64, 32}, {64, 1}, {64, 64}}) {
    const ReducedSystem<double> comb = reduce_comb<double>(TreeParams{n, l, 0.5});
    std::uint64_t total = 0;
    for (const std::uint64_t m : comb.multiplicities) total += m;
    CHECK(total == tree_size(n));
    CHECK(comb.initial_state.norm() == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("marked row carries the oracle shift") {
  const ReducedSystem<double> comb = reduce_comb<double>(TreeParams{7, 3, 0.8});
  const Matrix<double> H = comb.dense();
  const CombLayout layout = comb_layout(7, 3);
  CHECK(layout.sites[static_cast<std::size_t>(comb.marked_index)].dist_to_marked == 0);
  CHECK(layout.sites[static_cast<std::size_t>(comb.marked_index)].level == 3);
  for (Index i = 0; i < comb.size(); ++i) {
    const CombSite& site = layout.sites[static_cast<std::size_t>(i)];
    const double expect = 0.8 * level_degree(7, site.level) - (i == comb.marked_index ? 1.0 : 0.0);
    CHECK(H(i, i) == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("chain couplings are plain or doubled by construction") {
  const double gamma = 1.3;
  const CombLayout layout = comb_layout(6, 4);
  const Matrix<double> H = reduce_comb<double>(TreeParams{6, 4, gamma}).dense();
  for (const auto& edge : layout.edges) {
    const double expect = edge.doubled ? -std::sqrt(2.0) * gamma : -gamma;
    CHECK(H(edge.a, edge.b) == doctest::Approx(expect).epsilon(1e-15));
    CHECK(H(edge.b, edge.a) == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("root-case chain is the comb at level one") {
  for (const int n : {2, 5, 9, 14}) {
    const TreeParams params{n, 1, 0.9};
    const ReducedSystem<double> chain = reduce_root_case<double>(params);
    const ReducedSystem<double> comb = reduce_comb<double>(params);
    CHECK((chain.dense() - comb.dense()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((chain.initial_state - comb.initial_state).cwiseAbs().maxCoeff() == 0.0);
    CHECK(chain.multiplicities == comb.multiplicities);
    CHECK(chain.marked_index == 0);
  }
}

TEST_CASE("root-case chain has the documented tridiagonal form") {
  const int n = 6;
  const double gamma = 0.75;
  const Matrix<double> H = reduce_root_case<double>(TreeParams{n, 1, gamma}).dense();
  for (int j = 0; j < n; ++j) {
    const double diag = gamma * (j == 0 ? 2.0 : j == n - 1 ? 1.0 : 3.0) - (j == 0 ? 1.0 : 0.0);
    CHECK(H(j, j) == doctest::Approx(diag).epsilon(1e-15));
    if (j + 1 < n) CHECK(H(j, j + 1) == doctest::Approx(-std::sqrt(2.0) * gamma).epsilon(1e-15));
  }
  const ReducedSystem<double> chain = reduce_root_case<double>(TreeParams{n, 1, gamma});
  for (int j = 0; j < n; ++j)
    CHECK(chain.multiplicities[static_cast<std::size_t>(j)] == std::uint64_t{1} << j);
}

TEST_CASE("root-case constructor rejects other levels") {
  CHECK_THROWS_WITH_AS(reduce_root_case<double>(TreeParams{6, 2, 1.0}),
                       "root-case reduction requires l = 1", std::invalid_argument);
  CHECK_THROWS_AS(reduce_root_case<double>(TreeParams{1, 1, 1.0}), std::invalid_argument);
}

TEST_CASE("verification passes on faithful reductions") {
  for (const auto& [n, l] : {std::pair{6, 3}, {8, 1}, {8, 8}, {10, 5}}) {
    const TreeParams params{n, l, 2.0 / 3.0};
    const VerifyReport report = verify_reduction(
        build_full_hamiltonian<double>(params), reduction_map(n, l), reduce_comb<double>(params));
    CAPTURE(n);
    CAPTURE(l);
    CHECK(report.all_pass);
    REQUIRE(report.checks.size() == 4);
    CHECK(report.checks[0].name == "row-orthonormality");
    CHECK(report.checks[1].name == "lumped-hamiltonian");
    CHECK(report.checks[2].name == "krylov-invariance");
    CHECK(report.checks[3].name == "spectrum-containment");
    for (const VerifyCheck& check : report.checks) CHECK(check.deviation <= check.tolerance);
  }
}

TEST_CASE("verification flags a corrupted reduced Hamiltonian") {
  const TreeParams params{6, 3, 1.0};
  ReducedSystem<double> comb = reduce_comb<double>(params);
  comb.hamiltonian.coeffRef(1, 2) += 1e-6;
  comb.hamiltonian.coeffRef(2, 1) += 1e-6;
  const VerifyReport report =
      verify_reduction(build_full_hamiltonian<double>(params), reduction_map(6, 3), comb);
  CHECK(!report.all_pass);
  CHECK(report.first_failure() == "lumped-hamiltonian");
}

TEST_CASE("orbit map is guarded against huge depths") {
  CHECK_THROWS_AS(reduction_map(15, 3), std::invalid_argument);
}
