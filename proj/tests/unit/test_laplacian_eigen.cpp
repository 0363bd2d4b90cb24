#include "gridlay/error.hpp"
#include "gridlay/laplacian_eigen.hpp"
#include "gridlay/rng.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gridlay;

namespace {

Graph path(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({static_cast<int>(i), static_cast<int>(i + 1)});
  return Graph(n, e);
}

Graph random_connected(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> e;
  for (std::size_t i = 1; i < n; ++i) e.push_back({static_cast<int>(rng.below(i)), static_cast<int>(i)});
  for (std::size_t k = 0; k < n; ++k) {
    const int a = static_cast<int>(rng.below(n));
    const int b = static_cast<int>(rng.below(n));
    if (a != b) e.push_back({std::min(a, b), std::max(a, b)});
  }
  return Graph(n, e);
}

} // namespace

TEST_CASE("path Laplacian spectrum is 2 - 2 cos(pi k / n)") {
  for (std::size_t n : {10u, 80u, 200u}) {
    const Graph g = path(n);
    const auto pairs = smallest_eigenpairs(combinatorial_laplacian(g), component_indicator_basis(g), 3);
    REQUIRE(pairs.converged);
    for (int k = 1; k <= 3; ++k)
      CHECK(pairs.values(k - 1) ==
            doctest::Approx(2.0 - 2.0 * std::cos(std::numbers::pi * k / static_cast<double>(n))).epsilon(1e-7));
  }
}

TEST_CASE("iterative solver agrees with the dense oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = random_connected(150, seed);
    const SparseMatrix l = combinatorial_laplacian(g);
    const Eigen::MatrixXd nulls = component_indicator_basis(g);
    EigenOptions opts;
    opts.dense_cutoff = 0;
    const auto it = smallest_eigenpairs(l, nulls, 2, opts);
    const auto dense = smallest_eigenpairs_dense(l, nulls, 2);
    REQUIRE(it.converged);
    for (int k = 0; k < 2; ++k) {
      CHECK(it.values(k) == doctest::Approx(dense.values(k)).epsilon(1e-7));
      const Eigen::VectorXd v = it.vectors.col(k);
      CHECK((l * v - it.values(k) * v).norm() < 1e-7);
      CHECK(std::abs(v.dot(nulls.col(0))) < 1e-8);
    }
  }
}

TEST_CASE("normalized Laplacian has the scaled ones vector in its null space") {
  const Graph g = random_connected(40, 9);
  const SparseMatrix l = normalized_laplacian(g);
  Eigen::VectorXd v(40);
  for (int i = 0; i < 40; ++i) v(i) = std::sqrt(static_cast<double>(g.degree(i)));
  CHECK((l * v).norm() < 1e-12);
  CHECK_THROWS_AS(normalized_laplacian(Graph(3, {{0, 1}})), InputError);
}

TEST_CASE("component indicators are orthonormal") {
  const Graph g(5, {{0, 1}, {2, 3}});
  const Eigen::MatrixXd b = component_indicator_basis(g);
  CHECK(b.cols() == 3);
  CHECK((b.transpose() * b - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
  CHECK((Eigen::MatrixXd(combinatorial_laplacian(g)) * b).norm() < 1e-12);
}
