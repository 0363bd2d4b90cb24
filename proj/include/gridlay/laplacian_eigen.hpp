#pragma once

#include "gridlay/graph.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <span>

namespace gridlay {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Combinatorial Laplacian D - W.
SparseMatrix combinatorial_laplacian(const Graph& g);

/// Symmetric normalized Laplacian I - D^-1/2 W D^-1/2. Requires every vertex to have degree >= 1.
SparseMatrix normalized_laplacian(const Graph& g);

struct EigenOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 5000;
  std::uint64_t seed = 0x5eed;
  /// Problems up to this size are solved densely.
  std::size_t dense_cutoff = 64;
};

struct EigenPairs {
  Eigen::VectorXd values;  ///< ascending
  Eigen::MatrixXd vectors; ///< one unit column per value
  bool converged = false;
  std::size_t iterations = 0;
};

/// The `count` smallest eigenpairs of the symmetric positive semi-definite `laplacian`
/// restricted to the orthogonal complement of `null_basis` (orthonormal columns).
///
/// Shifted inverse subspace iteration: one sparse LDL^T factorization of L + sigma*I,
/// block solves, deflation against `null_basis`, and Rayleigh-Ritz on the block. Converged
/// when every requested pair has residual ||Lx - theta x|| <= tolerance.
EigenPairs smallest_eigenpairs(const SparseMatrix& laplacian, const Eigen::MatrixXd& null_basis,
                               std::size_t count, const EigenOptions& options = {});

/// Same restriction, solved with a dense symmetric eigendecomposition.
EigenPairs smallest_eigenpairs_dense(const SparseMatrix& laplacian, const Eigen::MatrixXd& null_basis,
                                     std::size_t count);

/// Orthonormal null basis of D - W: one normalized indicator per connected component.
Eigen::MatrixXd component_indicator_basis(const Graph& g);

} // namespace gridlay
