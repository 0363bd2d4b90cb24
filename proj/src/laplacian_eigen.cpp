#include "gridlay/laplacian_eigen.hpp"

#include "gridlay/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace gridlay {

namespace {

void deflate(Eigen::MatrixXd& x, const Eigen::MatrixXd& null_basis) {
  if (null_basis.cols() > 0) x -= null_basis * (null_basis.transpose() * x);
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& x) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  return qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
}

} // namespace

SparseMatrix combinatorial_laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(g.num_edges() * 2 + g.num_vertices());
  for (const auto& e : g.edges()) {
    t.emplace_back(e.u, e.v, -1.0);
    t.emplace_back(e.v, e.u, -1.0);
  }
  for (Eigen::Index i = 0; i < n; ++i) t.emplace_back(i, i, static_cast<double>(g.degree(static_cast<int>(i))));
  SparseMatrix l(n, n);
  l.setFromTriplets(t.begin(), t.end());
  return l;
}

SparseMatrix normalized_laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  std::vector<double> inv_sqrt(g.num_vertices());
  for (std::size_t i = 0; i < g.num_vertices(); ++i) {
    const auto d = g.degree(static_cast<int>(i));
    if (d == 0) throw InputError("normalized Laplacian undefined: vertex " + std::to_string(i) + " has degree 0");
    inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(d));
  }
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(g.num_edges() * 2 + g.num_vertices());
  for (const auto& e : g.edges()) {
    const double w = -inv_sqrt[static_cast<std::size_t>(e.u)] * inv_sqrt[static_cast<std::size_t>(e.v)];
    t.emplace_back(e.u, e.v, w);
    t.emplace_back(e.v, e.u, w);
  }
  for (Eigen::Index i = 0; i < n; ++i) t.emplace_back(i, i, 1.0);
  SparseMatrix l(n, n);
  l.setFromTriplets(t.begin(), t.end());
  return l;
}

Eigen::MatrixXd component_indicator_basis(const Graph& g) {
  const auto comps = connected_components(g);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.num_vertices()),
                                                static_cast<Eigen::Index>(comps.size()));
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const double v = 1.0 / std::sqrt(static_cast<double>(comps[c].size()));
    for (int i : comps[c]) basis(i, static_cast<Eigen::Index>(c)) = v;
  }
  return basis;
}

EigenPairs smallest_eigenpairs_dense(const SparseMatrix& laplacian, const Eigen::MatrixXd& null_basis,
                                     std::size_t count) {
  const Eigen::Index n = laplacian.rows();
  const Eigen::Index nulls = null_basis.cols();
  const Eigen::Index available = n - nulls;
  if (static_cast<Eigen::Index>(count) > available)
    throw InputError("requested " + std::to_string(count) + " eigenpairs but only " +
                     std::to_string(available) + " remain after deflation");

  Eigen::MatrixXd complement;
  if (nulls > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(null_basis);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    complement = q.rightCols(available);
  } else {
    complement = Eigen::MatrixXd::Identity(n, n);
  }
  const Eigen::MatrixXd dense = Eigen::MatrixXd(laplacian);
  const Eigen::MatrixXd projected = complement.transpose() * dense * complement;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(projected);
  EigenPairs out;
  const auto k = static_cast<Eigen::Index>(count);
  out.values = solver.eigenvalues().head(k);
  out.vectors = complement * solver.eigenvectors().leftCols(k);
  out.converged = solver.info() == Eigen::Success;
  out.iterations = 1;
  return out;
}

EigenPairs smallest_eigenpairs(const SparseMatrix& laplacian, const Eigen::MatrixXd& null_basis,
                               std::size_t count, const EigenOptions& options) {
  const Eigen::Index n = laplacian.rows();
  const Eigen::Index available = n - null_basis.cols();
  const auto k = static_cast<Eigen::Index>(count);
  if (k < 1 || k > available)
    throw InputError("requested " + std::to_string(count) + " eigenpairs but only " +
                     std::to_string(available) + " remain after deflation");

  const Eigen::Index block = std::min<Eigen::Index>(available, std::max<Eigen::Index>(2 * k, k + 4));
  if (static_cast<std::size_t>(n) <= options.dense_cutoff || block >= available)
    return smallest_eigenpairs_dense(laplacian, null_basis, count);

  const double mean_diag = laplacian.diagonal().mean();
  const double shift = 1e-6 * std::max(mean_diag, 1e-12);
  SparseMatrix shifted = laplacian;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
  if (factor.info() != Eigen::Success) throw SolverError("LDL^T factorization of shifted Laplacian failed", 0);

  std::mt19937_64 rng(options.seed);
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  deflate(x, null_basis);
  x = orthonormalize(x);

  EigenPairs out;
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXd y = factor.solve(x);
    deflate(y, null_basis);
    const Eigen::MatrixXd q = orthonormalize(y);
    const Eigen::MatrixXd lq = laplacian * q;
    Eigen::MatrixXd h = q.transpose() * lq;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(h);
    x = q * rr.eigenvectors();
    const Eigen::MatrixXd lx = lq * rr.eigenvectors();

    double worst = 0.0;
    for (Eigen::Index j = 0; j < k; ++j)
      worst = std::max(worst, (lx.col(j) - rr.eigenvalues()(j) * x.col(j)).norm());
    if (!std::isfinite(worst)) throw SolverError("non-finite residual in inverse subspace iteration", it);

    out.iterations = it;
    out.values = rr.eigenvalues().head(k);
    out.vectors = x.leftCols(k);
    if (worst <= options.tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

} // namespace gridlay
