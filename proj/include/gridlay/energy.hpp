#pragma once

#include "gridlay/graph.hpp"

#include <Eigen/Core>

#include <span>

namespace gridlay {

/// n x 2 row-major vertex coordinates; row-major so the buffer doubles as the optimizer vector.
using Coords = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

/// Pairwise distances below this are clamped inside energies and gradients.
inline constexpr double kMinDistance = 1e-9;

// All sums run over unordered pairs i < j, i.e. half of the ordered-pair sum.

/// Stress energy  sum 1/2 (d_ij / s_ij - 1)^2.
double kk_energy(const Coords& x, const DistanceMatrix& s);

/// Hinge penalty  lambda * sum max(0, alpha / d_ij - 1).
double separation_penalty(const Coords& x, double alpha, double lambda);

/// Gradient of kk_energy + separation_penalty with respect to every coordinate.
/// A pair closer than kMinDistance is pushed apart along a fixed pseudo-random unit
/// direction derived from its indices.
Coords gpgl_gradient(const Coords& x, const DistanceMatrix& s, double alpha, double lambda);

/// Fused value and gradient over a flat [x0 y0 x1 y1 ...] buffer; `grad` is overwritten.
double gpgl_value_and_gradient(std::span<const double> x, const DistanceMatrix& s, double alpha, double lambda,
                               std::span<double> grad);

/// Deterministic unit direction used for the pair (i, j), i < j, when the points coincide.
Eigen::Vector2d coincident_direction(std::size_t i, std::size_t j);

} // namespace gridlay
