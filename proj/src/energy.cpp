#include "gridlay/energy.hpp"

#include "gridlay/error.hpp"

#include <cmath>
#include <numbers>

namespace gridlay {

namespace {

void check_sizes(std::size_t points, const DistanceMatrix& s) {
  if (points != s.size())
    throw InputError("layout has " + std::to_string(points) + " vertices but distance matrix has " +
                     std::to_string(s.size()));
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

Eigen::Vector2d coincident_direction(std::size_t i, std::size_t j) {
  const std::uint64_t h = splitmix64((static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(j));
  const double angle = static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi;
  return {std::cos(angle), std::sin(angle)};
}

double kk_energy(const Coords& x, const DistanceMatrix& s) {
  const auto n = static_cast<std::size_t>(x.rows());
  check_sizes(n, s);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::max((x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).norm(),
                                kMinDistance);
      const double r = d / s(i, j) - 1.0;
      total += 0.5 * r * r;
    }
  }
  return total;
}

double separation_penalty(const Coords& x, double alpha, double lambda) {
  const auto n = x.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = std::max((x.row(i) - x.row(j)).norm(), kMinDistance);
      if (d < alpha) total += alpha / d - 1.0;
    }
  }
  return lambda * total;
}

double gpgl_value_and_gradient(std::span<const double> x, const DistanceMatrix& s, double alpha, double lambda,
                               std::span<double> grad) {
  const std::size_t n = x.size() / 2;
  check_sizes(n, s);
  std::fill(grad.begin(), grad.end(), 0.0);
  const double* sv = s.values().data();
  const bool penalized = lambda > 0.0;
  double kk = 0.0;
  double sep = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[2 * i];
    const double yi = x[2 * i + 1];
    const double* srow = sv + i * n;
    double gxi = 0.0;
    double gyi = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double dx = xi - x[2 * j];
      double dy = yi - x[2 * j + 1];
      double d = std::sqrt(dx * dx + dy * dy);
      double ux = 0.0;
      double uy = 0.0;
      if (d < kMinDistance) {
        const Eigen::Vector2d u = coincident_direction(i, j);
        ux = u.x();
        uy = u.y();
        d = kMinDistance;
      } else {
        ux = dx / d;
        uy = dy / d;
      }
      const double inv_s = 1.0 / srow[j];
      const double r = d * inv_s - 1.0;
      kk += 0.5 * r * r;
      double coef = r * inv_s;
      if (penalized && d < alpha) {
        sep += alpha / d - 1.0;
        coef -= lambda * alpha / (d * d);
      }
      const double gx = coef * ux;
      const double gy = coef * uy;
      gxi += gx;
      gyi += gy;
      grad[2 * j] -= gx;
      grad[2 * j + 1] -= gy;
    }
    grad[2 * i] += gxi;
    grad[2 * i + 1] += gyi;
  }
  return kk + lambda * sep;
}

Coords gpgl_gradient(const Coords& x, const DistanceMatrix& s, double alpha, double lambda) {
  Coords g(x.rows(), 2);
  gpgl_value_and_gradient({x.data(), static_cast<std::size_t>(x.size())}, s, alpha, lambda,
                          {g.data(), static_cast<std::size_t>(g.size())});
  return g;
}

} // namespace gridlay
