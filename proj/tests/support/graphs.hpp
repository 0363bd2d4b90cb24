#pragma once

// Graph generators and brute-force oracles shared by unit and acceptance tests.

#include "gridlay/graph.hpp"
#include "gridlay/partition.hpp"
#include "gridlay/rng.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace gridlay::testing {

inline Graph complete_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.push_back({static_cast<int>(i), static_cast<int>(j)});
  return Graph(n, e);
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({static_cast<int>(i), static_cast<int>(i + 1)});
  return Graph(n, e);
}

/// Random spanning tree plus `extra` random chords: always connected.
inline Graph random_connected_graph(std::size_t n, std::size_t extra, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> e;
  for (std::size_t i = 1; i < n; ++i) e.push_back({static_cast<int>(rng.below(i)), static_cast<int>(i)});
  for (std::size_t k = 0; k < extra; ++k) {
    const int a = static_cast<int>(rng.below(n));
    const int b = static_cast<int>(rng.below(n));
    if (a != b) e.push_back({std::min(a, b), std::max(a, b)});
  }
  return Graph(n, e);
}

/// Points uniform in the unit square joined when closer than `radius`.
inline Graph random_geometric_graph(std::size_t n, double radius, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform();
    y[i] = rng.uniform();
  }
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::hypot(x[i] - x[j], y[i] - y[j]) < radius) e.push_back({static_cast<int>(i), static_cast<int>(j)});
  return Graph(n, e);
}

/// Minimum normalized cut over all 2^(n-1) - 1 bipartitions.
inline double brute_force_min_ncut(const Graph& g, std::vector<int>* best_side = nullptr) {
  const std::size_t n = g.num_vertices();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned long mask = 1; mask < (1UL << (n - 1)); ++mask) {
    // Vertex n-1 always sits on side 0, so each bipartition is visited once.
    double cut = 0, vol_a = 0, vol_b = 0;
    for (const auto& e : g.edges()) {
      const bool a = (mask >> e.u) & 1UL;
      const bool b = (mask >> e.v) & 1UL;
      (a ? vol_a : vol_b) += 1;
      (b ? vol_a : vol_b) += 1;
      if (a != b) cut += 1;
    }
    double value = 0;
    if (vol_a > 0) value += cut / vol_a;
    if (vol_b > 0) value += cut / vol_b;
    if (value < best) {
      best = value;
      if (best_side) {
        best_side->clear();
        for (std::size_t v = 0; v < n; ++v)
          if ((mask >> v) & 1UL) best_side->push_back(static_cast<int>(v));
      }
    }
  }
  return best;
}

} // namespace gridlay::testing
