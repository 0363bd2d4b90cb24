#pragma once

#include "gridlay/energy.hpp"
#include "gridlay/graph.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gridlay {

enum class InitStrategy { circular, spectral, random };

std::string to_string(InitStrategy s);
InitStrategy parse_init_strategy(const std::string& name);

struct LayoutConfig {
  double alpha = 1.25;   ///< separation threshold
  double lambda = 1000.0; ///< separation weight
  std::size_t max_iters_kk = 500;
  std::size_t max_iters_gpgl = 1000;
  double grad_tol = 1e-4;
  std::uint64_t seed = 0;
  InitStrategy init = InitStrategy::circular;
};

/// Throws InputError unless alpha > 0 and lambda >= 0.
void validate(const LayoutConfig& cfg);

struct ContinuousLayout {
  Coords coords;
  double energy = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  /// Set when a spectral initialization had to fall back to the circular one.
  bool fell_back = false;
};

struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct BoundingBox {
  int min_x = 0;
  int min_y = 0;
  int max_x = 0;
  int max_y = 0;

  int width() const noexcept { return max_x - min_x + 1; }
  int height() const noexcept { return max_y - min_y + 1; }
  int side() const noexcept { return std::max(width(), height()); }
};

/// Integer layout. `occupancy` lists the vertices in each occupied cell, ascending.
struct GridLayout {
  std::vector<Cell> cells;
  std::map<Cell, std::vector<int>> occupancy;
  std::size_t vertex_loss_count = 0; ///< n - number of distinct occupied cells
  BoundingBox bbox;

  std::size_t size() const noexcept { return cells.size(); }
};

/// Builds occupancy, loss count and bounding box from per-vertex cells.
GridLayout make_grid_layout(std::vector<Cell> cells);

/// Translates the bounding box minimum to (0, 0), then rounds half away from zero.
GridLayout round_layout(const Coords& coords);

/// Vertex order[k] sits at angle 2*pi*k/n on a circle of radius n/(2*pi).
Coords circular_layout(std::span<const int> order);

/// Seeded Fisher-Yates permutation of 0..n-1 (identical on every platform).
std::vector<int> shuffled_order(std::size_t n, std::uint64_t seed);

ContinuousLayout init_layout(const Graph& g, InitStrategy strategy, std::uint64_t seed);

struct GpglRun {
  ContinuousLayout initial;
  ContinuousLayout kk;          ///< stress-only minimum, the warm start
  double warm_start_energy = 0.0; ///< penalized energy at the warm start
  ContinuousLayout penalized;
  GridLayout grid;
};

/// distances -> stress minimization from the initial layout -> penalized minimization
/// warm-started there -> rounding.
GpglRun gpgl_run(const Graph& g, const LayoutConfig& cfg);
GridLayout gpgl(const Graph& g, const LayoutConfig& cfg);

enum class LossAveraging { per_graph, pooled };

/// Percentage of vertices lost to shared cells. per_graph averages each graph's ratio;
/// pooled divides total losses by total vertices.
double vertex_loss_ratio(std::span<const GridLayout> layouts, std::span<const Graph> graphs,
                         LossAveraging averaging = LossAveraging::per_graph);

/// `{"cells": [[x,y],...], "loss": k, "bbox": [min_x, min_y, max_x, max_y]}`
std::string grid_layout_to_json(const GridLayout& layout);
GridLayout grid_layout_from_json(const std::string& text);

} // namespace gridlay
