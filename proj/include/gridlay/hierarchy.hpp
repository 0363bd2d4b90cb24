#pragma once

#include "gridlay/graph.hpp"
#include "gridlay/layout.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gridlay {

struct GridSize {
  int width = 16;
  int height = 16;

  friend bool operator==(const GridSize&, const GridSize&) = default;
};

struct HierarchyConfig {
  std::size_t fanout = 32;  ///< subgraphs per internal node
  GridSize parent_grid{};   ///< grid holding the connectivity graph of one internal node
  GridSize child_grid{};    ///< grid holding one leaf subgraph
  LayoutConfig layout{};
  /// Size slack handed to normalized_cut. Tighter than its default so that leaves stay
  /// close to n / fanout vertices and fit the child grid.
  double max_imbalance = 0.25;
};

/// Throws InputError unless fanout >= 2, both grids are non-empty and
/// fanout <= parent_grid.width * parent_grid.height.
void validate(const HierarchyConfig& cfg);

struct TreeNode {
  std::vector<int> vertices; ///< global vertex ids, ascending
  Cell placement;            ///< cell inside the parent's grid; (0, 0) for the root
  std::vector<TreeNode> children;
  /// Leaves: per-vertex cells inside the child grid, aligned with `vertices`.
  std::vector<Cell> leaf_cells;

  bool is_leaf() const noexcept { return children.empty(); }
};

struct PartitionTree {
  TreeNode root;
  std::size_t depth = 0; ///< internal levels on the deepest root-to-leaf path
  GridSize parent_grid{};
  GridSize child_grid{};
  std::size_t fanout = 0;

  /// Leaf index per vertex, leaves numbered in depth-first order.
  std::vector<int> leaf_of(std::size_t num_vertices) const;
  std::size_t leaf_count() const;
};

struct HierarchyTimings {
  double partition_ms = 0.0; ///< summed over all normalized_cut calls
  double layout_ms = 0.0;    ///< summed over all gpgl calls
};

struct HierarchicalLayout {
  GridLayout grid;   ///< global cells, one per vertex
  GridSize global{}; ///< child_grid * parent_grid^depth
  PartitionTree tree;
  HierarchyTimings timings;
};

/// Levels of recursion below a node with n vertices: round(log_fanout n), at least 1.
std::size_t hierarchy_levels(std::size_t n, std::size_t fanout);

/// Hierarchical layout. A node with round(log_N n) <= 1 is a leaf laid out by gpgl on the
/// child grid. Otherwise it is cut into N parts whose connectivity graph is laid out by gpgl
/// on the parent grid (coinciding parts move to the nearest free cell), and each part recurses.
///
/// Throws OverflowError naming the offending subgraph when a layout exceeds its grid.
HierarchicalLayout hgpgl(const Graph& g, const HierarchyConfig& cfg);

/// Absolute cell of a leaf vertex. `path[0]` is the cell inside the child grid, `path[m]`
/// for m >= 1 the placement at level m counted from the leaf upwards:
///   a = path[0] + sum_{m>=1} path[m] * s_c * s_p^(m-1).
/// Throws InputError when a placement lies outside its grid.
Cell fit_into_grid(std::span<const Cell> path, GridSize parent_grid, GridSize child_grid);

/// Global cells of every vertex in `tree`, and the global grid size.
GridLayout compose_layout(const PartitionTree& tree, GridSize* global = nullptr);

std::string partition_tree_to_json(const PartitionTree& tree);
PartitionTree partition_tree_from_json(const std::string& text);

} // namespace gridlay
