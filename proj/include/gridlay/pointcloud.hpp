#pragma once

#include "gridlay/graph.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gridlay {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

struct PointCloud {
  PointMatrix points;
  std::optional<std::vector<int>> labels; ///< per-point part category

  std::size_t size() const noexcept { return static_cast<std::size_t>(points.rows()); }
};

/// Whitespace-separated "x y z [label]" lines; blank lines and '#' comments are skipped.
/// Either every line has a label or none does. Throws InputError naming the line.
PointCloud parse_xyz(const std::string& text);
PointCloud load_xyz(const std::string& path);

/// Binary format: uint64 n (little-endian), n x 3 float32, then optionally n int32 labels.
PointCloud load_point_binary(const std::string& path);
void save_point_binary(const std::string& path, const PointCloud& pc);

/// Binary for ".bin", xyz text otherwise.
PointCloud load_point_cloud(const std::string& path);

/// Centers the bounding box at the origin and scales its diagonal to 1. Clouds whose
/// points all coincide are only centered.
PointCloud normalized(const PointCloud& pc);

/// Uniform points in the unit cube.
PointCloud random_point_cloud(std::size_t n, std::uint64_t seed);

/// Symmetrized k-nearest-neighbor graph; equal distances prefer the lower index. The
/// normalized coordinates become the vertex features and labels are carried over.
Graph knn_graph(const PointCloud& pc, std::size_t k);

struct Triangulation {
  Graph graph;
  /// Finite cells: tetrahedra, or triangles (with -1 in the last slot) after the planar fallback.
  std::vector<std::array<int, 4>> cells;
  bool planar_fallback = false; ///< all points were coplanar; 2D triangulation on the best-fit plane
  bool collinear = false;       ///< all points on a line; the graph is the path along it
  bool bridged = false;         ///< predicate failures left several components which were joined
};

/// Delaunay tetrahedralization of the normalized cloud (incremental Bowyer-Watson).
/// Fewer than 4 points give the complete graph.
Triangulation delaunay_triangulation(const PointCloud& pc);

/// 1-skeleton of delaunay_triangulation with normalized coordinates as features.
Graph delaunay_graph(const PointCloud& pc);

} // namespace gridlay
