#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gridlay {

/// Undirected edge stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Row-major n x F matrix of per-vertex features. Zero columns means "no features".
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Simple undirected graph with optional vertex features and labels.
///
/// Edges are normalized to u < v, sorted and deduplicated on construction;
/// self-loops and out-of-range endpoints are rejected with InputError.
class Graph {
public:
  Graph() = default;
  explicit Graph(std::size_t num_vertices, std::vector<Edge> edges = {});

  std::size_t num_vertices() const noexcept { return num_vertices_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const int> neighbors(int v) const {
    return {adjacency_.data() + offsets_[static_cast<std::size_t>(v)],
            adjacency_.data() + offsets_[static_cast<std::size_t>(v) + 1]};
  }
  std::size_t degree(int v) const {
    return offsets_[static_cast<std::size_t>(v) + 1] - offsets_[static_cast<std::size_t>(v)];
  }
  std::size_t max_degree() const;
  bool has_edge(int u, int v) const;

  bool has_features() const noexcept { return features_.cols() > 0; }
  std::size_t feature_dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  const FeatureMatrix& features() const noexcept { return features_; }
  /// Requires one row per vertex and at least one column.
  void set_features(FeatureMatrix features);

  const std::optional<std::vector<int>>& labels() const noexcept { return labels_; }
  void set_labels(std::vector<int> labels);

  std::optional<int> graph_label() const noexcept { return graph_label_; }
  void set_graph_label(std::optional<int> label) noexcept { graph_label_ = label; }

  /// Subgraph induced by `vertices` (local index i <-> vertices[i]); features and labels follow.
  Graph induced_subgraph(std::span<const int> vertices) const;

private:
  std::size_t num_vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> adjacency_;
  FeatureMatrix features_;
  std::optional<std::vector<int>> labels_;
  std::optional<int> graph_label_;
};

/// All-pairs hop distances. Unreachable pairs hold `sentinel()`.
class DistanceMatrix {
public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t n, std::vector<double> values, double sentinel, bool connected);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * n_ + j]; }
  double sentinel() const noexcept { return sentinel_; }
  /// True when every pair is reachable (no sentinel entries).
  bool connected() const noexcept { return connected_; }
  std::span<const double> values() const noexcept { return values_; }

private:
  std::size_t n_ = 0;
  std::vector<double> values_;
  double sentinel_ = 0.0;
  bool connected_ = true;
};

/// BFS from every source. Unreachable pairs are set to 2 x (largest finite distance),
/// with the largest finite distance taken as at least 1.
DistanceMatrix shortest_path_distances(const Graph& g);

/// Maximal connected vertex sets, each ascending, ordered by smallest member.
std::vector<std::vector<int>> connected_components(const Graph& g);

// Text and JSON formats.

/// `{"n": int, "edges": [[i,j],...], "features": [[...],...]?, "labels": [...]?, "graph_label": int?}`
Graph graph_from_json(const std::string& text);
std::string graph_to_json(const Graph& g);

/// One "u v" pair per line, 0-based, '#' starts a comment. A "# n=<count>" comment
/// fixes the vertex count (otherwise max index + 1).
Graph graph_from_edge_list(const std::string& text);

/// Loads .json as JSON graph, anything else as edge list.
Graph load_graph_file(const std::string& path);

} // namespace gridlay
