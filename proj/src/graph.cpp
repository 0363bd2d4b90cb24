#include "gridlay/graph.hpp"

#include "gridlay/error.hpp"
#include "gridlay/parallel.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace gridlay {

Graph::Graph(std::size_t num_vertices, std::vector<Edge> edges) : num_vertices_(num_vertices) {
  const auto n = static_cast<long long>(num_vertices);
  for (auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
      throw InputError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       ") has an endpoint outside [0, " + std::to_string(num_vertices) + ")");
    if (e.u == e.v) throw InputError("self-loop at vertex " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  std::vector<std::size_t> deg(num_vertices_, 0);
  for (const auto& e : edges_) {
    ++deg[static_cast<std::size_t>(e.u)];
    ++deg[static_cast<std::size_t>(e.v)];
  }
  offsets_.assign(num_vertices_ + 1, 0);
  for (std::size_t i = 0; i < num_vertices_; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  adjacency_.assign(offsets_.back(), 0);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacency_[fill[static_cast<std::size_t>(e.u)]++] = e.v;
    adjacency_[fill[static_cast<std::size_t>(e.v)]++] = e.u;
  }
  for (std::size_t i = 0; i < num_vertices_; ++i)
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < num_vertices_; ++i) best = std::max(best, offsets_[i + 1] - offsets_[i]);
  return best;
}

bool Graph::has_edge(int u, int v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

void Graph::set_features(FeatureMatrix features) {
  if (static_cast<std::size_t>(features.rows()) != num_vertices_)
    throw InputError("feature matrix has " + std::to_string(features.rows()) + " rows for " +
                     std::to_string(num_vertices_) + " vertices");
  if (features.cols() < 1 && num_vertices_ > 0) throw InputError("feature dimension must be >= 1");
  features_ = std::move(features);
}

void Graph::set_labels(std::vector<int> labels) {
  if (labels.size() != num_vertices_)
    throw InputError("label vector has " + std::to_string(labels.size()) + " entries for " +
                     std::to_string(num_vertices_) + " vertices");
  labels_ = std::move(labels);
}

Graph Graph::induced_subgraph(std::span<const int> vertices) const {
  std::vector<int> local(num_vertices_, -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const int v = vertices[i];
    if (v < 0 || static_cast<std::size_t>(v) >= num_vertices_ || local[static_cast<std::size_t>(v)] != -1)
      throw InputError("induced_subgraph: invalid or repeated vertex " + std::to_string(v));
    local[static_cast<std::size_t>(v)] = static_cast<int>(i);
  }
  std::vector<Edge> sub_edges;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (int w : neighbors(vertices[i])) {
      const int j = local[static_cast<std::size_t>(w)];
      if (j > static_cast<int>(i)) sub_edges.push_back({static_cast<int>(i), j});
    }
  }
  Graph sub(vertices.size(), std::move(sub_edges));
  if (has_features()) {
    FeatureMatrix f(static_cast<Eigen::Index>(vertices.size()), features_.cols());
    for (std::size_t i = 0; i < vertices.size(); ++i) f.row(static_cast<Eigen::Index>(i)) = features_.row(vertices[i]);
    if (!vertices.empty()) sub.set_features(std::move(f));
  }
  if (labels_) {
    std::vector<int> l(vertices.size());
    for (std::size_t i = 0; i < vertices.size(); ++i) l[i] = (*labels_)[static_cast<std::size_t>(vertices[i])];
    sub.set_labels(std::move(l));
  }
  sub.set_graph_label(graph_label_);
  return sub;
}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> values, double sentinel, bool connected)
    : n_(n), values_(std::move(values)), sentinel_(sentinel), connected_(connected) {
  if (values_.size() != n_ * n_) throw InputError("distance matrix size mismatch");
}

DistanceMatrix shortest_path_distances(const Graph& g) {
  const std::size_t n = g.num_vertices();
  constexpr int kUnreached = -1;
  std::vector<int> hops(n * n, kUnreached);

  parallel_for(n, [&](std::size_t src) {
    int* row = hops.data() + src * n;
    std::deque<int> queue{static_cast<int>(src)};
    row[src] = 0;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int w : g.neighbors(v)) {
        if (row[w] == kUnreached) {
          row[w] = row[v] + 1;
          queue.push_back(w);
        }
      }
    }
  });

  int largest = 0;
  bool connected = true;
  for (int h : hops) {
    if (h == kUnreached)
      connected = false;
    else
      largest = std::max(largest, h);
  }
  const double sentinel = 2.0 * std::max(largest, 1);
  std::vector<double> values(n * n);
  for (std::size_t k = 0; k < hops.size(); ++k)
    values[k] = hops[k] == kUnreached ? sentinel : static_cast<double>(hops[k]);
  return DistanceMatrix(n, std::move(values), sentinel, connected);
}

std::vector<std::vector<int>> connected_components(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<int>> comps;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<int> comp{static_cast<int>(s)};
    seen[s] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (int w : g.neighbors(comp[head])) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          comp.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

} // namespace gridlay
