#include "gridlay/tu_dataset.hpp"

#include "gridlay/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gridlay {

namespace fs = std::filesystem;

namespace {

std::vector<std::vector<long long>> read_rows(const fs::path& file, std::size_t columns) {
  std::ifstream in(file);
  if (!in) throw InputError("missing dataset file: " + file.string());
  std::vector<std::vector<long long>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<long long> row;
    long long v = 0;
    while (fields >> v) row.push_back(v);
    if (row.empty()) continue;
    if (row.size() < columns)
      throw InputError(file.filename().string() + " line " + std::to_string(line_no) + ": expected " +
                       std::to_string(columns) + " values");
    row.resize(columns);
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace

std::vector<Graph> load_tu_dataset(const fs::path& dir, const std::string& name) {
  const auto file = [&](const std::string& suffix) { return dir / (name + "_" + suffix + ".txt"); };

  const auto indicator_rows = read_rows(file("graph_indicator"), 1);
  const auto graph_label_rows = read_rows(file("graph_labels"), 1);
  const auto adjacency_rows = read_rows(file("A"), 2);
  std::vector<std::vector<long long>> node_label_rows;
  const bool has_node_labels = fs::exists(file("node_labels"));
  if (has_node_labels) node_label_rows = read_rows(file("node_labels"), 1);

  const std::size_t total_nodes = indicator_rows.size();
  const std::size_t num_graphs = graph_label_rows.size();
  if (has_node_labels && node_label_rows.size() != total_nodes)
    throw InputError(file("node_labels").filename().string() + ": " + std::to_string(node_label_rows.size()) +
                     " rows for " + std::to_string(total_nodes) + " nodes");

  // Global node id (0-based) -> (graph index, local index).
  std::vector<std::size_t> graph_of(total_nodes);
  std::vector<int> local_of(total_nodes);
  std::vector<std::size_t> sizes(num_graphs, 0);
  for (std::size_t i = 0; i < total_nodes; ++i) {
    const long long gid = indicator_rows[i][0];
    if (gid < 1 || static_cast<std::size_t>(gid) > num_graphs)
      throw InputError(file("graph_indicator").filename().string() + " line " + std::to_string(i + 1) +
                       ": graph id " + std::to_string(gid) + " out of range");
    graph_of[i] = static_cast<std::size_t>(gid - 1);
    local_of[i] = static_cast<int>(sizes[graph_of[i]]++);
  }

  std::vector<std::vector<Edge>> edges(num_graphs);
  for (std::size_t r = 0; r < adjacency_rows.size(); ++r) {
    const long long a = adjacency_rows[r][0];
    const long long b = adjacency_rows[r][1];
    const auto bad = [&](long long id) { return id < 1 || static_cast<std::size_t>(id) > total_nodes; };
    if (bad(a) || bad(b))
      throw InputError(file("A").filename().string() + " line " + std::to_string(r + 1) +
                       ": dangling vertex index " + std::to_string(bad(a) ? a : b));
    const auto ia = static_cast<std::size_t>(a - 1);
    const auto ib = static_cast<std::size_t>(b - 1);
    if (graph_of[ia] != graph_of[ib])
      throw InputError(file("A").filename().string() + " line " + std::to_string(r + 1) +
                       ": edge joins two different graphs");
    if (ia == ib) continue;
    edges[graph_of[ia]].push_back({local_of[ia], local_of[ib]});
  }

  std::map<long long, int> label_index;
  if (has_node_labels) {
    for (const auto& row : node_label_rows) label_index.emplace(row[0], 0);
    int k = 0;
    for (auto& [label, idx] : label_index) idx = k++;
  }

  std::vector<Graph> graphs;
  graphs.reserve(num_graphs);
  for (std::size_t gi = 0; gi < num_graphs; ++gi) {
    graphs.emplace_back(sizes[gi], std::move(edges[gi]));
    graphs.back().set_graph_label(static_cast<int>(graph_label_rows[gi][0]));
  }
  if (has_node_labels && !label_index.empty()) {
    const auto dim = static_cast<Eigen::Index>(label_index.size());
    std::vector<FeatureMatrix> feats(num_graphs);
    std::vector<std::vector<int>> labels(num_graphs);
    for (std::size_t gi = 0; gi < num_graphs; ++gi) {
      feats[gi] = FeatureMatrix::Zero(static_cast<Eigen::Index>(sizes[gi]), dim);
      labels[gi].resize(sizes[gi]);
    }
    for (std::size_t i = 0; i < total_nodes; ++i) {
      const long long label = node_label_rows[i][0];
      feats[graph_of[i]](local_of[i], label_index.at(label)) = 1.0;
      labels[graph_of[i]][static_cast<std::size_t>(local_of[i])] = static_cast<int>(label);
    }
    for (std::size_t gi = 0; gi < num_graphs; ++gi) {
      if (sizes[gi] == 0) continue;
      graphs[gi].set_features(std::move(feats[gi]));
      graphs[gi].set_labels(std::move(labels[gi]));
    }
  }
  return graphs;
}

CorpusStats corpus_stats(const std::vector<Graph>& graphs) {
  if (graphs.empty()) throw InputError("corpus is empty");
  CorpusStats st;
  st.graphs = graphs.size();
  std::set<int> labels;
  for (const auto& g : graphs) {
    const auto n = static_cast<double>(g.num_vertices());
    const auto e = static_cast<double>(g.num_edges());
    st.avg_nodes += n;
    st.avg_edges += e;
    if (n > 0) st.avg_degree += 2.0 * e / n;
    st.max_degree = std::max(st.max_degree, g.max_degree());
    st.feature_dim = std::max(st.feature_dim, g.feature_dim());
    if (g.graph_label()) labels.insert(*g.graph_label());
  }
  const auto count = static_cast<double>(graphs.size());
  st.avg_nodes /= count;
  st.avg_edges /= count;
  st.avg_degree /= count;
  st.classes = labels.size();
  return st;
}

} // namespace gridlay
