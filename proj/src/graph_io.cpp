#include "gridlay/error.hpp"
#include "gridlay/graph.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace gridlay {

using nlohmann::json;

Graph graph_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
    throw InputError("graph JSON: expected an object with \"n\" and \"edges\"");
  try {
    const auto n = j.at("n").get<long long>();
    if (n < 0) throw InputError("graph JSON: negative vertex count");
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw InputError("graph JSON: each edge must be [i, j]");
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    Graph g(static_cast<std::size_t>(n), std::move(edges));
    if (j.contains("features") && !j["features"].is_null()) {
      const auto& rows = j["features"];
      if (rows.size() != static_cast<std::size_t>(n))
        throw InputError("graph JSON: features must have one row per vertex");
      const std::size_t dim = n > 0 ? rows[0].size() : 0;
      FeatureMatrix f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim) throw InputError("graph JSON: ragged feature rows");
        for (std::size_t k = 0; k < dim; ++k)
          f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k].get<double>();
      }
      if (n > 0) g.set_features(std::move(f));
    }
    if (j.contains("labels") && !j["labels"].is_null()) g.set_labels(j["labels"].get<std::vector<int>>());
    if (j.contains("graph_label") && !j["graph_label"].is_null()) g.set_graph_label(j["graph_label"].get<int>());
    return g;
  } catch (const json::exception& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
}

std::string graph_to_json(const Graph& g) {
  json j;
  j["n"] = g.num_vertices();
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  j["edges"] = std::move(edges);
  if (g.has_features()) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < g.features().rows(); ++i) {
      json row = json::array();
      for (Eigen::Index k = 0; k < g.features().cols(); ++k) row.push_back(g.features()(i, k));
      rows.push_back(std::move(row));
    }
    j["features"] = std::move(rows);
  }
  if (g.labels()) j["labels"] = *g.labels();
  if (g.graph_label()) j["graph_label"] = *g.graph_label();
  return j.dump();
}

Graph graph_from_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Edge> edges;
  long long declared_n = -1;
  long long max_index = -1;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      const auto tag = line.find("n=", hash);
      if (tag != std::string::npos) declared_n = std::stoll(line.substr(tag + 2));
      line.erase(hash);
    }
    std::istringstream fields(line);
    long long u = 0, v = 0;
    if (!(fields >> u)) continue;
    if (!(fields >> v) || u < 0 || v < 0)
      throw InputError("edge list line " + std::to_string(line_no) + ": expected two non-negative indices");
    max_index = std::max({max_index, u, v});
    if (u != v) edges.push_back({static_cast<int>(u), static_cast<int>(v)});
  }
  const long long n = declared_n >= 0 ? declared_n : max_index + 1;
  if (n <= max_index) throw InputError("edge list: index " + std::to_string(max_index) + " exceeds declared n");
  return Graph(static_cast<std::size_t>(n), std::move(edges));
}

Graph load_graph_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open graph file: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return is_json ? graph_from_json(buf.str()) : graph_from_edge_list(buf.str());
}

} // namespace gridlay
