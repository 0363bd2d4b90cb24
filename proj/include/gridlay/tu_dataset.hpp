#pragma once

#include "gridlay/graph.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gridlay {

/// Reads a TU-Dortmund benchmark (`<name>_A.txt`, `<name>_graph_indicator.txt`,
/// `<name>_graph_labels.txt`, optional `<name>_node_labels.txt`) from `dir`.
///
/// Returns one Graph per graph id in id order. Node labels, when present, become
/// one-hot features over the sorted set of labels seen anywhere in the dataset; the raw
/// labels are kept in Graph::labels(). Both directions of each adjacency row collapse
/// into one undirected edge; self-loops are dropped.
///
/// Throws InputError naming the missing file, or the file and line of a bad row.
std::vector<Graph> load_tu_dataset(const std::filesystem::path& dir, const std::string& name);

struct CorpusStats {
  std::size_t graphs = 0;
  std::size_t classes = 0; ///< distinct graph labels
  double avg_nodes = 0.0;
  double avg_edges = 0.0;
  double avg_degree = 0.0; ///< per-graph mean degree 2E/n, averaged over graphs
  std::size_t max_degree = 0;
  std::size_t feature_dim = 0;
};

/// Throws InputError on an empty corpus.
CorpusStats corpus_stats(const std::vector<Graph>& graphs);

} // namespace gridlay
