#pragma once

#include "gridlay/graph.hpp"
#include "gridlay/laplacian_eigen.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace gridlay {

/// Disjoint, non-empty vertex sets covering the graph. Parts are ascending and ordered by
/// smallest member.
struct Partition {
  std::vector<std::vector<int>> parts;
  std::vector<int> part_of;
  /// True when some bisection fell back to BFS order because the eigen-solver did not converge.
  bool used_fallback = false;

  std::size_t size() const noexcept { return parts.size(); }
  std::size_t max_part_size() const;
};

/// Builds part_of and canonical ordering; throws InputError unless `parts` partitions [0, n).
Partition make_partition(std::size_t n, std::vector<std::vector<int>> parts);

struct PartitionOptions {
  /// A side destined for k_s parts may hold at most ceil((1 + max_imbalance) * k_s * n / j)
  /// vertices, and never more than 2 * ceil(n/j) * k_s.
  double max_imbalance = 1.0;
  EigenOptions eigen{};
};

/// Splits `g` into `j` parts by recursive spectral bisection, always splitting the largest
/// set that still owes more than one part. Each split thresholds the second eigenvector of
/// (D - W)x = lambda D x at the sweep position with the lowest normalized cut among
/// positions respecting the size bounds. Disconnected sets are first split along their
/// components. The largest part never exceeds 2 * ceil(n / j).
///
/// Throws InputError when j == 0 or j > n.
Partition normalized_cut(const Graph& g, std::size_t j, const PartitionOptions& options = {});

/// Sum over parts of cut(part, rest) / vol(part). Parts with zero volume contribute 0.
double normalized_cut_value(const Graph& g, const Partition& p);

/// Graph with one vertex per part and an edge wherever an original edge crosses two parts.
Graph connectivity_graph(const Graph& g, const Partition& p);

} // namespace gridlay
