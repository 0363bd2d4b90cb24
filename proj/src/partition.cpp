#include "gridlay/partition.hpp"

#include "gridlay/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace gridlay {

std::size_t Partition::max_part_size() const {
  std::size_t m = 0;
  for (const auto& p : parts) m = std::max(m, p.size());
  return m;
}

Partition make_partition(std::size_t n, std::vector<std::vector<int>> parts) {
  Partition out;
  out.part_of.assign(n, -1);
  for (auto& part : parts) {
    if (part.empty()) throw InputError("partition contains an empty part");
    std::sort(part.begin(), part.end());
  }
  std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  for (std::size_t k = 0; k < parts.size(); ++k) {
    for (int v : parts[k]) {
      if (v < 0 || static_cast<std::size_t>(v) >= n) throw InputError("partition vertex out of range");
      if (out.part_of[static_cast<std::size_t>(v)] != -1)
        throw InputError("vertex " + std::to_string(v) + " appears in two parts");
      out.part_of[static_cast<std::size_t>(v)] = static_cast<int>(k);
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (out.part_of[v] == -1) throw InputError("vertex " + std::to_string(v) + " is not covered by the partition");
  out.parts = std::move(parts);
  return out;
}

namespace {

struct SizeBounds {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double target = 0.0;
};

struct Split {
  std::vector<int> side;  ///< local indices on the bounded side
  std::vector<int> other; ///< remaining local indices
  bool fallback = false;
};

// Chooses the sweep position over `order` minimizing the normalized cut, such that the
// bounded side has a size within `bounds`.
Split sweep(const Graph& sub, std::span<const int> order, const SizeBounds& bounds) {
  const std::size_t m = order.size();
  std::vector<char> in_prefix(m, 0);
  double vol_total = 0.0;
  for (std::size_t v = 0; v < m; ++v) vol_total += static_cast<double>(sub.degree(static_cast<int>(v)));

  double cut = 0.0;
  double vol = 0.0;
  double best_score = std::numeric_limits<double>::infinity();
  double best_balance = std::numeric_limits<double>::infinity();
  std::size_t best_t = 0;
  bool best_prefix_is_side = true;

  for (std::size_t t = 1; t < m; ++t) {
    const int v = order[t - 1];
    std::size_t inside = 0;
    for (int w : sub.neighbors(v)) inside += in_prefix[static_cast<std::size_t>(w)] ? 1 : 0;
    in_prefix[static_cast<std::size_t>(v)] = 1;
    const auto deg = static_cast<double>(sub.degree(v));
    cut += deg - 2.0 * static_cast<double>(inside);
    vol += deg;

    const double rest = vol_total - vol;
    double score = 0.0;
    if (cut > 0.0) score = (vol > 0.0 ? cut / vol : 0.0) + (rest > 0.0 ? cut / rest : 0.0);

    for (const bool prefix_is_side : {true, false}) {
      const std::size_t side_size = prefix_is_side ? t : m - t;
      if (side_size < bounds.lo || side_size > bounds.hi) continue;
      const double balance = std::abs(static_cast<double>(side_size) - bounds.target);
      const double tol = 1e-12 * std::max(1.0, std::abs(best_score));
      const bool better = score < best_score - tol || (score <= best_score + tol && balance < best_balance);
      if (better) {
        best_score = score;
        best_balance = balance;
        best_t = t;
        best_prefix_is_side = prefix_is_side;
      }
    }
  }
  if (best_t == 0) throw Error("no sweep position satisfies the partition size bounds");

  Split s;
  std::vector<int> prefix(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_t));
  std::vector<int> suffix(order.begin() + static_cast<std::ptrdiff_t>(best_t), order.end());
  s.side = best_prefix_is_side ? std::move(prefix) : std::move(suffix);
  s.other = best_prefix_is_side ? std::move(suffix) : std::move(prefix);
  return s;
}

std::vector<int> bfs_order(const Graph& sub) {
  const std::size_t m = sub.num_vertices();
  const auto run = [&](int start) {
    std::vector<int> order{start};
    std::vector<char> seen(m, 0);
    seen[static_cast<std::size_t>(start)] = 1;
    for (std::size_t head = 0; head < order.size(); ++head)
      for (int w : sub.neighbors(order[head]))
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          order.push_back(w);
        }
    return order;
  };
  // Start from a pseudo-peripheral vertex: the last one reached from vertex 0.
  return run(run(0).back());
}

// Bisects a connected induced subgraph.
Split bisect_connected(const Graph& sub, const SizeBounds& bounds, const EigenOptions& eigen) {
  const std::size_t m = sub.num_vertices();
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  bool fallback = false;
  if (m >= 3) {
    const SparseMatrix lsym = normalized_laplacian(sub);
    Eigen::MatrixXd null_basis(static_cast<Eigen::Index>(m), 1);
    for (std::size_t v = 0; v < m; ++v)
      null_basis(static_cast<Eigen::Index>(v), 0) = std::sqrt(static_cast<double>(sub.degree(static_cast<int>(v))));
    null_basis /= null_basis.norm();
    EigenPairs fiedler;
    try {
      fiedler = smallest_eigenpairs(lsym, null_basis, 1, eigen);
    } catch (const SolverError&) {
      fiedler.converged = false;
    }
    if (fiedler.converged) {
      std::vector<double> key(m);
      for (std::size_t v = 0; v < m; ++v)
        key[v] = fiedler.vectors(static_cast<Eigen::Index>(v), 0) /
                 std::sqrt(static_cast<double>(sub.degree(static_cast<int>(v))));
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return key[static_cast<std::size_t>(a)] < key[static_cast<std::size_t>(b)]; });
    } else {
      fallback = true;
      order = bfs_order(sub);
    }
  }
  if (fallback) {
    // Balanced BFS bisection: the bounded side takes the BFS prefix closest to its target.
    const auto take = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(bounds.target)), bounds.lo, bounds.hi);
    Split s;
    s.side.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    s.other.assign(order.begin() + static_cast<std::ptrdiff_t>(take), order.end());
    s.fallback = true;
    return s;
  }
  return sweep(sub, order, bounds);
}

std::vector<int> map_to(std::span<const int> local, std::span<const int> global) {
  std::vector<int> out;
  out.reserve(local.size());
  for (int v : local) out.push_back(global[static_cast<std::size_t>(v)]);
  std::sort(out.begin(), out.end());
  return out;
}

// Splits the global vertex set `set` so that the first returned side has a size within `bounds`.
Split bisect(const Graph& g, std::span<const int> set, const SizeBounds& bounds, const EigenOptions& eigen) {
  const Graph sub = g.induced_subgraph(set);
  auto comps = connected_components(sub);
  if (comps.size() == 1) return bisect_connected(sub, bounds, eigen);

  std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  const auto target = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(bounds.target)), bounds.lo, bounds.hi);
  Split s;
  std::vector<std::vector<int>> rest;
  std::size_t filled = 0;
  for (auto& c : comps) {
    if (filled + c.size() <= target) {
      filled += c.size();
      s.side.insert(s.side.end(), c.begin(), c.end());
    } else {
      rest.push_back(std::move(c));
    }
  }
  while (filled < bounds.lo) {
    // rest stays sorted by decreasing size; take from the largest leftover component.
    auto comp = std::move(rest.front());
    rest.erase(rest.begin());
    if (filled + comp.size() <= bounds.hi) {
      filled += comp.size();
      s.side.insert(s.side.end(), comp.begin(), comp.end());
      continue;
    }
    const Graph piece_graph = sub.induced_subgraph(comp);
    SizeBounds inner;
    inner.lo = bounds.lo - filled;
    inner.hi = std::min(bounds.hi - filled, comp.size() - 1);
    inner.target = std::clamp(bounds.target - static_cast<double>(filled), static_cast<double>(inner.lo),
                              static_cast<double>(inner.hi));
    Split piece = bisect_connected(piece_graph, inner, eigen);
    s.fallback = s.fallback || piece.fallback;
    for (int v : piece.side) s.side.push_back(comp[static_cast<std::size_t>(v)]);
    for (int v : piece.other) s.other.push_back(comp[static_cast<std::size_t>(v)]);
    filled += piece.side.size();
  }
  for (const auto& c : rest) s.other.insert(s.other.end(), c.begin(), c.end());
  return s;
}

struct Pending {
  std::vector<int> vertices; // global, ascending
  std::size_t budget = 1;    // number of final parts this set must become
};

} // namespace

Partition normalized_cut(const Graph& g, std::size_t j, const PartitionOptions& options) {
  const std::size_t n = g.num_vertices();
  if (j == 0) throw InputError("normalized_cut: number of parts must be >= 1");
  if (j > n)
    throw InputError("normalized_cut: cannot split " + std::to_string(n) + " vertices into " + std::to_string(j) +
                     " non-empty parts");

  const std::size_t fair = (n + j - 1) / j;
  const double ideal = static_cast<double>(n) / static_cast<double>(j);
  std::vector<Pending> pending(1);
  pending[0].vertices.resize(n);
  std::iota(pending[0].vertices.begin(), pending[0].vertices.end(), 0);
  pending[0].budget = j;
  bool fallback = false;

  for (;;) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (pending[i].budget < 2) continue;
      if (!pick || pending[i].vertices.size() > pending[*pick].vertices.size()) pick = i;
    }
    if (!pick) break;

    Pending current = std::move(pending[*pick]);
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(*pick));
    const std::size_t m = current.vertices.size();
    const std::size_t k = current.budget;
    const std::size_t k1 = (k + 1) / 2;
    const std::size_t k2 = k - k1;
    // Slack is measured against the global ideal n / j, so it does not compound down the
    // recursion. Every set then satisfies m <= cap(k), which keeps lo <= hi.
    const auto cap = [&](std::size_t ks) {
      const double share = (1.0 + options.max_imbalance) * ideal * static_cast<double>(ks);
      return std::min(static_cast<std::size_t>(std::ceil(share - 1e-9)), 2 * fair * ks);
    };
    SizeBounds bounds;
    bounds.lo = std::max(k1, m > cap(k2) ? m - cap(k2) : std::size_t{0});
    bounds.hi = std::min(cap(k1), m - k2);
    if (bounds.lo > bounds.hi) bounds.hi = bounds.lo;
    bounds.target = static_cast<double>(m) * static_cast<double>(k1) / static_cast<double>(k);

    Split s = bisect(g, current.vertices, bounds, options.eigen);
    fallback = fallback || s.fallback;
    pending.push_back({map_to(s.side, current.vertices), k1});
    pending.push_back({map_to(s.other, current.vertices), k2});
  }

  std::vector<std::vector<int>> parts;
  parts.reserve(pending.size());
  for (auto& p : pending) parts.push_back(std::move(p.vertices));
  Partition out = make_partition(n, std::move(parts));
  out.used_fallback = fallback;
  return out;
}

double normalized_cut_value(const Graph& g, const Partition& p) {
  std::vector<double> cut(p.size(), 0.0);
  std::vector<double> vol(p.size(), 0.0);
  for (const auto& e : g.edges()) {
    const auto a = static_cast<std::size_t>(p.part_of[static_cast<std::size_t>(e.u)]);
    const auto b = static_cast<std::size_t>(p.part_of[static_cast<std::size_t>(e.v)]);
    vol[a] += 1.0;
    vol[b] += 1.0;
    if (a != b) {
      cut[a] += 1.0;
      cut[b] += 1.0;
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (vol[k] > 0.0) total += cut[k] / vol[k];
  return total;
}

Graph connectivity_graph(const Graph& g, const Partition& p) {
  if (p.part_of.size() != g.num_vertices()) throw InputError("connectivity_graph: partition does not match graph");
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    const int a = p.part_of[static_cast<std::size_t>(e.u)];
    const int b = p.part_of[static_cast<std::size_t>(e.v)];
    if (a != b) edges.push_back({std::min(a, b), std::max(a, b)});
  }
  return Graph(p.size(), std::move(edges));
}

} // namespace gridlay
