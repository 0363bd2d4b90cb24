#include "gridlay/hierarchy.hpp"

#include "gridlay/error.hpp"
#include "gridlay/parallel.hpp"
#include "gridlay/partition.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>

namespace gridlay {

void validate(const HierarchyConfig& cfg) {
  if (cfg.fanout < 2) throw InputError("fanout must be >= 2");
  if (cfg.parent_grid.width < 1 || cfg.parent_grid.height < 1) throw InputError("parent grid must be at least 1x1");
  if (cfg.child_grid.width < 1 || cfg.child_grid.height < 1) throw InputError("child grid must be at least 1x1");
  const auto capacity =
      static_cast<std::size_t>(cfg.parent_grid.width) * static_cast<std::size_t>(cfg.parent_grid.height);
  if (cfg.fanout > capacity)
    throw InputError("fanout " + std::to_string(cfg.fanout) + " exceeds the parent grid capacity of " +
                     std::to_string(capacity) + " cells (" + std::to_string(cfg.parent_grid.width) + "x" +
                     std::to_string(cfg.parent_grid.height) + ")");
  if (!(cfg.max_imbalance >= 0.0)) throw InputError("max_imbalance must be >= 0");
  validate(cfg.layout);
}

std::size_t hierarchy_levels(std::size_t n, std::size_t fanout) {
  if (n <= 1 || fanout < 2) return 1;
  const auto t = std::lround(std::log(static_cast<double>(n)) / std::log(static_cast<double>(fanout)));
  return static_cast<std::size_t>(std::max(1L, t));
}

Cell fit_into_grid(std::span<const Cell> path, GridSize parent_grid, GridSize child_grid) {
  if (path.empty()) throw InputError("fit_into_grid: empty placement path");
  const auto inside = [](Cell c, GridSize s) { return c.x >= 0 && c.y >= 0 && c.x < s.width && c.y < s.height; };
  if (!inside(path[0], child_grid)) throw InputError("fit_into_grid: leaf cell outside the child grid");
  Cell a = path[0];
  long long scale_x = child_grid.width;
  long long scale_y = child_grid.height;
  for (std::size_t m = 1; m < path.size(); ++m) {
    if (!inside(path[m], parent_grid))
      throw InputError("fit_into_grid: placement at level " + std::to_string(m) + " outside the parent grid");
    a.x += static_cast<int>(path[m].x * scale_x);
    a.y += static_cast<int>(path[m].y * scale_y);
    scale_x *= parent_grid.width;
    scale_y *= parent_grid.height;
  }
  return a;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string describe(std::span<const int> path, std::size_t size) {
  std::string name = "subgraph ";
  if (path.empty()) {
    name += "root";
  } else {
    for (std::size_t i = 0; i < path.size(); ++i) name += (i ? "/" : "") + std::to_string(path[i]);
  }
  return name + " (" + std::to_string(size) + " vertices)";
}

void check_fits(const GridLayout& layout, GridSize grid, const std::string& what, const char* grid_name) {
  if (layout.bbox.width() > grid.width || layout.bbox.height() > grid.height)
    throw OverflowError(what + " needs " + std::to_string(layout.bbox.width()) + "x" +
                            std::to_string(layout.bbox.height()) + " cells but the " + grid_name + " is " +
                            std::to_string(grid.width) + "x" + std::to_string(grid.height),
                        layout.bbox.width(), layout.bbox.height());
}

// Moves every vertex sharing a cell with a lower-indexed vertex to the nearest free cell of
// the grid (squared Euclidean distance, ties by row then column).
std::vector<Cell> separate(const GridLayout& layout, GridSize grid) {
  std::vector<Cell> cells = layout.cells;
  std::vector<char> taken(static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height), 0);
  const auto slot = [&](Cell c) { return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(grid.width) + static_cast<std::size_t>(c.x); };
  for (auto& c : cells) {
    if (!taken[slot(c)]) {
      taken[slot(c)] = 1;
      continue;
    }
    long long best = std::numeric_limits<long long>::max();
    Cell target = c;
    for (int y = 0; y < grid.height; ++y)
      for (int x = 0; x < grid.width; ++x) {
        if (taken[slot({x, y})]) continue;
        const long long dx = x - c.x;
        const long long dy = y - c.y;
        if (dx * dx + dy * dy < best) {
          best = dx * dx + dy * dy;
          target = {x, y};
        }
      }
    c = target;
    taken[slot(c)] = 1;
  }
  return cells;
}

struct Builder {
  const Graph& g;
  const HierarchyConfig& cfg;
  std::mutex timing_mutex;
  HierarchyTimings timings;

  void add_time(double HierarchyTimings::*field, double ms) {
    std::lock_guard lock(timing_mutex);
    timings.*field += ms;
  }

  GridLayout timed_gpgl(const Graph& sub) {
    const auto start = Clock::now();
    GridLayout out = gpgl(sub, cfg.layout);
    add_time(&HierarchyTimings::layout_ms, elapsed_ms(start));
    return out;
  }

  TreeNode build(std::vector<int> vertices, Cell placement, std::vector<int> path) {
    TreeNode node;
    node.vertices = std::move(vertices);
    node.placement = placement;
    const Graph sub = g.induced_subgraph(node.vertices);
    const std::size_t n = node.vertices.size();

    if (hierarchy_levels(n, cfg.fanout) <= 1) {
      const GridLayout layout = timed_gpgl(sub);
      check_fits(layout, cfg.child_grid, "leaf " + describe(path, n), "child grid");
      node.leaf_cells = layout.cells;
      return node;
    }

    const auto start = Clock::now();
    PartitionOptions popts;
    popts.max_imbalance = cfg.max_imbalance;
    const Partition parts = normalized_cut(sub, cfg.fanout, popts);
    add_time(&HierarchyTimings::partition_ms, elapsed_ms(start));

    const GridLayout coarse = timed_gpgl(connectivity_graph(sub, parts));
    check_fits(coarse, cfg.parent_grid, "connectivity graph of " + describe(path, n), "parent grid");
    const std::vector<Cell> placements = separate(coarse, cfg.parent_grid);

    node.children.resize(parts.size());
    parallel_for(parts.size(), [&](std::size_t k) {
      std::vector<int> global;
      global.reserve(parts.parts[k].size());
      for (int v : parts.parts[k]) global.push_back(node.vertices[static_cast<std::size_t>(v)]);
      std::vector<int> child_path = path;
      child_path.push_back(static_cast<int>(k));
      node.children[k] = build(std::move(global), placements[k], std::move(child_path));
    });
    return node;
  }
};

std::size_t tree_depth(const TreeNode& node) {
  std::size_t d = 0;
  for (const auto& c : node.children) d = std::max(d, tree_depth(c) + 1);
  return d;
}

void assign_cells(const TreeNode& node, std::vector<Cell>& ancestors, std::size_t depth, GridSize parent_grid,
                  GridSize child_grid, std::vector<Cell>& out) {
  if (node.is_leaf()) {
    // ancestors holds placements from the root's child down to this leaf; the path runs upwards
    // and shallow leaves are padded with zero placements right above the leaf cell.
    std::vector<Cell> path(depth + 1, Cell{0, 0});
    for (std::size_t i = 0; i < ancestors.size(); ++i) path[depth - i] = ancestors[i];
    for (std::size_t i = 0; i < node.vertices.size(); ++i) {
      path[0] = node.leaf_cells[i];
      out[static_cast<std::size_t>(node.vertices[i])] = fit_into_grid(path, parent_grid, child_grid);
    }
    return;
  }
  for (const auto& c : node.children) {
    ancestors.push_back(c.placement);
    assign_cells(c, ancestors, depth, parent_grid, child_grid, out);
    ancestors.pop_back();
  }
}

void number_leaves(const TreeNode& node, int& next, std::vector<int>& out) {
  if (node.is_leaf()) {
    for (int v : node.vertices) out[static_cast<std::size_t>(v)] = next;
    ++next;
    return;
  }
  for (const auto& c : node.children) number_leaves(c, next, out);
}

nlohmann::json node_to_json(const TreeNode& node) {
  nlohmann::json j;
  j["vertices"] = node.vertices;
  j["placement"] = {node.placement.x, node.placement.y};
  if (node.is_leaf()) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : node.leaf_cells) cells.push_back({c.x, c.y});
    j["cells"] = std::move(cells);
  } else {
    nlohmann::json children = nlohmann::json::array();
    for (const auto& c : node.children) children.push_back(node_to_json(c));
    j["children"] = std::move(children);
  }
  return j;
}

TreeNode node_from_json(const nlohmann::json& j) {
  TreeNode node;
  node.vertices = j.at("vertices").get<std::vector<int>>();
  node.placement = {j.at("placement").at(0).get<int>(), j.at("placement").at(1).get<int>()};
  if (j.contains("children")) {
    for (const auto& c : j.at("children")) node.children.push_back(node_from_json(c));
  } else {
    for (const auto& c : j.at("cells")) node.leaf_cells.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    if (node.leaf_cells.size() != node.vertices.size())
      throw InputError("partition tree JSON: leaf cells do not match its vertices");
  }
  return node;
}

} // namespace

std::vector<int> PartitionTree::leaf_of(std::size_t num_vertices) const {
  std::vector<int> out(num_vertices, -1);
  int next = 0;
  number_leaves(root, next, out);
  return out;
}

std::size_t PartitionTree::leaf_count() const {
  std::size_t count = 0;
  const auto visit = [&](const auto& self, const TreeNode& node) -> void {
    if (node.is_leaf()) {
      ++count;
      return;
    }
    for (const auto& c : node.children) self(self, c);
  };
  visit(visit, root);
  return count;
}

HierarchicalLayout hgpgl(const Graph& g, const HierarchyConfig& cfg) {
  validate(cfg);
  const std::size_t n = g.num_vertices();
  if (n == 0) throw InputError("hgpgl needs at least one vertex");

  Builder builder{g, cfg, {}, {}};
  std::vector<int> all(n);
  for (std::size_t v = 0; v < n; ++v) all[v] = static_cast<int>(v);

  HierarchicalLayout out;
  out.tree.root = builder.build(std::move(all), Cell{0, 0}, {});
  out.tree.depth = tree_depth(out.tree.root);
  out.tree.parent_grid = cfg.parent_grid;
  out.tree.child_grid = cfg.child_grid;
  out.tree.fanout = cfg.fanout;
  out.timings = builder.timings;

  out.grid = compose_layout(out.tree, &out.global);
  return out;
}

GridLayout compose_layout(const PartitionTree& tree, GridSize* global) {
  if (global != nullptr) {
    *global = tree.child_grid;
    for (std::size_t d = 0; d < tree.depth; ++d) {
      global->width *= tree.parent_grid.width;
      global->height *= tree.parent_grid.height;
    }
  }
  const std::size_t n = tree.root.vertices.size();
  for (std::size_t v = 0; v < n; ++v)
    if (tree.root.vertices[v] != static_cast<int>(v)) throw InputError("partition tree root must hold vertices 0..n-1");
  std::vector<Cell> cells(n);
  std::vector<Cell> ancestors;
  assign_cells(tree.root, ancestors, tree.depth, tree.parent_grid, tree.child_grid, cells);
  return make_grid_layout(std::move(cells));
}

std::string partition_tree_to_json(const PartitionTree& tree) {
  nlohmann::json j;
  j["depth"] = tree.depth;
  j["fanout"] = tree.fanout;
  j["parent_grid"] = {tree.parent_grid.width, tree.parent_grid.height};
  j["child_grid"] = {tree.child_grid.width, tree.child_grid.height};
  j["root"] = node_to_json(tree.root);
  return j.dump();
}

PartitionTree partition_tree_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    PartitionTree tree;
    tree.depth = j.at("depth").get<std::size_t>();
    tree.fanout = j.at("fanout").get<std::size_t>();
    tree.parent_grid = {j.at("parent_grid").at(0).get<int>(), j.at("parent_grid").at(1).get<int>()};
    tree.child_grid = {j.at("child_grid").at(0).get<int>(), j.at("child_grid").at(1).get<int>()};
    tree.root = node_from_json(j.at("root"));
    return tree;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("partition tree JSON: ") + e.what());
  }
}

} // namespace gridlay
