// Runs acceptance criteria 1-9 and prints one PASS/FAIL line per criterion.
// Exit status is non-zero when any criterion fails.

#include "gridlay/energy.hpp"
#include "gridlay/error.hpp"
#include "gridlay/hierarchy.hpp"
#include "gridlay/layout.hpp"
#include "gridlay/npy.hpp"
#include "gridlay/parallel.hpp"
#include "gridlay/partition.hpp"
#include "gridlay/pointcloud.hpp"
#include "gridlay/rng.hpp"
#include "gridlay/tu_dataset.hpp"

#include "graphs.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace gridlay;
using namespace gridlay::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------------------------

Outcome gradient_oracle() {
  Rng rng(2024);
  const double h = 1e-5;
  double worst = 0;
  int active = 0, inactive = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 11;
    const Graph g = random_connected_graph(n, n / 2, 500 + static_cast<std::uint64_t>(trial));
    const DistanceMatrix s = shortest_path_distances(g);
    const double alpha = 1.25;
    const double lambda = trial % 5 == 0 ? 0.0 : 1000.0;
    Coords x(static_cast<Eigen::Index>(n), 2);
    // Stay 1e-3 away from the hinge kink and from coincident points.
    for (bool ok = false; !ok;) {
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 0.8 * std::sqrt(static_cast<double>(n)) * rng.uniform();
      ok = true;
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
          const double d = (x.row(i) - x.row(j)).norm();
          if (std::abs(d - alpha) < 1e-3 || d < 0.05) ok = false;
        }
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = i + 1; j < x.rows(); ++j) ((x.row(i) - x.row(j)).norm() < alpha ? active : inactive)++;
    const Coords grad = gpgl_gradient(x, s, alpha, lambda);
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      Coords plus = x, minus = x;
      plus.data()[k] += h;
      minus.data()[k] -= h;
      const double fd = (kk_energy(plus, s) + separation_penalty(plus, alpha, lambda) -
                         kk_energy(minus, s) - separation_penalty(minus, alpha, lambda)) / (2 * h);
      const double a = grad.data()[k];
      worst = std::max(worst, std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-6}));
    }
  }
  return {worst < 1e-5 && active > 0 && inactive > 0,
          "max rel err " + std::to_string(worst) + ", active pairs " + std::to_string(active) + ", inactive " +
              std::to_string(inactive)};
}

Outcome k32_ball() {
  const Graph g = complete_graph(32);
  int good = 0, collapsed = 0;
  std::string sides;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    LayoutConfig cfg;
    cfg.seed = seed;
    const GridLayout a = gpgl(g, cfg);
    if (a.vertex_loss_count == 0 && a.bbox.side() <= 9) ++good;
    sides += (sides.empty() ? "" : ",") + std::to_string(a.bbox.side());
    cfg.lambda = 0;
    if (gpgl(g, cfg).vertex_loss_count > 0) ++collapsed;
  }
  return {good >= 8 && collapsed >= 8, "lambda=1000: " + std::to_string(good) + "/10 lossless with side<=9 (sides " +
                                           sides + "); lambda=0: " + std::to_string(collapsed) + "/10 with loss"};
}

const std::vector<Graph>* mutag() {
  static const std::vector<Graph> graphs = [] {
    const fs::path dir = fs::path(GRIDLAY_DATA_DIR) / "MUTAG";
    if (!fs::exists(dir / "MUTAG_A.txt")) return std::vector<Graph>{};
    return load_tu_dataset(dir, "MUTAG");
  }();
  return graphs.empty() ? nullptr : &graphs;
}

Outcome mutag_loss() {
  const auto* graphs = mutag();
  if (!graphs) return {false, "MUTAG not found under " + std::string(GRIDLAY_DATA_DIR)};
  std::map<InitStrategy, double> ratio;
  for (InitStrategy init : {InitStrategy::circular, InitStrategy::random, InitStrategy::spectral}) {
    std::vector<GridLayout> layouts(graphs->size());
    parallel_for(graphs->size(), [&](std::size_t i) {
      LayoutConfig cfg;
      cfg.init = init;
      layouts[i] = gpgl((*graphs)[i], cfg);
    });
    ratio[init] = vertex_loss_ratio(layouts, *graphs);
  }
  const double c = ratio[InitStrategy::circular], r = ratio[InitStrategy::random], s = ratio[InitStrategy::spectral];
  const bool within = std::abs(c - 1.06) <= 1.5;
  const bool ordered = c <= r && r < s;
  return {within && ordered, "loss % circular " + fmt(c) + " (target 1.06 +/- 1.5: " + (within ? "ok" : "out") +
                                 "), random " + fmt(r) + ", spectral " + fmt(s) +
                                 " (circular <= random < spectral: " + (ordered ? "holds" : "violated") + ")"};
}

Outcome alpha_trend() {
  // IMDB-B sized: about 20 vertices and 97 edges, dense ego-network-like graphs.
  std::vector<Graph> graphs;
  for (std::uint64_t k = 0; k < 10; ++k) {
    Rng rng(900 + k);
    const std::size_t n = 15 + rng.below(11);
    std::vector<Edge> e;
    for (std::size_t i = 1; i < n; ++i) e.push_back({static_cast<int>(rng.below(i)), static_cast<int>(i)});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.5) e.push_back({static_cast<int>(i), static_cast<int>(j)});
    graphs.emplace_back(n, e);
  }
  const std::vector<double> alphas{1.00, 1.25, 1.50};
  std::vector<double> mean_side;
  for (double alpha : alphas) {
    std::vector<int> sides(graphs.size() * 5);
    parallel_for(sides.size(), [&](std::size_t i) {
      LayoutConfig cfg;
      cfg.alpha = alpha;
      cfg.seed = i % 5;
      sides[i] = gpgl(graphs[i / 5], cfg).bbox.side();
    });
    double total = 0;
    for (int s : sides) total += s;
    mean_side.push_back(total / static_cast<double>(sides.size()));
  }
  const bool ok = mean_side[0] <= mean_side[1] && mean_side[1] <= mean_side[2];
  return {ok, "mean bbox side " + fmt(mean_side[0], 2) + " / " + fmt(mean_side[1], 2) + " / " + fmt(mean_side[2], 2) +
                  " for alpha 1.00 / 1.25 / 1.50"};
}

Outcome ncut_oracle() {
  double worst = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const std::size_t n = 4 + k % 9;
    const Graph g = random_connected_graph(n, k % 3 == 0 ? n : n / 2, 7000 + k);
    const double spectral = normalized_cut_value(g, normalized_cut(g, 2));
    worst = std::max(worst, spectral / brute_force_min_ncut(g));
  }
  int balanced = 0;
  std::size_t largest = 0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const Partition p = normalized_cut(random_geometric_graph(512, 0.09, 40 + k), 16);
    largest = std::max(largest, p.max_part_size());
    if (p.size() == 16 && p.max_part_size() <= 64) ++balanced;
  }
  return {worst <= 1.5 && balanced == 10, "worst ratio to optimum " + fmt(worst) + "; balance " +
                                              std::to_string(balanced) + "/10 (largest part " +
                                              std::to_string(largest) + ", bound 64)"};
}

// Checks that (leaf, leaf cell) -> global cell is injective and that siblings never share a placement.
bool injective_composition(const HierarchicalLayout& h, std::string& why) {
  std::function<bool(const TreeNode&)> siblings_distinct = [&](const TreeNode& node) {
    std::set<Cell> seen;
    for (const auto& c : node.children) {
      if (!seen.insert(c.placement).second) return false;
      if (!siblings_distinct(c)) return false;
    }
    return true;
  };
  if (!siblings_distinct(h.tree.root)) {
    why = "sibling placements collide";
    return false;
  }
  const auto leaf = h.tree.leaf_of(h.grid.size());
  std::map<Cell, std::pair<int, Cell>> owner;
  std::vector<Cell> local(h.grid.size());
  std::function<void(const TreeNode&)> collect = [&](const TreeNode& node) {
    if (node.is_leaf())
      for (std::size_t i = 0; i < node.vertices.size(); ++i) local[static_cast<std::size_t>(node.vertices[i])] = node.leaf_cells[i];
    for (const auto& c : node.children) collect(c);
  };
  collect(h.tree.root);
  for (std::size_t v = 0; v < h.grid.size(); ++v) {
    const std::pair<int, Cell> key{leaf[v], local[v]};
    const auto [it, fresh] = owner.emplace(h.grid.cells[v], key);
    if (!fresh && it->second != key) {
      why = "two leaves map onto one global cell";
      return false;
    }
  }
  return true;
}

Outcome hgpgl_composition() {
  const Graph g = delaunay_graph(random_point_cloud(2048, 1));
  const HierarchicalLayout h = hgpgl(g, HierarchyConfig{});
  std::string why;
  const bool injective = injective_composition(h, why);
  bool inside = h.grid.size() == 2048;
  for (const Cell& c : h.grid.cells) inside = inside && c.x >= 0 && c.y >= 0 && c.x < 256 && c.y < 256;
  const double overlap = 100.0 * static_cast<double>(h.grid.vertex_loss_count) / 2048.0;
  const bool grid_ok = h.global == GridSize{256, 256};
  return {grid_ok && inside && injective && overlap < 2.0,
          "grid " + std::to_string(h.global.width) + "x" + std::to_string(h.global.height) + ", " +
              std::to_string(h.grid.size()) + " vertices inside: " + (inside ? "yes" : "no") + ", injective: " +
              (injective ? "yes" : why) + ", overlapped " + fmt(overlap) + "%"};
}

Outcome crossover() {
  const Graph g = delaunay_graph(random_point_cloud(2048, 1));
  std::vector<double> hier, flat;
  for (int rep = 0; rep < 3; ++rep) {
    auto t = Clock::now();
    hgpgl(g, HierarchyConfig{});
    hier.push_back(seconds_since(t));
    t = Clock::now();
    gpgl(g, LayoutConfig{});
    flat.push_back(seconds_since(t));
  }
  std::sort(hier.begin(), hier.end());
  std::sort(flat.begin(), flat.end());
  const double speedup = flat[1] / hier[1];
  return {speedup >= 5.0, "median hgpgl " + fmt(hier[1], 2) + " s, flat " + fmt(flat[1], 2) + " s, speedup " +
                              fmt(speedup, 1) + "x"};
}

std::set<std::pair<int, int>> brute_force_delaunay_edges(const PointMatrix& p) {
  const int n = static_cast<int>(p.rows());
  std::set<std::pair<int, int>> out;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          Eigen::Matrix3d m;
          Eigen::Vector3d rhs;
          const Eigen::Vector3d pa = p.row(a).transpose();
          const int others[3] = {b, c, d};
          for (int k = 0; k < 3; ++k) {
            const Eigen::Vector3d q = p.row(others[k]).transpose();
            m.row(k) = 2.0 * (q - pa).transpose();
            rhs[k] = q.squaredNorm() - pa.squaredNorm();
          }
          if (std::abs(m.determinant()) < 1e-12) continue;
          const Eigen::Vector3d center = m.fullPivLu().solve(rhs);
          const double r2 = (center - pa).squaredNorm();
          bool empty = true;
          for (int e = 0; e < n && empty; ++e)
            if (e != a && e != b && e != c && e != d && (p.row(e).transpose() - center).squaredNorm() < r2) empty = false;
          if (!empty) continue;
          const int v[4] = {a, b, c, d};
          for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) out.insert({v[i], v[j]});
        }
  return out;
}

Outcome delaunay_oracle() {
  int match = 0, connected = 0;
  for (std::uint64_t k = 0; k < 30; ++k) {
    const PointCloud pc = random_point_cloud(10 + k, 3000 + k);
    const Graph g = delaunay_graph(pc);
    std::set<std::pair<int, int>> edges;
    for (const auto& e : g.edges()) edges.insert({e.u, e.v});
    if (edges == brute_force_delaunay_edges(pc.points)) ++match;
    if (connected_components(g).size() == 1) ++connected;
  }
  return {match == 30 && connected == 30,
          std::to_string(match) + "/30 edge sets match, " + std::to_string(connected) + "/30 connected"};
}

// ---------------------------------------------------------------------------------------------
// Determinism

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args, const fs::path& cwd) {
  const std::string cmd = "cd \"" + cwd.string() + "\" && \"" + GRIDLAY_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// First column of each CSV row; timings differ between runs, the rows and header must not.
std::string csv_structure(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  bool header = true;
  while (std::getline(in, line)) {
    out += header ? line : line.substr(0, line.find(','));
    out += '\n';
    header = false;
  }
  return out;
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("gridlay_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    Graph g = random_geometric_graph(300, 0.1, 8);
    FeatureMatrix f(300, 3);
    for (Eigen::Index i = 0; i < 300; ++i) f.row(i) << (i % 3 == 0), (i % 3 == 1), (i % 3 == 2);
    g.set_features(f);
    g.set_graph_label(1);
    std::ofstream(dir / "geo.json") << graph_to_json(g);
    std::ofstream(dir / "k20.json") << graph_to_json(complete_graph(20));
  }
  std::string corpus = "--input geo.json";
  if (mutag()) corpus = "--dataset \"" + (fs::path(GRIDLAY_DATA_DIR) / "MUTAG").string() + "\" --name MUTAG --limit 6";

  struct Step {
    std::string args;
    std::string manifest;
    bool timings = false; ///< outputs hold wall-clock times; compare their structure only
  };
  const std::vector<Step> steps{
      {"layout --input k20.json --seed 3 --out layout.json", "layout.json.manifest.json"},
      {"hlayout --input geo.json --fanout 8 --out hier.json", "hier.json.manifest.json"},
      {"augment " + corpus + " --copies 3 --seed 5 --out-dir grids", "grids/manifest.json"},
      {"stats " + corpus + " --out stats.csv", "stats.csv.manifest.json"},
      {"render --tree hier.json.tree.json --graph geo.json --edges --out hier.png", "hier.png.manifest.json"},
      {"render --layout layout.json --graph k20.json --out layout.ppm", "layout.ppm.manifest.json"},
      {"bench --points 256 --reps 2 --fanout 8 --out bench.csv", "bench.csv.manifest.json", true},
  };
  std::string failures;
  std::size_t compared = 0;
  for (const auto& step : steps) {
    if (cli(step.args, dir) != 0) {
      failures += " [" + step.args.substr(0, step.args.find(' ')) + " failed]";
      continue;
    }
    const auto manifest = nlohmann::json::parse(slurp(dir / step.manifest));
    std::map<std::string, std::string> first;
    for (const auto& out : manifest.at("outputs")) {
      const fs::path p = fs::path(out.get<std::string>()).is_absolute() ? fs::path(out.get<std::string>()) : dir / out.get<std::string>();
      first[p.string()] = slurp(p);
      fs::remove(p);
    }
    if (cli("rerun \"" + (dir / step.manifest).string() + "\"", dir) != 0) {
      failures += " [rerun of " + step.args.substr(0, step.args.find(' ')) + " failed]";
      continue;
    }
    for (const auto& [path, bytes] : first) {
      const std::string again = slurp(path);
      const bool same = step.timings ? csv_structure(again) == csv_structure(bytes) : again == bytes;
      if (!same || bytes.empty()) failures += " [" + fs::path(path).filename().string() + " differs]";
      ++compared;
    }
  }

  Rng rng(77);
  int exact = 0;
  for (int i = 0; i < 100; ++i) {
    FeatureGrid g;
    g.height = 1 + rng.below(48);
    g.width = 1 + rng.below(48);
    g.channels = 1 + rng.below(10);
    g.data.resize(g.height * g.width * g.channels);
    g.mask.resize(g.height * g.width);
    for (std::size_t c = 0; c < g.mask.size(); ++c) {
      g.mask[c] = rng.uniform() < 0.25;
      if (g.mask[c])
        for (std::size_t f = 0; f < g.channels; ++f) g.data[c * g.channels + f] = static_cast<float>(rng.uniform() * 20 - 10);
    }
    g.graph_label = static_cast<int>(rng.below(2));
    const std::string stem = (dir / ("rt_" + std::to_string(i))).string();
    export_npy(g, stem);
    const FeatureGrid back = import_npy(stem);
    if (back == g && std::memcmp(back.data.data(), g.data.data(), g.data.size() * sizeof(float)) == 0) ++exact;
  }
  fs::remove_all(dir);
  return {failures.empty() && compared > 0 && exact == 100,
          std::to_string(compared) + " outputs rerun from manifests" + (failures.empty() ? " identical" : failures) +
              "; NPY round trip exact " + std::to_string(exact) + "/100"};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient oracle", gradient_oracle},
      {"K32 ball and collapse", k32_ball},
      {"MUTAG vertex loss", mutag_loss},
      {"bounding box grows with alpha", alpha_trend},
      {"normalized cut oracle and balance", ncut_oracle},
      {"hierarchical composition", hgpgl_composition},
      {"hierarchical speedup", crossover},
      {"Delaunay oracle", delaunay_oracle},
      {"determinism and NPY format", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
              << o.detail << " (" << fmt(seconds_since(start), 1) << " s)" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
