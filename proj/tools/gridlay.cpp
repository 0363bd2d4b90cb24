// gridlay: command-line driver for grid layouts, hierarchical layouts, feature-grid export,
// corpus statistics, rendering and benchmarks.

#include "gridlay/error.hpp"
#include "gridlay/feature_grid.hpp"
#include "gridlay/graph.hpp"
#include "gridlay/hierarchy.hpp"
#include "gridlay/layout.hpp"
#include "gridlay/npy.hpp"
#include "gridlay/parallel.hpp"
#include "gridlay/partition.hpp"
#include "gridlay/pointcloud.hpp"
#include "gridlay/render.hpp"
#include "gridlay/tu_dataset.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef GRIDLAY_VERSION
#define GRIDLAY_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace gridlay;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kManifestSchema = 1;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

void write_text(const std::string& path, const std::string& text) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Everything one command run records about itself.
struct Run {
  std::string command;
  std::vector<std::string> args; ///< arguments after the subcommand name, as given
  json config = json::object();
  std::uint64_t seed = 0;
  json timings = json::object();
  std::vector<std::string> outputs;
  json extra = json::object();
  std::string manifest_path;
};

void write_manifest(const Run& run, const std::string& status, const std::string& message) {
  if (run.manifest_path.empty()) return;
  json m;
  m["schema_version"] = kManifestSchema;
  m["tool"] = "gridlay";
  m["tool_version"] = GRIDLAY_VERSION;
  m["command"] = run.command;
  m["args"] = run.args;
  m["cwd"] = fs::current_path().string();
  m["config"] = run.config;
  m["seed"] = run.seed;
  m["timings_ms"] = run.timings;
  m["outputs"] = run.outputs;
  m["status"] = status;
  if (!message.empty()) m["message"] = message;
  for (const auto& [k, v] : run.extra.items()) m[k] = v;
  write_text(run.manifest_path, m.dump(2) + "\n");
}

std::string csv_number(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}

LayoutConfig layout_config(double alpha, double lambda, const std::string& init, std::uint64_t seed,
                           std::size_t kk_iters, std::size_t gpgl_iters, double grad_tol) {
  LayoutConfig cfg;
  cfg.alpha = alpha;
  cfg.lambda = lambda;
  cfg.init = parse_init_strategy(init);
  cfg.seed = seed;
  cfg.max_iters_kk = kk_iters;
  cfg.max_iters_gpgl = gpgl_iters;
  cfg.grad_tol = grad_tol;
  validate(cfg);
  return cfg;
}

json layout_config_json(const LayoutConfig& cfg) {
  return {{"alpha", cfg.alpha},           {"lambda", cfg.lambda},
          {"init", to_string(cfg.init)},  {"seed", cfg.seed},
          {"max_iters_kk", cfg.max_iters_kk}, {"max_iters_gpgl", cfg.max_iters_gpgl},
          {"grad_tol", cfg.grad_tol}};
}

GridSize parse_grid(const std::string& text) {
  // "16" or "16x16" (width x height)
  const auto x = text.find('x');
  try {
    std::size_t used = 0;
    if (x == std::string::npos) {
      const int s = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {s, s};
    }
    const int w = std::stoi(text.substr(0, x), &used);
    const std::string rest = text.substr(x + 1);
    std::size_t used_h = 0;
    const int h = std::stoi(rest, &used_h);
    if (used != x || used_h != rest.size()) throw std::invalid_argument(text);
    return {w, h};
  } catch (const std::exception&) {
    throw InputError("bad grid size '" + text + "' (expected N or WxH)");
  }
}

/// Layout options shared by several commands.
struct LayoutFlags {
  double alpha = 1.25;
  double lambda = 1000.0;
  std::string init = "circular";
  std::uint64_t seed = 0;
  std::size_t kk_iters = 500;
  std::size_t gpgl_iters = 1000;
  double grad_tol = 1e-4;

  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "separation threshold")->capture_default_str();
    app->add_option("--lambda", lambda, "separation weight")->capture_default_str();
    app->add_option("--init", init, "initialization: circular, spectral or random")->capture_default_str();
    app->add_option("--seed", seed, "random seed")->capture_default_str();
    app->add_option("--max-iters-kk", kk_iters, "iteration cap of the stress stage")->capture_default_str();
    app->add_option("--max-iters-gpgl", gpgl_iters, "iteration cap of the penalized stage")->capture_default_str();
    app->add_option("--grad-tol", grad_tol, "gradient infinity-norm tolerance")->capture_default_str();
  }

  LayoutConfig config() const { return layout_config(alpha, lambda, init, seed, kk_iters, gpgl_iters, grad_tol); }
};

/// Graph source: a graph file, or a point cloud turned into a graph.
struct GraphSource {
  std::string input;
  std::string cloud;
  std::string graph_type = "delaunay";
  std::size_t k = 5;
  std::size_t points = 0;
  std::uint64_t cloud_seed = 0;

  void add(CLI::App* app, bool allow_random) {
    app->add_option("--input", input, "graph file (.json or edge list)");
    app->add_option("--cloud", cloud, "point cloud file (.xyz text or .bin)");
    app->add_option("--graph-type", graph_type, "graph built from a cloud: delaunay or knn")->capture_default_str();
    app->add_option("--k", k, "neighbors for knn graphs")->capture_default_str();
    if (allow_random) {
      app->add_option("--points", points, "random cloud of this many points in the unit cube");
      app->add_option("--cloud-seed", cloud_seed, "seed of the random cloud")->capture_default_str();
    }
  }

  json config() const {
    return {{"input", input}, {"cloud", cloud}, {"graph_type", graph_type}, {"k", k}, {"points", points},
            {"cloud_seed", cloud_seed}};
  }

  Graph build(double* construct_ms = nullptr) const {
    const int sources = !input.empty() + !cloud.empty() + (points > 0);
    if (sources != 1) throw InputError("give exactly one of --input, --cloud or --points");
    if (!input.empty()) return load_graph_file(input);
    const PointCloud pc = cloud.empty() ? random_point_cloud(points, cloud_seed) : load_point_cloud(cloud);
    const auto start = Clock::now();
    Graph g;
    if (graph_type == "delaunay") g = delaunay_graph(pc);
    else if (graph_type == "knn") g = knn_graph(pc, k);
    else throw InputError("unknown graph type '" + graph_type + "' (expected delaunay or knn)");
    if (construct_ms) *construct_ms = ms_since(start);
    return g;
  }
};

// ---------------------------------------------------------------------------------------------
// layout

struct LayoutCmd {
  GraphSource source;
  LayoutFlags flags;
  std::string out = "layout.json";

  void add(CLI::App* app) {
    source.add(app, false);
    flags.add(app);
    app->add_option("--out", out, "GridLayout JSON output")->capture_default_str();
  }

  int run(Run& r) {
    const LayoutConfig cfg = flags.config();
    r.seed = cfg.seed;
    r.config = {{"source", source.config()}, {"layout", layout_config_json(cfg)}, {"out", out}};
    r.manifest_path = out + ".manifest.json";
    const Graph g = source.build();
    const auto start = Clock::now();
    const GpglRun result = gpgl_run(g, cfg);
    r.timings["gpgl"] = ms_since(start);
    write_text(out, grid_layout_to_json(result.grid) + "\n");
    r.outputs.push_back(out);
    std::cout << "vertices " << g.num_vertices() << "\n"
              << "energy " << csv_number(result.penalized.energy) << "\n"
              << "iterations " << result.kk.iterations << " + " << result.penalized.iterations << "\n"
              << "vertex_loss " << result.grid.vertex_loss_count << "\n"
              << "bbox " << result.grid.bbox.width() << "x" << result.grid.bbox.height() << "\n";
    if (result.initial.fell_back) std::cout << "note: spectral initialization fell back to circular\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------------------------
// hlayout

struct HLayoutCmd {
  GraphSource source;
  LayoutFlags flags;
  std::size_t fanout = 32;
  std::string parent_grid = "16";
  std::string child_grid = "16";
  double max_imbalance = 0.25;
  std::string out = "hlayout.json";
  std::string tree_out;

  void add(CLI::App* app) {
    source.add(app, true);
    flags.add(app);
    app->add_option("--fanout", fanout, "subgraphs per internal node")->capture_default_str();
    app->add_option("--parent-grid", parent_grid, "parent grid, N or WxH")->capture_default_str();
    app->add_option("--child-grid", child_grid, "child grid, N or WxH")->capture_default_str();
    app->add_option("--max-imbalance", max_imbalance, "partition size slack")->capture_default_str();
    app->add_option("--out", out, "assignment JSON output")->capture_default_str();
    app->add_option("--tree-out", tree_out, "PartitionTree JSON output (default: <out>.tree.json)");
  }

  int run(Run& r) {
    HierarchyConfig cfg;
    cfg.fanout = fanout;
    cfg.parent_grid = parse_grid(parent_grid);
    cfg.child_grid = parse_grid(child_grid);
    cfg.max_imbalance = max_imbalance;
    cfg.layout = flags.config();
    const std::string tree_path = tree_out.empty() ? out + ".tree.json" : tree_out;
    r.seed = cfg.layout.seed;
    r.config = {{"source", source.config()},
                {"layout", layout_config_json(cfg.layout)},
                {"fanout", fanout},
                {"parent_grid", {cfg.parent_grid.width, cfg.parent_grid.height}},
                {"child_grid", {cfg.child_grid.width, cfg.child_grid.height}},
                {"max_imbalance", max_imbalance},
                {"out", out},
                {"tree_out", tree_path}};
    r.manifest_path = out + ".manifest.json";
    validate(cfg);
    double construct_ms = 0.0;
    const Graph g = source.build(&construct_ms);
    r.timings["graph_construction"] = construct_ms;
    const auto start = Clock::now();
    const HierarchicalLayout h = hgpgl(g, cfg);
    r.timings["hgpgl"] = ms_since(start);
    r.timings["normalized_cut"] = h.timings.partition_ms;
    r.timings["gpgl"] = h.timings.layout_ms;

    json a;
    a["width"] = h.global.width;
    a["height"] = h.global.height;
    a["depth"] = h.tree.depth;
    json cells = json::array();
    for (const auto& c : h.grid.cells) cells.push_back({c.x, c.y});
    a["cells"] = std::move(cells);
    a["loss"] = h.grid.vertex_loss_count;
    write_text(out, a.dump() + "\n");
    write_text(tree_path, partition_tree_to_json(h.tree) + "\n");
    r.outputs = {out, tree_path};
    std::cout << "vertices " << g.num_vertices() << "\n"
              << "grid " << h.global.width << "x" << h.global.height << "\n"
              << "depth " << h.tree.depth << "\n"
              << "leaves " << h.tree.leaf_count() << "\n"
              << "vertex_loss " << h.grid.vertex_loss_count << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------------------------
// augment

struct Corpus {
  std::string dataset_dir;
  std::string name;
  std::vector<std::string> inputs;
  std::size_t limit = 0;

  void add(CLI::App* app) {
    app->add_option("--dataset", dataset_dir, "directory holding a TU benchmark");
    app->add_option("--name", name, "TU benchmark name, e.g. MUTAG");
    app->add_option("--input", inputs, "graph files forming the corpus");
    app->add_option("--limit", limit, "use only the first N graphs");
  }

  json config() const { return {{"dataset", dataset_dir}, {"name", name}, {"inputs", inputs}, {"limit", limit}}; }

  std::string label() const { return name.empty() ? "graphs" : name; }

  std::vector<Graph> load() const {
    std::vector<Graph> graphs;
    if (!dataset_dir.empty() || !name.empty()) {
      if (dataset_dir.empty() || name.empty()) throw InputError("--dataset and --name go together");
      if (!inputs.empty()) throw InputError("give either --dataset/--name or --input");
      graphs = load_tu_dataset(dataset_dir, name);
    } else {
      if (inputs.empty()) throw InputError("no corpus given (use --dataset/--name or --input)");
      for (const auto& p : inputs) graphs.push_back(load_graph_file(p));
    }
    if (limit > 0 && graphs.size() > limit) graphs.resize(limit);
    return graphs;
  }
};

struct AugmentCmd {
  Corpus corpus;
  LayoutFlags flags;
  std::size_t copies = 1;
  std::string window = "32";
  std::string pooling = "average";
  std::string overflow = "error";
  std::string out_dir = "grids";

  void add(CLI::App* app) {
    corpus.add(app);
    flags.add(app);
    app->add_option("--copies", copies, "layouts per graph (seeds seed..seed+K-1)")->capture_default_str();
    app->add_option("--window", window, "window, N or WxH")->capture_default_str();
    app->add_option("--pooling", pooling, "average or max")->capture_default_str();
    app->add_option("--overflow", overflow, "error or grow")->capture_default_str();
    app->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  }

  int run(Run& r) {
    const LayoutConfig cfg = flags.config();
    ExportConfig ecfg;
    const GridSize w = parse_grid(window);
    ecfg.window_width = w.width;
    ecfg.window_height = w.height;
    ecfg.pooling = parse_pooling(pooling);
    ecfg.overflow = parse_overflow_policy(overflow);
    validate(ecfg);
    if (copies == 0) throw InputError("--copies must be >= 1");
    r.seed = cfg.seed;
    r.config = {{"corpus", corpus.config()}, {"layout", layout_config_json(cfg)}, {"copies", copies},
                {"window", {ecfg.window_width, ecfg.window_height}}, {"pooling", pooling},
                {"overflow", overflow}, {"out_dir", out_dir}};
    r.manifest_path = (fs::path(out_dir) / "manifest.json").string();
    const std::vector<Graph> graphs = corpus.load();
    fs::create_directories(out_dir);

    std::vector<std::vector<FeatureGrid>> grids(graphs.size());
    std::vector<double> item_ms(graphs.size());
    parallel_for(graphs.size(), [&](std::size_t i) {
      const auto start = Clock::now();
      grids[i] = augment(graphs[i], copies, cfg, ecfg);
      item_ms[i] = ms_since(start);
    });
    std::size_t grew = 0;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      for (std::size_t c = 0; c < copies; ++c) {
        const std::string stem = (fs::path(out_dir) / export_stem(corpus.label(), i, cfg.seed + c)).string();
        export_npy(grids[i][c], stem);
        r.outputs.push_back(stem + ".npy");
        r.outputs.push_back(stem + ".json");
        grew += grids[i][c].grew ? 1 : 0;
      }
      r.timings[std::to_string(i)] = item_ms[i];
    }
    r.extra["grown_windows"] = grew;
    std::cout << "graphs " << graphs.size() << "\n"
              << "tensors " << graphs.size() * copies << "\n";
    if (grew > 0) std::cout << "note: " << grew << " windows grew to fit their layouts\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------------------------
// stats

struct StatsCmd {
  Corpus corpus;
  LayoutFlags flags;
  std::vector<std::string> inits{"circular", "random", "spectral"};
  std::string averaging = "per_graph";
  bool no_loss = false;
  std::string out;

  void add(CLI::App* app) {
    corpus.add(app);
    flags.add(app);
    app->add_option("--inits", inits, "initializations for the vertex-loss columns")->capture_default_str();
    app->add_option("--averaging", averaging, "per_graph or pooled")->capture_default_str();
    app->add_flag("--no-loss", no_loss, "skip the vertex-loss columns");
    app->add_option("--out", out, "CSV output (default: standard output)");
  }

  int run(Run& r) {
    const LayoutConfig base = flags.config();
    if (averaging != "per_graph" && averaging != "pooled")
      throw InputError("unknown averaging '" + averaging + "' (expected per_graph or pooled)");
    for (const auto& i : inits) parse_init_strategy(i);
    r.seed = base.seed;
    r.config = {{"corpus", corpus.config()}, {"layout", layout_config_json(base)}, {"inits", inits},
                {"averaging", averaging}, {"no_loss", no_loss}, {"out", out}};
    r.manifest_path = out.empty() ? "stats.manifest.json" : out + ".manifest.json";
    const std::vector<Graph> graphs = corpus.load();
    const CorpusStats st = corpus_stats(graphs);

    std::ostringstream csv;
    csv << "dataset,graphs,classes,avg_nodes,avg_edges,avg_degree,max_degree,max_degree_both_directions,feature_dim";
    if (!no_loss)
      for (const auto& i : inits) csv << ",loss_" << i;
    csv << "\n";
    csv << corpus.label() << "," << st.graphs << "," << st.classes << "," << csv_number(st.avg_nodes) << ","
        << csv_number(st.avg_edges) << "," << csv_number(st.avg_degree) << "," << st.max_degree << ","
        << 2 * st.max_degree << "," << st.feature_dim;
    if (!no_loss) {
      for (const auto& name : inits) {
        LayoutConfig cfg = base;
        cfg.init = parse_init_strategy(name);
        std::vector<GridLayout> layouts(graphs.size());
        const auto start = Clock::now();
        parallel_for(graphs.size(), [&](std::size_t i) { layouts[i] = gpgl(graphs[i], cfg); });
        r.timings["loss_" + name] = ms_since(start);
        const double ratio = vertex_loss_ratio(
            layouts, graphs, averaging == "pooled" ? LossAveraging::pooled : LossAveraging::per_graph);
        csv << "," << csv_number(ratio);
      }
    }
    csv << "\n";
    if (out.empty()) {
      std::cout << csv.str();
    } else {
      write_text(out, csv.str());
      r.outputs.push_back(out);
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------------------------
// render

struct RenderCmd {
  std::string layout_path;
  std::string tree_path;
  std::string graph_path;
  std::string color_by = "auto";
  std::string window;
  int cell_pixels = 8;
  bool edges = false;
  std::string out = "layout.ppm";

  void add(CLI::App* app) {
    app->add_option("--layout", layout_path, "GridLayout JSON (from layout)");
    app->add_option("--tree", tree_path, "PartitionTree JSON (from hlayout)");
    app->add_option("--graph", graph_path, "graph file, for edges and feature colors");
    app->add_option("--color-by", color_by, "feature, part, or auto")->capture_default_str();
    app->add_option("--window", window, "canvas in cells, N or WxH (default: layout extent)");
    app->add_option("--cell-pixels", cell_pixels, "pixels per cell")->capture_default_str();
    app->add_flag("--edges", edges, "draw graph edges");
    app->add_option("--out", out, "image output (.ppm or .png)")->capture_default_str();
  }

  int run(Run& r) {
    r.config = {{"layout", layout_path}, {"tree", tree_path},   {"graph", graph_path}, {"color_by", color_by},
                {"window", window},      {"cell_pixels", cell_pixels}, {"edges", edges}, {"out", out}};
    r.manifest_path = out + ".manifest.json";
    if (layout_path.empty() == tree_path.empty()) throw InputError("give exactly one of --layout or --tree");

    GridLayout layout;
    std::vector<int> parts;
    RenderOptions options;
    options.cell_pixels = cell_pixels;
    options.draw_edges = edges;
    if (!tree_path.empty()) {
      const PartitionTree tree = partition_tree_from_json(read_text(tree_path));
      GridSize global;
      layout = compose_layout(tree, &global);
      options.canvas_width = global.width;
      options.canvas_height = global.height;
      parts = tree.leaf_of(layout.size());
    } else {
      layout = grid_layout_from_json(read_text(layout_path));
    }
    if (!window.empty()) {
      const GridSize w = parse_grid(window);
      options.canvas_width = w.width;
      options.canvas_height = w.height;
    }
    std::optional<Graph> g;
    if (!graph_path.empty()) {
      g = load_graph_file(graph_path);
      if (g->num_vertices() != layout.size()) throw InputError("graph and layout have different vertex counts");
    }
    if (edges && !g) throw InputError("--edges needs --graph");

    std::string mode = color_by;
    if (mode == "auto") mode = !parts.empty() ? "part" : (g && g->has_features() ? "feature" : "none");
    std::vector<int> colors(layout.size(), 0);
    if (mode == "part") {
      if (parts.empty()) throw InputError("--color-by part needs --tree");
      colors = parts;
    } else if (mode == "feature") {
      if (!g || !g->has_features()) throw InputError("--color-by feature needs a graph with features");
      colors = feature_argmax_colors(*g);
    } else if (mode != "none") {
      throw InputError("unknown color mode '" + color_by + "' (expected feature, part, none or auto)");
    }
    const Image img = render_layout(layout, colors, g ? &*g : nullptr, options);
    if (const auto parent = fs::path(out).parent_path(); !parent.empty()) fs::create_directories(parent);
    write_image(out, img);
    r.outputs.push_back(out);
    std::cout << "image " << img.width << "x" << img.height << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------------------------
// bench

struct BenchCmd {
  GraphSource source;
  LayoutFlags flags;
  std::size_t reps = 3;
  std::size_t fanout = 32;
  std::string parent_grid = "16";
  std::string child_grid = "16";
  double max_imbalance = 0.25;
  bool skip_flat = false;
  std::string out;

  void add(CLI::App* app) {
    source.add(app, true);
    flags.add(app);
    app->add_option("--reps", reps, "repetitions per phase")->capture_default_str();
    app->add_option("--fanout", fanout, "subgraphs per internal node")->capture_default_str();
    app->add_option("--parent-grid", parent_grid, "parent grid, N or WxH")->capture_default_str();
    app->add_option("--child-grid", child_grid, "child grid, N or WxH")->capture_default_str();
    app->add_option("--max-imbalance", max_imbalance, "partition size slack")->capture_default_str();
    app->add_flag("--skip-flat", skip_flat, "do not time flat GPGL");
    app->add_option("--out", out, "CSV output (default: standard output)");
  }

  int run(Run& r) {
    if (reps == 0) throw InputError("--reps must be >= 1");
    HierarchyConfig cfg;
    cfg.fanout = fanout;
    cfg.parent_grid = parse_grid(parent_grid);
    cfg.child_grid = parse_grid(child_grid);
    cfg.max_imbalance = max_imbalance;
    cfg.layout = flags.config();
    validate(cfg);
    r.seed = cfg.layout.seed;
    r.config = {{"source", source.config()}, {"layout", layout_config_json(cfg.layout)}, {"reps", reps},
                {"fanout", fanout}, {"parent_grid", {cfg.parent_grid.width, cfg.parent_grid.height}},
                {"child_grid", {cfg.child_grid.width, cfg.child_grid.height}}, {"max_imbalance", max_imbalance},
                {"skip_flat", skip_flat}, {"out", out}};
    r.manifest_path = out.empty() ? "bench.manifest.json" : out + ".manifest.json";

    std::vector<std::pair<std::string, std::vector<double>>> phases{
        {"graph_construction", {}}, {"normalized_cut", {}}, {"hgpgl", {}}, {"gpgl_flat", {}}};
    for (std::size_t rep = 0; rep < reps; ++rep) {
      double construct_ms = 0.0;
      auto start = Clock::now();
      const Graph g = source.build(&construct_ms);
      if (source.input.empty()) phases[0].second.push_back(construct_ms);
      else phases[0].second.push_back(ms_since(start));

      PartitionOptions popts;
      popts.max_imbalance = cfg.max_imbalance;
      start = Clock::now();
      (void)normalized_cut(g, std::min(cfg.fanout, g.num_vertices()), popts);
      phases[1].second.push_back(ms_since(start));

      start = Clock::now();
      (void)hgpgl(g, cfg);
      phases[2].second.push_back(ms_since(start));

      if (!skip_flat) {
        start = Clock::now();
        (void)gpgl(g, cfg.layout);
        phases[3].second.push_back(ms_since(start));
      }
    }

    std::ostringstream csv;
    csv << "phase,mean_ms,std_ms,n\n";
    json summary = json::object();
    for (const auto& [name, samples] : phases) {
      if (samples.empty()) continue;
      double mean = 0.0;
      for (double s : samples) mean += s;
      mean /= static_cast<double>(samples.size());
      double var = 0.0;
      for (double s : samples) var += (s - mean) * (s - mean);
      const double sd = samples.size() > 1 ? std::sqrt(var / static_cast<double>(samples.size() - 1)) : 0.0;
      csv << name << "," << csv_number(mean) << "," << csv_number(sd) << "," << samples.size() << "\n";
      summary[name] = mean;
      r.timings[name] = samples;
    }
    if (out.empty()) {
      std::cout << csv.str();
    } else {
      write_text(out, csv.str());
      r.outputs.push_back(out);
    }
    if (!skip_flat) {
      const double ratio = summary["gpgl_flat"].get<double>() / summary["hgpgl"].get<double>();
      r.extra["speedup_flat_over_hgpgl"] = ratio;
      std::cerr << "speedup " << csv_number(ratio) << "\n";
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------------------------

struct Commands {
  LayoutCmd layout;
  HLayoutCmd hlayout;
  AugmentCmd augment;
  StatsCmd stats;
  RenderCmd render;
  BenchCmd bench;
  std::string manifest;
};

int run_cli(std::vector<std::string> args);

int dispatch(CLI::App& app, Commands& cmds, const std::vector<std::string>& args) {
  // args[0] is the subcommand; everything after it is echoed into the manifest.
  const auto try_run = [&](const std::string& command, auto& cmd) -> int {
    Run r;
    r.command = command;
    r.args.assign(args.begin() + 1, args.end());
    try {
      const int code = cmd.run(r);
      write_manifest(r, "ok", "");
      return code;
    } catch (const SolverError& e) {
      std::cerr << "error: " << e.what() << "\n";
      write_manifest(r, "numeric_failure", e.what());
      return kExitNumeric;
    } catch (const OverflowError& e) {
      std::cerr << "error: " << e.what() << "\n";
      write_manifest(r, "numeric_failure", e.what());
      return kExitNumeric;
    } catch (const InputError& e) {
      std::cerr << "error: " << e.what() << "\n";
      write_manifest(r, "input_error", e.what());
      return kExitInput;
    }
  };
  if (app.got_subcommand("layout")) return try_run("layout", cmds.layout);
  if (app.got_subcommand("hlayout")) return try_run("hlayout", cmds.hlayout);
  if (app.got_subcommand("augment")) return try_run("augment", cmds.augment);
  if (app.got_subcommand("stats")) return try_run("stats", cmds.stats);
  if (app.got_subcommand("render")) return try_run("render", cmds.render);
  if (app.got_subcommand("bench")) return try_run("bench", cmds.bench);
  if (app.got_subcommand("rerun")) {
    const json m = json::parse(read_text(cmds.manifest));
    if (m.at("schema_version").get<int>() != kManifestSchema) throw InputError("unsupported manifest schema");
    std::vector<std::string> replay{m.at("command").get<std::string>()};
    for (const auto& a : m.at("args")) replay.push_back(a.get<std::string>());
    const fs::path previous = fs::current_path();
    fs::current_path(m.at("cwd").get<std::string>());
    const int code = run_cli(replay);
    fs::current_path(previous);
    return code;
  }
  std::cerr << app.help();
  return kExitInput;
}

int run_cli(std::vector<std::string> args) {
  CLI::App app{"Graph-preserving grid layouts", "gridlay"};
  app.set_version_flag("--version", GRIDLAY_VERSION);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (default: GRIDLAY_THREADS or all cores)");
  app.require_subcommand(1);

  Commands cmds;
  cmds.layout.add(app.add_subcommand("layout", "lay out one graph on the grid"));
  cmds.hlayout.add(app.add_subcommand("hlayout", "hierarchical layout of a large graph"));
  cmds.augment.add(app.add_subcommand("augment", "export augmented feature grids of a corpus as NPY"));
  cmds.stats.add(app.add_subcommand("stats", "corpus statistics and vertex-loss ratios as CSV"));
  cmds.render.add(app.add_subcommand("render", "draw a layout or partition tree to PPM or PNG"));
  cmds.bench.add(app.add_subcommand("bench", "time graph construction, normalized cut and layouts"));
  app.add_subcommand("rerun", "repeat a run from its manifest")
      ->add_option("manifest", cmds.manifest, "manifest JSON")
      ->required();

  // --threads may appear before or after the subcommand.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  if (threads > 0) set_thread_count(threads);

  // Drop a leading --threads so args[0] is the subcommand name for the manifest.
  std::vector<std::string> sub_args;
  bool seen = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!seen && (args[i] == "--threads")) {
      ++i;
      continue;
    }
    if (!seen && args[i].rfind("--threads=", 0) == 0) continue;
    seen = true;
    sub_args.push_back(args[i]);
  }
  // --threads never changes results, so it is not echoed into the manifest either.
  std::vector<std::string> echoed;
  for (std::size_t i = 0; i < sub_args.size(); ++i) {
    if (i > 0 && sub_args[i] == "--threads") {
      ++i;
      continue;
    }
    if (i > 0 && sub_args[i].rfind("--threads=", 0) == 0) continue;
    echoed.push_back(sub_args[i]);
  }
  try {
    return dispatch(app, cmds, echoed);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: manifest: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

} // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(std::move(args));
}
