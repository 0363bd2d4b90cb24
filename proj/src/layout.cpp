#include "gridlay/layout.hpp"

#include "gridlay/error.hpp"
#include "gridlay/laplacian_eigen.hpp"
#include "gridlay/lbfgs.hpp"
#include "gridlay/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

namespace gridlay {

std::string to_string(InitStrategy s) {
  switch (s) {
  case InitStrategy::circular: return "circular";
  case InitStrategy::spectral: return "spectral";
  case InitStrategy::random: return "random";
  }
  return "circular";
}

InitStrategy parse_init_strategy(const std::string& name) {
  if (name == "circular") return InitStrategy::circular;
  if (name == "spectral") return InitStrategy::spectral;
  if (name == "random") return InitStrategy::random;
  throw InputError("unknown init strategy '" + name + "' (expected circular, spectral or random)");
}

void validate(const LayoutConfig& cfg) {
  if (!(cfg.alpha > 0.0)) throw InputError("alpha must be > 0");
  if (!(cfg.lambda >= 0.0)) throw InputError("lambda must be >= 0");
  if (!(cfg.grad_tol > 0.0)) throw InputError("grad_tol must be > 0");
}

GridLayout make_grid_layout(std::vector<Cell> cells) {
  GridLayout out;
  out.cells = std::move(cells);
  if (out.cells.empty()) return out;
  out.bbox = {out.cells[0].x, out.cells[0].y, out.cells[0].x, out.cells[0].y};
  for (std::size_t v = 0; v < out.cells.size(); ++v) {
    const Cell c = out.cells[v];
    out.occupancy[c].push_back(static_cast<int>(v));
    out.bbox.min_x = std::min(out.bbox.min_x, c.x);
    out.bbox.min_y = std::min(out.bbox.min_y, c.y);
    out.bbox.max_x = std::max(out.bbox.max_x, c.x);
    out.bbox.max_y = std::max(out.bbox.max_y, c.y);
  }
  out.vertex_loss_count = out.cells.size() - out.occupancy.size();
  return out;
}

GridLayout round_layout(const Coords& coords) {
  const auto n = coords.rows();
  std::vector<Cell> cells(static_cast<std::size_t>(n));
  if (n == 0) return make_grid_layout(std::move(cells));
  const double min_x = coords.col(0).minCoeff();
  const double min_y = coords.col(1).minCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    // std::round rounds halfway cases away from zero.
    cells[static_cast<std::size_t>(i)] = {static_cast<int>(std::round(coords(i, 0) - min_x)),
                                          static_cast<int>(std::round(coords(i, 1) - min_y))};
  }
  return make_grid_layout(std::move(cells));
}

Coords circular_layout(std::span<const int> order) {
  const auto n = order.size();
  Coords x(static_cast<Eigen::Index>(n), 2);
  const double radius = static_cast<double>(n) / (2.0 * std::numbers::pi);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    x(order[k], 0) = radius * std::cos(angle);
    x(order[k], 1) = radius * std::sin(angle);
  }
  return x;
}

std::vector<int> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return order;
}

namespace {

double mean_pairwise_distance(const Coords& x) {
  const auto n = x.rows();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) sum += (x.row(i) - x.row(j)).norm();
  return n > 1 ? sum / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1)) : 0.0;
}

double mean_graph_distance(const DistanceMatrix& s) {
  const auto n = s.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum += s(i, j);
  return n > 1 ? sum / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1)) : 0.0;
}

std::optional<Coords> spectral_coords(const Graph& g, const DistanceMatrix& s) {
  const std::size_t n = g.num_vertices();
  if (n < 3) return std::nullopt;
  const Eigen::MatrixXd nulls = component_indicator_basis(g);
  if (static_cast<std::size_t>(nulls.cols()) + 2 > n) return std::nullopt;
  const EigenPairs pairs = smallest_eigenpairs(combinatorial_laplacian(g), nulls, 2);
  Coords x(static_cast<Eigen::Index>(n), 2);
  x.col(0) = pairs.vectors.col(0);
  x.col(1) = pairs.vectors.col(1);
  const double current = mean_pairwise_distance(x);
  if (!(current > 0.0) || !std::isfinite(current)) return std::nullopt;
  x *= mean_graph_distance(s) / current;
  return x;
}

ContinuousLayout init_with_distances(const Graph& g, InitStrategy strategy, std::uint64_t seed,
                                     const DistanceMatrix& s) {
  const std::size_t n = g.num_vertices();
  ContinuousLayout out;
  switch (strategy) {
  case InitStrategy::spectral:
    if (auto x = spectral_coords(g, s)) {
      out.coords = std::move(*x);
      return out;
    }
    out.fell_back = true;
    [[fallthrough]];
  case InitStrategy::circular: {
    const auto order = shuffled_order(n, seed);
    out.coords = circular_layout(order);
    return out;
  }
  case InitStrategy::random: {
    Rng rng(seed);
    const double side = std::sqrt(static_cast<double>(n));
    out.coords.resize(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
      out.coords(i, 0) = side * rng.uniform();
      out.coords(i, 1) = side * rng.uniform();
    }
    return out;
  }
  }
  return out;
}

ContinuousLayout run_minimizer(const Coords& start, const DistanceMatrix& s, double alpha, double lambda,
                               std::size_t max_iters, double grad_tol) {
  MinimizeOptions opts;
  opts.max_iterations = max_iters;
  opts.grad_tol = grad_tol;
  std::vector<double> x0(start.data(), start.data() + start.size());
  const auto objective = [&](std::span<const double> x, std::span<double> grad) {
    return gpgl_value_and_gradient(x, s, alpha, lambda, grad);
  };
  MinimizeResult r = minimize(objective, std::move(x0), opts);
  ContinuousLayout out;
  out.coords = Eigen::Map<const Coords>(r.x.data(), start.rows(), 2);
  out.energy = r.value;
  out.converged = r.converged;
  out.iterations = r.iterations;
  return out;
}

} // namespace

ContinuousLayout init_layout(const Graph& g, InitStrategy strategy, std::uint64_t seed) {
  if (strategy == InitStrategy::spectral) return init_with_distances(g, strategy, seed, shortest_path_distances(g));
  return init_with_distances(g, strategy, seed, DistanceMatrix());
}

GpglRun gpgl_run(const Graph& g, const LayoutConfig& cfg) {
  validate(cfg);
  const std::size_t n = g.num_vertices();
  if (n == 0) throw InputError("gpgl needs at least one vertex");
  GpglRun run;
  if (n == 1) {
    run.initial.coords = Coords::Zero(1, 2);
    run.kk = run.initial;
    run.penalized = run.initial;
    run.grid = make_grid_layout({Cell{0, 0}});
    return run;
  }
  const DistanceMatrix s = shortest_path_distances(g);
  run.initial = init_with_distances(g, cfg.init, cfg.seed, s);
  run.kk = run_minimizer(run.initial.coords, s, cfg.alpha, 0.0, cfg.max_iters_kk, cfg.grad_tol);
  run.kk.fell_back = run.initial.fell_back;
  run.warm_start_energy = kk_energy(run.kk.coords, s) + separation_penalty(run.kk.coords, cfg.alpha, cfg.lambda);
  run.penalized = run_minimizer(run.kk.coords, s, cfg.alpha, cfg.lambda, cfg.max_iters_gpgl, cfg.grad_tol);
  run.penalized.fell_back = run.initial.fell_back;
  run.grid = round_layout(run.penalized.coords);
  return run;
}

GridLayout gpgl(const Graph& g, const LayoutConfig& cfg) { return gpgl_run(g, cfg).grid; }

double vertex_loss_ratio(std::span<const GridLayout> layouts, std::span<const Graph> graphs,
                         LossAveraging averaging) {
  if (layouts.empty()) throw InputError("vertex_loss_ratio needs at least one layout");
  if (layouts.size() != graphs.size()) throw InputError("vertex_loss_ratio: layouts and graphs are not aligned");
  double per_graph_sum = 0.0;
  double lost = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < layouts.size(); ++i) {
    const auto n = graphs[i].num_vertices();
    if (layouts[i].size() != n)
      throw InputError("vertex_loss_ratio: layout " + std::to_string(i) + " does not match its graph");
    if (n == 0) continue;
    const auto loss = static_cast<double>(layouts[i].vertex_loss_count);
    per_graph_sum += loss / static_cast<double>(n);
    lost += loss;
    total += static_cast<double>(n);
  }
  if (averaging == LossAveraging::pooled) return total > 0.0 ? 100.0 * lost / total : 0.0;
  return 100.0 * per_graph_sum / static_cast<double>(layouts.size());
}

std::string grid_layout_to_json(const GridLayout& layout) {
  nlohmann::json j;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : layout.cells) cells.push_back({c.x, c.y});
  j["cells"] = std::move(cells);
  j["loss"] = layout.vertex_loss_count;
  j["bbox"] = {layout.bbox.min_x, layout.bbox.min_y, layout.bbox.max_x, layout.bbox.max_y};
  return j.dump();
}

GridLayout grid_layout_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    std::vector<Cell> cells;
    for (const auto& c : j.at("cells")) cells.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    return make_grid_layout(std::move(cells));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("grid layout JSON: ") + e.what());
  }
}

} // namespace gridlay
