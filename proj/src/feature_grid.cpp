#include "gridlay/feature_grid.hpp"

#include "gridlay/error.hpp"
#include "gridlay/parallel.hpp"

#include <algorithm>

namespace gridlay {

std::string to_string(Pooling p) { return p == Pooling::max ? "max" : "average"; }

Pooling parse_pooling(const std::string& name) {
  if (name == "average") return Pooling::average;
  if (name == "max") return Pooling::max;
  throw InputError("unknown pooling '" + name + "' (expected average or max)");
}

std::string to_string(OverflowPolicy p) { return p == OverflowPolicy::grow ? "grow" : "error"; }

OverflowPolicy parse_overflow_policy(const std::string& name) {
  if (name == "error") return OverflowPolicy::error;
  if (name == "grow") return OverflowPolicy::grow;
  throw InputError("unknown overflow policy '" + name + "' (expected error or grow)");
}

void validate(const ExportConfig& cfg) {
  if (cfg.window_height < 1 || cfg.window_width < 1) throw InputError("window dimensions must be >= 1");
}

FeatureGrid to_feature_grid(const Graph& g, const GridLayout& layout, const ExportConfig& cfg) {
  validate(cfg);
  const std::size_t n = g.num_vertices();
  if (!g.has_features()) throw InputError("feature export needs vertex features");
  if (layout.size() != n) throw InputError("layout does not cover the graph's vertices");

  FeatureGrid out;
  out.channels = g.feature_dim();
  out.graph_label = g.graph_label();
  out.height = static_cast<std::size_t>(cfg.window_height);
  out.width = static_cast<std::size_t>(cfg.window_width);
  if (n > 0) {
    const int need_w = layout.bbox.width();
    const int need_h = layout.bbox.height();
    if (need_w > cfg.window_width || need_h > cfg.window_height) {
      if (cfg.overflow == OverflowPolicy::error)
        throw OverflowError("layout needs a " + std::to_string(need_h) + "x" + std::to_string(need_w) +
                                " window (height x width) but the window is " + std::to_string(cfg.window_height) +
                                "x" + std::to_string(cfg.window_width),
                            need_w, need_h);
      out.height = std::max(out.height, static_cast<std::size_t>(need_h));
      out.width = std::max(out.width, static_cast<std::size_t>(need_w));
      out.grew = true;
    }
  }

  out.data.assign(out.height * out.width * out.channels, 0.0f);
  out.mask.assign(out.height * out.width, 0);
  out.assignment.reserve(n);
  for (const auto& c : layout.cells) out.assignment.push_back({c.x - layout.bbox.min_x, c.y - layout.bbox.min_y});

  const auto& features = g.features();
  std::vector<double> acc(out.channels);
  for (const auto& [cell, members] : layout.occupancy) {
    const auto row = static_cast<std::size_t>(cell.y - layout.bbox.min_y);
    const auto col = static_cast<std::size_t>(cell.x - layout.bbox.min_x);
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t f = 0; f < out.channels; ++f) {
      if (cfg.pooling == Pooling::max) {
        double m = features(members.front(), static_cast<Eigen::Index>(f));
        for (int v : members) m = std::max(m, features(v, static_cast<Eigen::Index>(f)));
        acc[f] = m;
      } else {
        for (int v : members) acc[f] += features(v, static_cast<Eigen::Index>(f));
        acc[f] /= static_cast<double>(members.size());
      }
      out.at(row, col, f) = static_cast<float>(acc[f]);
    }
    out.mask[row * out.width + col] = 1;
    if (members.size() > 1)
      out.pooled_cells.push_back({cell.x - layout.bbox.min_x, cell.y - layout.bbox.min_y});
  }
  return out;
}

std::vector<FeatureGrid> augment(const Graph& g, std::size_t k, const LayoutConfig& cfg,
                                 const ExportConfig& export_cfg) {
  if (k == 0) throw InputError("augment needs at least one copy");
  validate(cfg);
  validate(export_cfg);
  std::vector<FeatureGrid> out(k);
  parallel_for(k, [&](std::size_t i) {
    LayoutConfig c = cfg;
    c.seed = cfg.seed + i;
    out[i] = to_feature_grid(g, gpgl(g, c), export_cfg);
  });
  return out;
}

} // namespace gridlay
