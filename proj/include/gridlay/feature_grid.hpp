#pragma once

#include "gridlay/graph.hpp"
#include "gridlay/layout.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gridlay {

enum class Pooling { average, max };
enum class OverflowPolicy { error, grow };

std::string to_string(Pooling p);
Pooling parse_pooling(const std::string& name);
std::string to_string(OverflowPolicy p);
OverflowPolicy parse_overflow_policy(const std::string& name);

struct ExportConfig {
  int window_height = 32;
  int window_width = 32;
  Pooling pooling = Pooling::average;
  OverflowPolicy overflow = OverflowPolicy::error;
};

void validate(const ExportConfig& cfg);

/// H x W x F float tensor. Cell (x, y) is row y, column x; data is C-ordered.
struct FeatureGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<float> data;
  std::vector<std::uint8_t> mask; ///< H x W, 1 where some vertex sits
  std::vector<Cell> assignment;   ///< per vertex, after alignment to the top-left corner
  std::vector<Cell> pooled_cells; ///< cells holding more than one vertex, ascending by (x, y)
  std::optional<int> graph_label;
  bool grew = false; ///< the window was enlarged to fit the layout

  float& at(std::size_t row, std::size_t col, std::size_t f) { return data[(row * width + col) * channels + f]; }
  float at(std::size_t row, std::size_t col, std::size_t f) const { return data[(row * width + col) * channels + f]; }

  /// Compares the exported content; `grew` is not part of it.
  friend bool operator==(const FeatureGrid& a, const FeatureGrid& b) {
    return a.height == b.height && a.width == b.width && a.channels == b.channels && a.data == b.data &&
           a.mask == b.mask && a.assignment == b.assignment && a.pooled_cells == b.pooled_cells &&
           a.graph_label == b.graph_label;
  }
};

/// Aligns the layout's bounding box to the top-left corner of the window and writes each
/// vertex feature vector at its cell, pooling vertices that share a cell. Unoccupied cells
/// stay zero.
///
/// Throws InputError when g has no features or the layout does not match g, and
/// OverflowError (with the required size) when the layout exceeds the window under
/// OverflowPolicy::error.
FeatureGrid to_feature_grid(const Graph& g, const GridLayout& layout, const ExportConfig& cfg = {});

/// k layouts of g with seeds cfg.seed, ..., cfg.seed + k - 1, each exported with `export_cfg`.
std::vector<FeatureGrid> augment(const Graph& g, std::size_t k, const LayoutConfig& cfg,
                                 const ExportConfig& export_cfg = {});

} // namespace gridlay
