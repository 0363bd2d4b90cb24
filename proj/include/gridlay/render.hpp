#pragma once

#include "gridlay/graph.hpp"
#include "gridlay/layout.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gridlay {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb; ///< row-major, 3 bytes per pixel
};

struct RenderOptions {
  int canvas_width = 0;  ///< in cells; 0 means the layout's extent
  int canvas_height = 0; ///< in cells; 0 means the layout's extent
  int cell_pixels = 8;
  bool draw_edges = false;
};

/// Fixed palette entry for a color index (index < 0 gives the background).
std::array<std::uint8_t, 3> palette_color(int index);

/// Paints each occupied cell of `layout` with the color of its lowest-indexed occupant
/// (`color_of[v]`), optionally drawing g's edges between cell centers on top.
Image render_layout(const GridLayout& layout, const std::vector<int>& color_of, const Graph* g,
                    const RenderOptions& options = {});

/// Color index per vertex: argmax of its feature vector (ties to the first), or 0 without features.
std::vector<int> feature_argmax_colors(const Graph& g);

std::string encode_ppm(const Image& image);
/// Writes PNG for ".png" paths and binary PPM otherwise.
void write_image(const std::string& path, const Image& image);

} // namespace gridlay
