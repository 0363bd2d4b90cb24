#include "gridlay/render.hpp"

#include "gridlay/error.hpp"

#include <png.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

namespace gridlay {

std::array<std::uint8_t, 3> palette_color(int index) {
  if (index < 0) return {255, 255, 255};
  // Golden-angle hue walk, fixed saturation and value.
  const double h = std::fmod(static_cast<double>(index) * 0.618033988749895, 1.0) * 6.0;
  const double s = 0.65;
  const double v = 0.9;
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r = v, g = t, b = p;
  switch (sector) {
  case 0: r = v; g = t; b = p; break;
  case 1: r = q; g = v; b = p; break;
  case 2: r = p; g = v; b = t; break;
  case 3: r = p; g = q; b = v; break;
  case 4: r = t; g = p; b = v; break;
  default: r = v; g = p; b = q; break;
  }
  const auto byte = [](double x) { return static_cast<std::uint8_t>(std::lround(255.0 * x)); };
  return {byte(r), byte(g), byte(b)};
}

std::vector<int> feature_argmax_colors(const Graph& g) {
  std::vector<int> out(g.num_vertices(), 0);
  if (!g.has_features()) return out;
  const auto& f = g.features();
  for (Eigen::Index v = 0; v < f.rows(); ++v) {
    Eigen::Index best = 0;
    f.row(v).maxCoeff(&best);
    out[static_cast<std::size_t>(v)] = static_cast<int>(best);
  }
  return out;
}

namespace {

void set_pixel(Image& img, int x, int y, std::array<std::uint8_t, 3> c) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  const auto at = (static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) + static_cast<std::size_t>(x)) * 3;
  img.rgb[at] = c[0];
  img.rgb[at + 1] = c[1];
  img.rgb[at + 2] = c[2];
}

void draw_line(Image& img, int x0, int y0, int x1, int y1, std::array<std::uint8_t, 3> c) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    set_pixel(img, x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

} // namespace

Image render_layout(const GridLayout& layout, const std::vector<int>& color_of, const Graph* g,
                    const RenderOptions& options) {
  if (options.cell_pixels < 1) throw InputError("cell size must be at least one pixel");
  if (color_of.size() != layout.size()) throw InputError("render: one color index per vertex is required");
  int cw = options.canvas_width;
  int ch = options.canvas_height;
  if (layout.size() > 0) {
    if (layout.bbox.min_x < 0 || layout.bbox.min_y < 0) throw InputError("render: layout has negative cells");
    cw = std::max(cw, layout.bbox.max_x + 1);
    ch = std::max(ch, layout.bbox.max_y + 1);
  }
  cw = std::max(cw, 1);
  ch = std::max(ch, 1);
  const int px = options.cell_pixels;
  Image img;
  img.width = cw * px;
  img.height = ch * px;
  img.rgb.assign(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) * 3, 255);

  for (const auto& [cell, members] : layout.occupancy) {
    const auto color = palette_color(color_of[static_cast<std::size_t>(members.front())]);
    for (int y = 0; y < px; ++y)
      for (int x = 0; x < px; ++x) set_pixel(img, cell.x * px + x, cell.y * px + y, color);
  }
  if (options.draw_edges && g != nullptr) {
    if (g->num_vertices() != layout.size()) throw InputError("render: graph does not match the layout");
    for (const auto& e : g->edges()) {
      const Cell a = layout.cells[static_cast<std::size_t>(e.u)];
      const Cell b = layout.cells[static_cast<std::size_t>(e.v)];
      draw_line(img, a.x * px + px / 2, a.y * px + px / 2, b.x * px + px / 2, b.y * px + px / 2, {40, 40, 40});
    }
  }
  return img;
}

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
  return out;
}

namespace {

void write_png(const std::string& path, const Image& image) {
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) throw Error("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG encoding failed for " + path);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y)
    png_write_row(png, image.rgb.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(image.width) * 3);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

} // namespace

void write_image(const std::string& path, const Image& image) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".png") == 0) {
    write_png(path, image);
    return;
  }
  const std::string bytes = encode_ppm(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path);
}

} // namespace gridlay
