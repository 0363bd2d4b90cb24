#include "gridlay/pointcloud.hpp"

#include "gridlay/error.hpp"
#include "gridlay/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

namespace gridlay {

PointCloud parse_xyz(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::array<double, 3>> pts;
  std::vector<int> labels;
  std::optional<bool> has_labels;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    const auto fail = [&](const std::string& why) {
      throw InputError("xyz line " + std::to_string(line_no) + ": " + why);
    };
    if (tokens.size() != 3 && tokens.size() != 4) fail("expected 3 or 4 columns, got " + std::to_string(tokens.size()));
    const bool labelled = tokens.size() == 4;
    if (has_labels && *has_labels != labelled) fail("label column present on some lines only");
    has_labels = labelled;
    std::array<double, 3> p{};
    for (std::size_t c = 0; c < 3; ++c) {
      std::size_t used = 0;
      try {
        p[c] = std::stod(tokens[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tokens[c].size() || !std::isfinite(p[c])) fail("bad coordinate '" + tokens[c] + "'");
    }
    pts.push_back(p);
    if (labelled) {
      std::size_t used = 0;
      int label = 0;
      try {
        label = std::stoi(tokens[3], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tokens[3].size()) fail("bad label '" + tokens[3] + "'");
      labels.push_back(label);
    }
  }
  if (pts.empty()) throw InputError("point cloud has no points");
  PointCloud pc;
  pc.points.resize(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t c = 0; c < 3; ++c) pc.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = pts[i][c];
  if (has_labels.value_or(false)) pc.labels = std::move(labels);
  return pc;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

PointCloud load_xyz(const std::string& path) {
  try {
    return parse_xyz(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

PointCloud load_point_binary(const std::string& path) {
  static_assert(std::endian::native == std::endian::little);
  const std::string bytes = read_file(path);
  if (bytes.size() < 8) throw InputError(path + ": truncated point cloud header");
  std::uint64_t n = 0;
  std::memcpy(&n, bytes.data(), 8);
  if (n == 0) throw InputError(path + ": point cloud has no points");
  const std::size_t coords = 12 * n;
  const bool labelled = bytes.size() == 8 + coords + 4 * n;
  if (bytes.size() != 8 + coords && !labelled)
    throw InputError(path + ": size does not match " + std::to_string(n) + " points");
  PointCloud pc;
  pc.points.resize(static_cast<Eigen::Index>(n), 3);
  std::vector<float> buf(3 * n);
  std::memcpy(buf.data(), bytes.data() + 8, coords);
  for (std::size_t i = 0; i < 3 * n; ++i) {
    if (!std::isfinite(buf[i])) throw InputError(path + ": non-finite coordinate at point " + std::to_string(i / 3));
    pc.points(static_cast<Eigen::Index>(i / 3), static_cast<Eigen::Index>(i % 3)) = buf[i];
  }
  if (labelled) {
    std::vector<std::int32_t> labels(n);
    std::memcpy(labels.data(), bytes.data() + 8 + coords, 4 * n);
    pc.labels = std::vector<int>(labels.begin(), labels.end());
  }
  return pc;
}

void save_point_binary(const std::string& path, const PointCloud& pc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  const std::uint64_t n = pc.size();
  out.write(reinterpret_cast<const char*>(&n), 8);
  for (Eigen::Index i = 0; i < pc.points.rows(); ++i)
    for (Eigen::Index c = 0; c < 3; ++c) {
      const auto f = static_cast<float>(pc.points(i, c));
      out.write(reinterpret_cast<const char*>(&f), 4);
    }
  if (pc.labels)
    for (int label : *pc.labels) {
      const auto v = static_cast<std::int32_t>(label);
      out.write(reinterpret_cast<const char*>(&v), 4);
    }
  if (!out) throw Error("write failed for " + path);
}

PointCloud load_point_cloud(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0) return load_point_binary(path);
  return load_xyz(path);
}

PointCloud normalized(const PointCloud& pc) {
  PointCloud out = pc;
  if (pc.size() == 0) return out;
  const Eigen::RowVector3d lo = pc.points.colwise().minCoeff();
  const Eigen::RowVector3d hi = pc.points.colwise().maxCoeff();
  out.points.rowwise() -= 0.5 * (lo + hi);
  const double diagonal = (hi - lo).norm();
  if (diagonal > 0.0) out.points /= diagonal;
  return out;
}

PointCloud random_point_cloud(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  PointCloud pc;
  pc.points.resize(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i)
    for (Eigen::Index c = 0; c < 3; ++c) pc.points(i, c) = rng.uniform();
  return pc;
}

Graph knn_graph(const PointCloud& pc, std::size_t k) {
  const std::size_t n = pc.size();
  if (k < 1 || k >= n)
    throw InputError("knn_graph needs 1 <= k < n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  std::vector<Edge> edges;
  edges.reserve(n * k);
  std::vector<std::pair<double, int>> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    candidates.clear();
    const auto row = pc.points.row(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      candidates.emplace_back((pc.points.row(static_cast<Eigen::Index>(j)) - row).squaredNorm(), static_cast<int>(j));
    }
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end());
    for (std::size_t t = 0; t < k; ++t) {
      const int j = candidates[t].second;
      edges.push_back({std::min(static_cast<int>(i), j), std::max(static_cast<int>(i), j)});
    }
  }
  Graph g(n, std::move(edges));
  g.set_features(normalized(pc).points);
  if (pc.labels) g.set_labels(*pc.labels);
  return g;
}

Graph delaunay_graph(const PointCloud& pc) {
  Graph g = delaunay_triangulation(pc).graph;
  g.set_features(normalized(pc).points);
  if (pc.labels) g.set_labels(*pc.labels);
  return g;
}

} // namespace gridlay
