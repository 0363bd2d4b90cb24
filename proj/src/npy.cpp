#include "gridlay/npy.hpp"

#include "gridlay/error.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

namespace gridlay {

static_assert(std::endian::native == std::endian::little, "NPY payloads are written in native (little-endian) order");

namespace {

constexpr char kMagic[] = "\x93NUMPY";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path);
}

std::size_t element_count(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

} // namespace

std::string encode_npy(const NpyArray& array) {
  if (element_count(array.shape) != array.data.size()) throw InputError("NPY shape does not match data size");
  std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < array.shape.size(); ++i) {
    dict += std::to_string(array.shape[i]);
    if (array.shape.size() == 1 || i + 1 < array.shape.size()) dict += ",";
    if (i + 1 < array.shape.size()) dict += " ";
  }
  dict += "), }";
  const std::size_t unpadded = 10 + dict.size() + 1;
  dict.append((64 - unpadded % 64) % 64, ' ');
  dict += '\n';
  if (dict.size() > 0xffff) throw InputError("NPY header too long for version 1.0");

  std::string out(kMagic, 6);
  out += '\x01';
  out += '\x00';
  out += static_cast<char>(dict.size() & 0xff);
  out += static_cast<char>((dict.size() >> 8) & 0xff);
  out += dict;
  const std::size_t payload = array.data.size() * sizeof(float);
  const std::size_t offset = out.size();
  out.resize(offset + payload);
  if (payload > 0) std::memcpy(out.data() + offset, array.data.data(), payload);
  return out;
}

NpyArray decode_npy(const std::string& bytes) {
  if (bytes.size() < 10 || bytes.compare(0, 6, kMagic, 6) != 0) throw InputError("not an NPY file (bad magic)");
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t header_start = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    header_start = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw InputError("truncated NPY header");
    for (int i = 3; i >= 0; --i) header_len = (header_len << 8) | static_cast<unsigned char>(bytes[8 + static_cast<std::size_t>(i)]);
    header_start = 12;
  } else {
    throw InputError("unsupported NPY version " + std::to_string(major));
  }
  if (bytes.size() < header_start + header_len) throw InputError("truncated NPY header");
  const std::string header = bytes.substr(header_start, header_len);

  std::smatch m;
  if (!std::regex_search(header, m, std::regex(R"('descr'\s*:\s*'([^']*)')")) || m[1] != "<f4")
    throw InputError("NPY dtype must be '<f4'");
  if (!std::regex_search(header, m, std::regex(R"('fortran_order'\s*:\s*(True|False))")) || m[1] != "False")
    throw InputError("NPY arrays must be C-ordered");
  if (!std::regex_search(header, m, std::regex(R"('shape'\s*:\s*\(([^)]*)\))")))
    throw InputError("NPY header has no shape");

  NpyArray out;
  const std::string dims = m[1];
  const std::regex number(R"(\d+)");
  for (auto it = std::sregex_iterator(dims.begin(), dims.end(), number); it != std::sregex_iterator(); ++it)
    out.shape.push_back(std::stoull(it->str()));
  const std::size_t count = element_count(out.shape);
  const std::size_t offset = header_start + header_len;
  if (bytes.size() != offset + count * sizeof(float))
    throw InputError("NPY payload has " + std::to_string(bytes.size() - offset) + " bytes, expected " +
                     std::to_string(count * sizeof(float)));
  out.data.resize(count);
  if (count > 0) std::memcpy(out.data.data(), bytes.data() + offset, count * sizeof(float));
  return out;
}

void write_npy(const std::string& path, const NpyArray& array) { write_file(path, encode_npy(array)); }

NpyArray read_npy(const std::string& path) {
  try {
    return decode_npy(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string grid_sidecar_json(const FeatureGrid& grid) {
  nlohmann::json j;
  nlohmann::json runs = nlohmann::json::array();
  std::uint8_t current = 0;
  std::size_t run = 0;
  for (auto bit : grid.mask) {
    if (bit != current) {
      runs.push_back(run);
      current = bit;
      run = 0;
    }
    ++run;
  }
  runs.push_back(run);
  j["mask_rle"] = std::move(runs);
  nlohmann::json assignment = nlohmann::json::array();
  for (const auto& c : grid.assignment) assignment.push_back({c.x, c.y});
  j["assignment"] = std::move(assignment);
  nlohmann::json pooled = nlohmann::json::array();
  for (const auto& c : grid.pooled_cells) pooled.push_back({c.x, c.y});
  j["pooled_cells"] = std::move(pooled);
  j["graph_label"] = grid.graph_label ? nlohmann::json(*grid.graph_label) : nlohmann::json(nullptr);
  return j.dump();
}

void export_npy(const FeatureGrid& grid, const std::string& stem) {
  write_npy(stem + ".npy", NpyArray{{grid.height, grid.width, grid.channels}, grid.data});
  write_file(stem + ".json", grid_sidecar_json(grid));
}

FeatureGrid parse_feature_grid(const std::string& npy_bytes, const std::string& sidecar_json) {
  NpyArray array = decode_npy(npy_bytes);
  if (array.shape.size() != 3) throw InputError("feature grid tensors must have shape (H, W, F)");
  FeatureGrid grid;
  grid.height = array.shape[0];
  grid.width = array.shape[1];
  grid.channels = array.shape[2];
  grid.data = std::move(array.data);
  try {
    const auto j = nlohmann::json::parse(sidecar_json);
    grid.mask.reserve(grid.height * grid.width);
    std::uint8_t current = 0;
    for (const auto& run : j.at("mask_rle")) {
      grid.mask.insert(grid.mask.end(), run.get<std::size_t>(), current);
      current ^= 1;
    }
    if (grid.mask.size() != grid.height * grid.width) throw InputError("sidecar mask does not match the tensor shape");
    for (const auto& c : j.at("assignment")) grid.assignment.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    for (const auto& c : j.at("pooled_cells")) grid.pooled_cells.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    if (!j.at("graph_label").is_null()) grid.graph_label = j.at("graph_label").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("feature grid sidecar: ") + e.what());
  }
  return grid;
}

FeatureGrid import_npy(const std::string& stem) {
  try {
    return parse_feature_grid(read_file(stem + ".npy"), read_file(stem + ".json"));
  } catch (const InputError& e) {
    throw InputError(stem + ": " + e.what());
  }
}

std::string export_stem(const std::string& dataset, std::size_t graph_id, std::uint64_t seed) {
  return dataset + "_" + std::to_string(graph_id) + "_" + std::to_string(seed);
}

} // namespace gridlay
