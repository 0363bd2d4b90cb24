#include "gridlay/error.hpp"
#include "gridlay/npy.hpp"
#include "gridlay/rng.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>

using namespace gridlay;

namespace {

std::string to_hex(const std::string& bytes) {
  static const char digits[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : bytes) {
    out += digits[c >> 4];
    out += digits[c & 15];
  }
  return out;
}

FeatureGrid random_grid(Rng& rng) {
  FeatureGrid g;
  g.height = 1 + rng.below(40);
  g.width = 1 + rng.below(40);
  g.channels = 1 + rng.below(8);
  g.data.resize(g.height * g.width * g.channels);
  g.mask.resize(g.height * g.width);
  for (std::size_t cell = 0; cell < g.mask.size(); ++cell) {
    g.mask[cell] = rng.uniform() < 0.3;
    if (g.mask[cell])
      for (std::size_t f = 0; f < g.channels; ++f) {
        // Arbitrary bit patterns, NaN excluded so operator== is meaningful.
        const auto bits = static_cast<std::uint32_t>(rng.next());
        float v;
        std::memcpy(&v, &bits, sizeof v);
        g.data[cell * g.channels + f] = std::isnan(v) ? 0.5f : v;
      }
  }
  for (std::size_t v = 0; v < 5; ++v)
    g.assignment.push_back({static_cast<int>(rng.below(g.width)), static_cast<int>(rng.below(g.height))});
  if (rng.uniform() < 0.5) g.pooled_cells.push_back(g.assignment[0]);
  if (rng.uniform() < 0.5) g.graph_label = static_cast<int>(rng.below(3)) - 1;
  return g;
}

} // namespace

TEST_CASE("header is padded to 64 bytes") {
  const std::string bytes = encode_npy({{2, 2, 1}, {0, 0, 0, 0}});
  CHECK(bytes.size() == 144);
  CHECK(bytes[127] == '\n');
  CHECK(bytes.substr(10, 53) == "{'descr': '<f4', 'fortran_order': False, 'shape': (2,");
}

TEST_CASE("bytes match a file written by numpy.save") {
  const std::string bytes = encode_npy({{1, 2, 3}, {0, 1, 2, 3, 4, 5}});
  const std::string want =
      "934e554d5059010076007b276465736372273a20273c6634272c2027666f727472616e5f6f72646572273a2046616c73652c2027"
      "7368617065273a2028312c20322c2033292c207d2020202020202020202020202020202020202020202020202020202020202020"
      "20202020202020202020202020202020202020202020200a000000000000803f0000004000004040000080400000a040";
  CHECK(to_hex(bytes) == want);
  CHECK(encode_npy({{3}, {1, 2, 3}}).find("'shape': (3,), }") != std::string::npos);
}

TEST_CASE("random grids round-trip bit for bit") {
  Rng rng(42);
  const auto dir = std::filesystem::temp_directory_path() / "gridlay_npy_test";
  std::filesystem::create_directories(dir);
  for (int i = 0; i < 100; ++i) {
    const FeatureGrid g = random_grid(rng);
    const std::string stem = (dir / ("grid_" + std::to_string(i))).string();
    export_npy(g, stem);
    const FeatureGrid back = import_npy(stem);
    CHECK(back == g);
    REQUIRE(back.data.size() == g.data.size());
    CHECK(std::memcmp(back.data.data(), g.data.data(), g.data.size() * sizeof(float)) == 0);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("run-length mask starts with unoccupied cells") {
  FeatureGrid g;
  g.height = 1;
  g.width = 5;
  g.channels = 1;
  g.data.assign(5, 0.0f);
  g.mask = {1, 1, 0, 0, 1};
  CHECK(grid_sidecar_json(g).find("\"mask_rle\":[0,2,2,1]") != std::string::npos);
}

TEST_CASE("decoder rejects malformed files") {
  const std::string good = encode_npy({{2}, {1, 2}});
  CHECK(decode_npy(good) == NpyArray{{2}, {1, 2}});
  CHECK_THROWS_AS(decode_npy("hello"), InputError);
  CHECK_THROWS_AS(decode_npy(good.substr(0, good.size() - 1)), InputError);
  std::string f8 = good;
  f8.replace(f8.find("<f4"), 3, "<f8");
  CHECK_THROWS_AS(decode_npy(f8), InputError);
  std::string fortran = good;
  fortran.replace(fortran.find("False"), 5, "True ");
  CHECK_THROWS_AS(decode_npy(fortran), InputError);
  std::string v9 = good;
  v9[6] = 9;
  CHECK_THROWS_AS(decode_npy(v9), InputError);
  CHECK_THROWS_AS(encode_npy({{3}, {1, 2}}), InputError);
  CHECK_THROWS_AS(parse_feature_grid(good, "{}"), InputError);
  CHECK_THROWS_AS(import_npy("/nonexistent/stem"), InputError);
  CHECK(export_stem("MUTAG", 3, 7) == "MUTAG_3_7");
}
