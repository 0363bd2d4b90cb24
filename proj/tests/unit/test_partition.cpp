#include "gridlay/error.hpp"
#include "gridlay/partition.hpp"

#include "graphs.hpp"

#include <doctest.h>

#include <numeric>

using namespace gridlay;
using namespace gridlay::testing;

namespace {

void check_is_partition(const Partition& p, std::size_t n, std::size_t j) {
  REQUIRE(p.size() == j);
  std::vector<int> seen(n, 0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    CHECK_FALSE(p.parts[k].empty());
    for (int v : p.parts[k]) {
      ++seen[static_cast<std::size_t>(v)];
      CHECK(p.part_of[static_cast<std::size_t>(v)] == static_cast<int>(k));
    }
  }
  for (int c : seen) CHECK(c == 1);
}

Graph two_triangles() { return Graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}}); }

} // namespace

TEST_CASE("two triangles joined by a bridge split into the triangles") {
  const Graph g = two_triangles();
  const Partition p = normalized_cut(g, 2);
  check_is_partition(p, 6, 2);
  CHECK(p.parts[0] == std::vector<int>{0, 1, 2});
  CHECK(p.parts[1] == std::vector<int>{3, 4, 5});
  CHECK(normalized_cut_value(g, p) == doctest::Approx(brute_force_min_ncut(g)));
  CHECK(normalized_cut_value(g, p) == doctest::Approx(2.0 / 7.0));
}

TEST_CASE("path of 8 splits in the middle") {
  const Graph g = path_graph(8);
  const Partition p = normalized_cut(g, 2);
  CHECK(p.parts[0] == std::vector<int>{0, 1, 2, 3});
  CHECK(p.parts[1] == std::vector<int>{4, 5, 6, 7});
  std::vector<int> side;
  brute_force_min_ncut(g, &side);
  CHECK((side == std::vector<int>{0, 1, 2, 3} || side == std::vector<int>{4, 5, 6, 7}));
}

TEST_CASE("one part holds everything") {
  const Partition p = normalized_cut(random_connected_graph(20, 10, 1), 1);
  check_is_partition(p, 20, 1);
}

TEST_CASE("part count bounds") {
  const Graph g = path_graph(5);
  CHECK_THROWS_AS(normalized_cut(g, 0), InputError);
  CHECK_THROWS_AS(normalized_cut(g, 6), InputError);
  check_is_partition(normalized_cut(g, 5), 5, 5);
}

TEST_CASE("spectral bisection is close to the brute-force optimum") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 4 + seed % 9;
    const Graph g = random_connected_graph(n, n / 2, seed);
    const Partition p = normalized_cut(g, 2);
    check_is_partition(p, n, 2);
    CHECK(normalized_cut_value(g, p) <= 1.5 * brute_force_min_ncut(g) + 1e-12);
  }
}

TEST_CASE("parts always cover the graph and stay balanced") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 60 + 17 * seed;
    const std::size_t j = 2 + seed % 7;
    const Graph g = random_connected_graph(n, n, seed);
    const Partition p = normalized_cut(g, j);
    check_is_partition(p, n, j);
    CHECK(p.max_part_size() <= 2 * ((n + j - 1) / j));
  }
}

TEST_CASE("balance on geometric graphs") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Graph g = random_geometric_graph(512, 0.09, seed);
    const Partition p = normalized_cut(g, 16);
    check_is_partition(p, 512, 16);
    CHECK(p.max_part_size() <= 64);
  }
}

TEST_CASE("disconnected input is split along its components") {
  // Three separate 4-cycles.
  std::vector<Edge> e;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 4; ++i) e.push_back({4 * c + std::min(i, (i + 1) % 4), 4 * c + std::max(i, (i + 1) % 4)});
  const Graph g(12, e);
  const Partition p = normalized_cut(g, 3);
  check_is_partition(p, 12, 3);
  CHECK(normalized_cut_value(g, p) == 0.0);
  // Isolated vertices are legal too.
  check_is_partition(normalized_cut(Graph(5, {{0, 1}}), 3), 5, 3);
}

TEST_CASE("connectivity graph") {
  const Graph g = two_triangles();
  const Partition two = make_partition(6, {{0, 1, 2}, {3, 4, 5}});
  const Graph c = connectivity_graph(g, two);
  CHECK(c.num_vertices() == 2);
  CHECK(c.edges() == std::vector<Edge>{{0, 1}});
  CHECK_FALSE(c.has_features());

  const Graph split(4, {{0, 1}, {2, 3}});
  CHECK(connectivity_graph(split, make_partition(4, {{0, 1}, {2, 3}})).num_edges() == 0);

  const Partition pairs = make_partition(6, {{0, 1}, {2, 3}, {4, 5}});
  const Graph k3 = connectivity_graph(complete_graph(6), pairs);
  CHECK(k3.num_edges() == 3);
}

TEST_CASE("make_partition validates its input") {
  CHECK_THROWS_AS(make_partition(3, {{0, 1}}), InputError);
  CHECK_THROWS_AS(make_partition(3, {{0, 1}, {1, 2}}), InputError);
  CHECK_THROWS_AS(make_partition(3, {{0, 1, 2}, {}}), InputError);
  const Partition p = make_partition(4, {{3, 2}, {1, 0}});
  CHECK(p.parts[0] == std::vector<int>{0, 1});
  CHECK(p.part_of == std::vector<int>{0, 0, 1, 1});
}
