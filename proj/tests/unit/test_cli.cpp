#include "gridlay/graph.hpp"
#include "gridlay/layout.hpp"

#include "graphs.hpp"

#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gridlay;
using namespace gridlay::testing;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + GRIDLAY_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("gridlay_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string write_graph(const TempDir& dir, const std::string& name, const Graph& g) {
  const std::string p = dir / name;
  std::ofstream(p) << graph_to_json(g);
  return p;
}

} // namespace

TEST_CASE("input errors exit with 2") {
  TempDir dir;
  CHECK(run("layout --input /nonexistent/graph.json --out " + (dir / "x.json")) == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("layout --alpha nope") == 2);
  const std::string g = write_graph(dir, "p.json", path_graph(40));
  CHECK(run("hlayout --input " + g + " --fanout 300 --out " + (dir / "h.json")) == 2);
  CHECK(run("bench --points 64 --reps 0 --out " + (dir / "b.csv")) == 2);
  // Failed runs still leave a manifest describing the failure.
  const auto manifest = nlohmann::json::parse(slurp(dir / "h.json.manifest.json"));
  CHECK(manifest["status"] == "input_error");
}

TEST_CASE("layout of K32") {
  TempDir dir;
  const std::string g = write_graph(dir, "k32.json", complete_graph(32));
  REQUIRE(run("layout --input " + g + " --out " + (dir / "a.json")) == 0);
  const GridLayout a = grid_layout_from_json(slurp(dir / "a.json"));
  CHECK(a.vertex_loss_count == 0);
  CHECK(a.bbox.side() <= 9);
  REQUIRE(run("layout --input " + g + " --lambda 0 --out " + (dir / "b.json")) == 0);
  CHECK(grid_layout_from_json(slurp(dir / "b.json")).vertex_loss_count > 0);
}

TEST_CASE("rerun and thread count reproduce outputs byte for byte") {
  TempDir dir;
  const std::string g = write_graph(dir, "geo.json", random_geometric_graph(200, 0.13, 2));
  REQUIRE(run("--threads 1 hlayout --input " + g + " --fanout 8 --out " + (dir / "h1.json")) == 0);
  const std::string first = slurp(dir / "h1.json");
  const std::string tree = slurp(dir / "h1.json.tree.json");
  REQUIRE_FALSE(first.empty());
  REQUIRE(run("hlayout --input " + g + " --fanout 8 --threads 4 --out " + (dir / "h4.json")) == 0);
  CHECK(slurp(dir / "h4.json") == first);
  CHECK(slurp(dir / "h4.json.tree.json") == tree);

  fs::remove(dir / "h1.json");
  REQUIRE(run("rerun " + (dir / "h1.json.manifest.json")) == 0);
  CHECK(slurp(dir / "h1.json") == first);

  const auto manifest = nlohmann::json::parse(slurp(dir / "h1.json.manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["command"] == "hlayout");
  CHECK(manifest["schema_version"] == 1);
}

TEST_CASE("render and stats run end to end") {
  TempDir dir;
  const std::string g = write_graph(dir, "k8.json", complete_graph(8));
  REQUIRE(run("layout --input " + g + " --out " + (dir / "l.json")) == 0);
  REQUIRE(run("render --layout " + (dir / "l.json") + " --graph " + g + " --edges --out " + (dir / "l.ppm")) == 0);
  CHECK(slurp(dir / "l.ppm").rfind("P6\n", 0) == 0);
  REQUIRE(run("stats --input " + g + " --out " + (dir / "s.csv")) == 0);
  CHECK(slurp(dir / "s.csv").rfind("dataset,graphs,classes,", 0) == 0);
}
