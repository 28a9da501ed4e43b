#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eshelby/io.hpp"
#include "eshelby/region.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

using namespace eshelby;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(ESHELBY_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("eshelby_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string preset(const std::string& name) {
  return (fs::path(ESHELBY_SOURCE_DIR) / "configs" / (name + ".json")).string();
}

}  // namespace

TEST_CASE("ellipsoid potential of the unit ball with rho = -|x|^2") {
  const RunResult r = run("ellipsoid --axes 1,1,1 --point 0,0,0");
  CHECK(r.code == 0);
  CHECK(contains(r.output, "0.25"));
  const RunResult c = run("ellipsoid --axes 1,1,1 --point 0,0,0 --density constant");
  CHECK(c.code == 0);
  CHECK(contains(c.output, "-0.5"));
  CHECK(run("ellipsoid --axes 1,1,1 --point 2,0,0").code == 1);
  CHECK(run("ellipsoid --axes 1,1 --point 0,0,0").code == 1);
}

TEST_CASE("material report for the degenerate transversely isotropic preset") {
  const RunResult r = run("--config " + preset("ti_degenerate") + " material");
  CHECK(r.code == 0);
  CHECK(contains(r.output, "symmetry=transversely_isotropic"));
  CHECK(contains(r.output, "positive_definite=yes"));
  CHECK(contains(r.output, "branch=degenerate"));
  CHECK(contains(r.output, "v=2"));
}

TEST_CASE("Green function evaluation") {
  const RunResult r = run("--config " + preset("ti_degenerate") + " green --point 1,0,0.5");
  CHECK(r.code == 0);
  CHECK(contains(r.output, "branch=degenerate"));
  CHECK(contains(r.output, "G[3]="));
  const RunResult z = run("--config " + preset("ti_degenerate") + " green --point 0,0,0");
  CHECK(z.code == 1);
  CHECK(contains(z.output, "error:"));
}

TEST_CASE("usage and input errors exit with status 1") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("--case omega1 verify").code == 1);                               // --region missing
  CHECK(run("--case omega1 verify --region /nonexistent/region.csv").code == 1);
  CHECK(run("--config /nonexistent/config.json construct").code == 1);
  CHECK(run("--case omega1 --isa sse9 material").code == 1);

  const fs::path dir = scratch_dir("badconfig");
  write_text_file((dir / "bad.json").string(), R"({"obstacle": {"family": "quartic", "C": 0.03}, "grid": {"n": 4}})");
  const RunResult r = run("--config " + (dir / "bad.json").string() + " construct");
  CHECK(r.code == 1);
  CHECK(contains(r.output, "grid.n"));
  fs::remove_all(dir);
}

TEST_CASE("a constant obstacle gives an empty coincidence set") {
  const fs::path dir = scratch_dir("empty");
  write_text_file((dir / "c.json").string(),
                  R"({"obstacle": {"family": "constant", "value": -1}, "grid": {"n": 20}})");
  const RunResult r = run("--config " + (dir / "c.json").string() + " --out " + (dir / "out").string() + " construct");
  CHECK(r.code == 0);
  CHECK(contains(r.output, "empty coincidence set"));
  CHECK(fs::exists(dir / "out" / "summary.json"));
  fs::remove_all(dir);
}

TEST_CASE("a cube fails certification with exit status 3") {
  const fs::path dir = scratch_dir("cube");
  const double h = 1.0 / 24.0;
  const VoxelRegion cube = voxelize([](const Vec3& x) { return x.cwiseAbs().maxCoeff() <= 0.4; },
                                    Vec3::Constant(-0.5), Vec3::Constant(0.5), Vec3::Constant(h));
  write_region_csv((dir / "cube.csv").string(), cube);
  write_text_file((dir / "c.json").string(), R"({"obstacle": {"family": "quartic", "C": 0.027777777777777776},
    "material": {"symmetry": "isotropic", "lambda": 1, "mu": 1},
    "eigenstrain": {"case": "isotropic", "axis": 2, "density": {"form": "constant", "c0": 1}}})");
  const RunResult r = run("--config " + (dir / "c.json").string() + " --out " + (dir / "out").string() +
                          " verify --region " + (dir / "cube.csv").string());
  CHECK(r.code == 3);
  CHECK(contains(r.output, "verdict=FAIL"));
  CHECK(fs::exists(dir / "out" / "certification.json"));
  fs::remove_all(dir);
}

TEST_CASE("omega1 construct then verify passes") {
  const fs::path dir = scratch_dir("omega1");
  const std::string out = (dir / "out").string();
  const RunResult c = run("--case omega1 --out " + out + " construct");
  CHECK(c.code == 0);
  CHECK(contains(c.output, "converged=yes"));
  CHECK(contains(c.output, "components=1"));
  REQUIRE(fs::exists(dir / "out" / "stretched_region.csv"));
  const RunResult v = run("--case omega1 --out " + out + " verify --region " + out + "/stretched_region.csv");
  CHECK(v.code == 0);
  CHECK(contains(v.output, "verdict=PASS"));

  // Export round trip: VTK -> CSV -> VTK keeps every value.
  const std::string csv = (dir / "fields.csv").string();
  const std::string vtk = (dir / "fields.vtk").string();
  CHECK(run("export --input " + out + "/fields.vtk --format csv --out " + csv).code == 0);
  CHECK(run("export --input " + csv + " --format vtk --out " + vtk).code == 0);
  const VolumeData a = read_vtk(out + "/fields.vtk");
  const VolumeData b = read_vtk(vtk);
  CHECK(a.dims == b.dims);
  REQUIRE(a.arrays.size() == b.arrays.size());
  for (std::size_t i = 0; i < a.arrays.size(); ++i) CHECK(a.arrays[i].second == b.arrays[i].second);
  // A region CSV exports to a volume with a "region" array.
  CHECK(run("export --input " + out + "/region.csv --format vtk --out " + (dir / "region.vtk").string()).code == 0);
  CHECK(read_vtk((dir / "region.vtk").string()).array("region").size() > 0);
  fs::remove_all(dir);
}
