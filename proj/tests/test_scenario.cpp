#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mso/scenario.hpp"

using namespace mso;
namespace fs = std::filesystem;

namespace {

std::string shipped(const std::string& name) {
  return (fs::path(MSO_SCENARIO_DIR) / name).string();
}

std::string write_tmp(const std::string& name, const std::string& body) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p.string();
}

// minimal valid scenario body with injectable overrides
std::string scenario_json(const std::string& extra) {
  return std::string("{\n"
                     "  \"schema_version\": 1,\n"
                     "  \"name\": \"tmp\",\n"
                     "  \"domain\": {\"profile\": \"ball(1.0)\", "
                     "\"center\": [4, 0, 0], \"subdivision\": 2},\n"
                     "  \"observation\": {\"x0\": [0, 0, 0]},\n"
                     "  \"omega\": [0, 1, 0],\n"
                     "  \"potentials\": {\"A1\": [\"0\", \"0\", \"0\"], "
                     "\"A2\": [\"0\", \"0\", \"0\"], \"q1\": \"0\", "
                     "\"q2\": \"0\"}\n") +
         extra + "}\n";
}

}  // namespace

TEST_CASE("shipped scenario loads with its stated parameters") {
  Scenario sc = load_scenario(shipped("near_generic.json"));
  CHECK(sc.schema_version == 1);
  CHECK(sc.name == "near-generic");
  CHECK(sc.profile == "ball(1.0)");
  CHECK((sc.center - Vec3(4, 0, 0)).norm() == 0.0);
  CHECK(sc.x0.norm() == 0.0);
  CHECK((sc.omega - Vec3(0, 1, 0)).norm() == 0.0);
  CHECK(sc.grid_step == doctest::Approx(0.08));
  CHECK(sc.n_theta == 32);
  CHECK(sc.h_schedule.size() == 3);
  CHECK_NOTHROW(validate_scenario(sc));
}

TEST_CASE("all shipped scenarios validate") {
  for (const char* n :
       {"near_generic.json", "gauge_pair.json", "q_gaussian.json",
        "da_bump.json"}) {
    Scenario sc = load_scenario(shipped(n));
    CHECK_NOTHROW(validate_scenario(sc));
  }
}

TEST_CASE("malformed file is a parse error with exit code 2") {
  std::string p = write_tmp("bad.json", "{ not json");
  CHECK_THROWS_AS(load_scenario(p), ScenarioError);
  RunOptions opts;
  opts.out_dir = (fs::temp_directory_path() / "bad_out").string();
  CHECK(run_scenario("verify", p, opts) == 2);
  CHECK(run_scenario("verify", "/no/such/file.json", opts) == 2);
}

TEST_CASE("unknown tolerance override is a parse error") {
  std::string p = write_tmp("badtol.json",
                            scenario_json(", \"tolerances\": {\"typo\": 1.0}\n"));
  CHECK_THROWS_AS(validate_scenario(load_scenario(p)), ScenarioError);
  RunOptions opts;
  opts.out_dir = (fs::temp_directory_path() / "badtol_out").string();
  CHECK(run_scenario("verify", p, opts) == 2);
}

TEST_CASE("observation point inside the hull fails preconditions") {
  Scenario sc = load_scenario(shipped("near_generic.json"));
  sc.x0 = Vec3(4, 0, 0);
  try {
    validate_scenario(sc);
    FAIL("expected a precondition failure");
  } catch (const ScenarioError& e) {
    CHECK(e.code == "x0_in_convex_hull");
  }
}

TEST_CASE("axial omega is outside the admissible band") {
  Scenario sc = load_scenario(shipped("near_generic.json"));
  sc.omega = Vec3(1, 0, 0);  // points from x0 straight at the domain
  try {
    validate_scenario(sc);
    FAIL("expected a precondition failure");
  } catch (const ScenarioError& e) {
    CHECK(e.code == "omega_not_admissible");
  }
}

TEST_CASE("precondition failures map to exit code 3") {
  std::string body = scenario_json("");
  body.replace(body.find("\"x0\": [0, 0, 0]"), 15, "\"x0\": [4, 0, 0]");
  std::string p = write_tmp("inhull.json", body);
  RunOptions opts;
  opts.out_dir = (fs::temp_directory_path() / "inhull_out").string();
  CHECK(run_scenario("verify", p, opts) == 3);
}

TEST_CASE("unknown subcommand is rejected") {
  RunOptions opts;
  opts.out_dir = (fs::temp_directory_path() / "unk_out").string();
  CHECK(run_scenario("frobnicate", shipped("near_generic.json"), opts) == 2);
}

TEST_CASE("grid dump header layout") {
  ScalarField3 f;
  f.center = Vec3(4, 0, 0);
  f.axes = Mat3::Identity();
  f.radius = 1.1;
  f.n = 4;
  f.values.assign(64, 0.0);
  for (int i = 0; i < 64; ++i) f.values[i] = 0.25 * i;
  fs::path p = fs::temp_directory_path() / "dump.grid";
  write_grid_dump(p.string(), f);

  std::ifstream in(p, std::ios::binary);
  char header[64];
  in.read(header, 64);
  CHECK(std::memcmp(header, "MSOGRID1", 8) == 0);
  uint32_t dtype, dims[3];
  double step, origin[3];
  std::memcpy(&dtype, header + 8, 4);
  std::memcpy(dims, header + 12, 12);
  std::memcpy(&step, header + 24, 8);
  std::memcpy(origin, header + 32, 24);
  CHECK(dtype == 1);
  CHECK(dims[0] == 4);
  CHECK(dims[2] == 4);
  CHECK(step == doctest::Approx(2.2 / 3));
  CHECK(origin[0] == doctest::Approx(4 - 1.1));
  CHECK(origin[1] == doctest::Approx(-1.1));
  std::vector<double> vals(64);
  in.read(reinterpret_cast<char*>(vals.data()), 64 * sizeof(double));
  CHECK(in.good());
  CHECK(vals[7] == doctest::Approx(0.25 * 7));
  fs::remove(p);
}
