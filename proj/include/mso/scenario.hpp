#pragma once

// Scenario files and pipeline orchestration: load a scenario description,
// validate it, run one of the verification or recovery pipelines and write a
// self-contained report plus CSV tables and grid dumps.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "mso/recovery.hpp"

namespace mso {

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string code, const std::string& what)
      : std::runtime_error(what), code(std::move(code)) {}
  std::string code;
};

struct Scenario {
  int schema_version = 1;
  std::string name;
  std::string profile = "ball(1.0)";
  Vec3 center = Vec3::Zero();
  int subdivision = 3;
  Vec3 x0 = Vec3::Zero();
  double epsilon = 0.05;
  Vec3 omega = Vec3::UnitY();
  std::array<std::string, 3> A1{{"0", "0", "0"}}, A2{{"0", "0", "0"}};
  std::string q1 = "0", q2 = "0", q1_im = "0", q2_im = "0";
  double grid_step = 0.08;
  double slice_resolution = 0.03;
  int n_theta = 32;
  std::vector<double> h_schedule{0.4, 0.2, 0.1};
  double window_kappa = 5.0;  // angular window for per-slice q integrals
  int perturbation_count = 1000;
  double perturbation_radius = 0.05;
  unsigned seed = 20240214;
  std::map<std::string, double> tolerances;  // overrides of the defaults

  Domain make_domain() const;
  Potentials make_pot1() const;
  Potentials make_pot2() const;
};

// Throws ScenarioError with code "parse_error" (malformed file or schema) or
// "io_error" (unreadable path).
Scenario load_scenario(const std::string& path);

// Precondition checks: expressions evaluate finitely on the bounding box, x0
// lies outside the convex hull, omega is in the admissible band. Throws
// ScenarioError with a machine-readable code.
void validate_scenario(const Scenario& sc);

struct RunOptions {
  std::string out_dir = ".";
  int threads = 0;  // 0 keeps the library default
  std::vector<double> h_override;
  long long seed_override = -1;
  std::string tolerance_profile = "default";  // "default" or "strict"
};

// Subcommands: verify, identity, recover-q, recover-dA, sweep-h. Writes
// report.json (every measured number next to the tolerance it is checked
// against), CSV tables and grid dumps into out_dir. Returns the process exit
// code: 0 all assertions pass, 1 numerical assertion failure, 2 parse error,
// 3 precondition failure.
int run_scenario(const std::string& subcommand, const std::string& scenario_path,
                 const RunOptions& opts);

// 64-byte header (magic "MSOGRID1", dtype tag, dims, step, origin) followed by
// float64 values in row-major [i][j][k] order.
void write_grid_dump(const std::string& path, const ScalarField3& f);

}  // namespace mso
