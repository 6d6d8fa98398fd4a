#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mso/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"partial-data magnetic Schrodinger verification pipelines"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = ".", profile = "default";
  int threads = 0;
  long long seed = -1;
  std::vector<double> h_sweep;

  for (const char* name :
       {"verify", "identity", "recover-q", "recover-dA", "sweep-h"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--scenario", scenario_path, "scenario file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "parallelism cap");
    sub->add_option("--h-sweep", h_sweep, "override the scenario h schedule");
    sub->add_option("--seed", seed, "override the scenario seed");
    sub->add_option("--tolerance-profile", profile)
        ->check(CLI::IsMember({"strict", "default"}));
  }

  CLI11_PARSE(app, argc, argv);

  mso::RunOptions opts;
  opts.out_dir = out_dir;
  opts.threads = threads;
  opts.h_override = h_sweep;
  opts.seed_override = seed;
  opts.tolerance_profile = profile;
  return mso::run_scenario(app.get_subcommands()[0]->get_name(), scenario_path,
                           opts);
}
