// uavmec: solve, sweep and plot-data export for the UAV offloading planner.
#include "uavmec/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CommonFlags {
  bool relax_budget = false;
  bool relax_causality = false;
  double tol = 1e-6;
  int max_iter = 30;
  double theta = 0.5;
  unsigned seed = 0;  // reserved; every algorithm is deterministic
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_flag("--relax-budget", f.relax_budget, "Drop the TBS energy budget");
  app->add_flag("--relax-causality", f.relax_causality, "Drop bit causality");
  app->add_option("--tol", f.tol, "Inner barrier tolerance")->check(CLI::PositiveNumber);
  app->add_option("--max-iter", f.max_iter, "SCA subproblems per run")->check(CLI::PositiveNumber);
  app->add_option("--theta", f.theta, "One-by-One rounding threshold")->check(CLI::Range(0.0, 1.0));
  app->add_option("--seed", f.seed, "Accepted for reproducibility scripts; unused");
}

uavmec::SolveOptions to_options(const CommonFlags& f) {
  uavmec::SolveOptions o;
  o.relax_budget = f.relax_budget;
  o.relax_causality = f.relax_causality;
  o.inner.tol = f.tol;
  o.sca_max_iter = f.max_iter;
  o.rounding_threshold = f.theta;
  return o;
}

const std::vector<std::string> kSchemes{"tdma", "ofdma", "one-by-one", "noma", "propulsion-baseline"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimal trajectory and offloading plans for cellular-connected UAVs"};
  app.set_version_flag("--version", uavmec::tool_version());
  app.require_subcommand(1);

  CommonFlags solve_flags;
  std::string scheme = "tdma", scenario;
  std::string out_dir = "out";
  auto* solve = app.add_subcommand("solve", "Solve one scheme on a scenario file");
  solve->add_option("scenario", scenario, "Scenario JSON")->required();
  solve->add_option("--scheme", scheme, "Access scheme")->check(CLI::IsMember(kSchemes));
  solve->add_option("--out", out_dir, "Artifact directory");
  add_common(solve, solve_flags);

  CommonFlags sweep_flags;
  std::string sweep_scenario, axis = "budget", sweep_out = "sweep";
  std::vector<double> values;
  std::vector<std::string> schemes{"tdma"};
  int jobs = 1, max_slots = 60;
  bool keep_slot = false;
  auto* sweep = app.add_subcommand("sweep", "Sweep the TBS budget or the horizon");
  sweep->add_option("scenario", sweep_scenario, "Scenario JSON")->required();
  sweep->add_option("--axis", axis, "budget or horizon")->check(CLI::IsMember({"budget", "horizon"}));
  sweep->add_option("--values", values, "Axis values (J or s)")->delimiter(',');
  sweep->add_option("--schemes", schemes, "Schemes to run")->delimiter(',')->check(CLI::IsMember(kSchemes));
  sweep->add_option("--jobs", jobs, "Parallel cells")->check(CLI::PositiveNumber);
  sweep->add_option("--max-slots", max_slots, "Horizon axis: largest N before delta is stretched")
      ->check(CLI::Range(3, 1000000));
  sweep->add_flag("--keep-delta", keep_slot, "Horizon axis: keep the scenario's delta");
  sweep->add_option("--out", sweep_out, "Sweep directory");
  add_common(sweep, sweep_flags);

  std::vector<std::string> inputs;
  std::string figure, plot_out;
  auto* plot = app.add_subcommand("export-plotdata", "Turn run records into a figure table");
  plot->add_option("--figure", figure, "f2|f3|f4|f5|f6")->required()->check(CLI::IsMember({"f2", "f3", "f4", "f5", "f6"}));
  plot->add_option("--out", plot_out, "CSV file")->required();
  plot->add_option("records", inputs, "result.json files or directories holding them")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : uavmec::kExitError;
  }

  if (*solve) return uavmec::cmd_solve(scenario, scheme, to_options(solve_flags), out_dir, std::cerr);
  if (*sweep) {
    uavmec::SweepOptions o;
    o.axis = uavmec::parse_axis(axis);
    o.values = values;
    o.schemes = schemes;
    o.solve = to_options(sweep_flags);
    o.jobs = jobs;
    o.max_slots = max_slots;
    o.keep_slot = keep_slot;
    return uavmec::cmd_sweep(sweep_scenario, o, sweep_out, std::cerr);
  }
  std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
  return uavmec::cmd_export_plotdata(paths, figure, plot_out, std::cerr);
}
