// Command-line front end: scenario execution, controller comparison and
// parameter-file validation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fwt/config.hpp"
#include "fwt/io.hpp"
#include "fwt/report.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir{"out"};
  std::optional<uint64_t> seed;
  std::optional<double> dt;
  int jobs{1};
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "run configuration file")
      ->required();
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "override the scenario seed");
  cmd->add_option("--dt", o.dt, "override the integration step (s)");
  cmd->add_option("--jobs", o.jobs, "worker threads for batch scenarios");
}

fwt::RunConfig load_with_overrides(const CommonOpts& o) {
  fwt::RunConfig cfg = fwt::load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.dt) cfg.dt = *o.dt;
  for (const auto& d : cfg.applied_defaults) {
    std::cerr << "[config] " << d << "\n";
  }
  return cfg;
}

int run_openloop(const CommonOpts& o) {
  fwt::RunConfig cfg = load_with_overrides(o);
  if (cfg.controllers.size() != 1 || cfg.controllers[0].type != "none") {
    std::cerr << "openloop expects a single fixed-pitch controller block\n";
    return 2;
  }
  const auto results = fwt::run_batch(cfg, o.out_dir, o.jobs);
  const auto stats = fwt::openloop_statistics(results[0].trajectory,
                                              cfg.trim_s);
  const std::string table = fwt::format_statistics(stats);
  std::cout << table;
  std::ofstream stats_file(o.out_dir + "/statistics.txt");
  stats_file << "# config_hash=" << cfg.config_hash << " seed=" << cfg.seed
             << "\n" << table;
  std::cout << "trajectory: " << results[0].trajectory_path << "\n";
  return 0;
}

int run_closedloop(const CommonOpts& o) {
  fwt::RunConfig cfg = load_with_overrides(o);
  const auto results = fwt::run_batch(cfg, o.out_dir, o.jobs);
  std::map<std::string, fwt::Trajectory> runs;
  for (const auto& r : results) runs[r.controller] = r.trajectory;
  if (runs.size() > 1) {
    const std::string baseline =
        runs.count("gspi") ? "gspi" : results[0].controller;
    const fwt::CompareReport rep =
        fwt::compare_report(runs, baseline, cfg.trim_s);
    std::cout << fwt::format_report(rep);
    std::ofstream rep_file(o.out_dir + "/report.tsv");
    rep_file << "# config_hash=" << cfg.config_hash << " seed=" << cfg.seed
             << " baseline=" << baseline << "\n" << rep.to_delimited();
  }
  for (const auto& r : results) {
    std::cout << "trajectory: " << r.trajectory_path << "\n";
  }
  return 0;
}

int run_compare(const std::vector<std::string>& files,
                const std::string& out_dir) {
  std::map<std::string, fwt::Trajectory> runs;
  std::string baseline;
  for (const auto& f : files) {
    fwt::Trajectory t = fwt::read_trajectory(f);
    if (t.controller == "gspi" || baseline.empty()) baseline = t.controller;
    runs[t.controller] = std::move(t);
  }
  if (runs.size() < 2) {
    std::cerr << "compare needs at least two trajectories with distinct "
                 "controllers\n";
    return 2;
  }
  const fwt::CompareReport rep = fwt::compare_report(runs, baseline);
  std::cout << fwt::format_report(rep);
  std::filesystem::create_directories(out_dir);
  std::ofstream rep_file(out_dir + "/report.tsv");
  rep_file << "# baseline=" << baseline << "\n" << rep.to_delimited();
  return 0;
}

int run_validate(const std::string& params_path) {
  const fwt::ParameterSet p = fwt::load_parameters(params_path);
  const fwt::SystemMatrices m =
      fwt::assemble_system(p.body, p.cylinders, p.hydro.rho_w);
  std::printf("parameter file: %s\n", params_path.c_str());
  std::printf("  total mass a1     : %.6e kg\n", m.a[0]);
  std::printf("  Ms_bar positive definite, b2 = %.6e (> 0 required)\n",
              fwt::control_direction_constants(m, p.body.H_r).b2);

  fwt::PlantModel plant(p, fwt::RotorAeroTable::surrogate(), fwt::WaveSpec{},
                        fwt::WindSource::constant(0.0));
  const fwt::EquilibriumResult eq =
      fwt::solve_equilibrium(plant, fwt::EquilibriumOptions{});
  std::printf("  calm equilibrium  : heave %.4f m, pitch %.4f deg, "
              "residual %.2e (%d iterations)\n",
              eq.state.r_p.z(), eq.state.theta.y * 180.0 / M_PI,
              eq.residual.head<6>().cwiseAbs().maxCoeff(), eq.iterations);
  std::printf("ok\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-submersible floating wind turbine simulation bench"};
  app.require_subcommand(1);

  CommonOpts open_opts, closed_opts;
  CLI::App* open_cmd =
      app.add_subcommand("openloop", "run the fixed-pitch scenario");
  add_common(open_cmd, open_opts);
  CLI::App* closed_cmd = app.add_subcommand(
      "closedloop", "run the configured controllers on a shared seed");
  add_common(closed_cmd, closed_opts);

  std::vector<std::string> compare_files;
  std::string compare_out{"out"};
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "build a comparison report from trajectory files");
  compare_cmd->add_option("files", compare_files, "trajectory files")
      ->required()
      ->expected(-2);
  compare_cmd->add_option("--out", compare_out, "output directory");

  std::string params_path;
  CLI::App* validate_cmd = app.add_subcommand(
      "validate-params", "load and sanity-check a parameter file");
  validate_cmd->add_option("--params", params_path, "parameter file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (open_cmd->parsed()) return run_openloop(open_opts);
    if (closed_cmd->parsed()) return run_closedloop(closed_opts);
    if (compare_cmd->parsed()) return run_compare(compare_files, compare_out);
    if (validate_cmd->parsed()) return run_validate(params_path);
  } catch (const fwt::SimulationDiverged& e) {
    std::cerr << "simulation diverged: " << e.what() << "\n";
    return 3;
  } catch (const fwt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
