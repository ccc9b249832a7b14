#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dlrk/experiment.hpp"

using namespace dlrk;

int main(int argc, char** argv) {
  CLI::App app{"Dynamical low-rank solvers for the stiff Boltzmann and BGK equations"};
  app.require_subcommand(1);
  int threads = 0;
  std::uint64_t seed = 20240601;
  app.add_option("--threads", threads, "OpenMP thread count (0 keeps the runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Seed for the randomised self-tests");
  app.set_version_flag("--version", std::string(version()));

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  std::string out_override;
  run->add_option("-o,--output", out_override, "Override output.dir");

  std::string dir_a, dir_b, csv_path;
  auto* cmp = app.add_subcommand("compare", "Relative L2 / Linf errors of run A against run B");
  cmp->add_option("dirA", dir_a)->required()->check(CLI::ExistingDirectory);
  cmp->add_option("dirB", dir_b)->required()->check(CLI::ExistingDirectory);
  cmp->add_option("--csv", csv_path, "Also write the metrics as CSV");

  bool check = false;
  Index n_v = 32;
  double half_width = 8.4;
  double radius = 0.0;
  auto* modes = app.add_subcommand("modes", "Kernel-mode utilities");
  modes->add_flag("--check", check, "Run the kernel-mode self-test");
  modes->add_option("--n-v", n_v, "Velocity points per dimension");
  modes->add_option("--L", half_width, "Velocity half width");
  modes->add_option("--R", radius, "Collision support radius (default L)");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*run) {
      ExperimentSpec spec = parse_config(std::filesystem::path(config_path));
      if (!out_override.empty()) spec.output_dir = out_override;
      const RunResult r = run_experiment(spec);
      const RunManifest& m = r.manifest;
      std::printf("%s %s: %lld steps in %.2f s, %lld collision calls, mass drift %.3e\n",
                  std::string(to_string(spec.problem)).c_str(), std::string(to_string(spec.solver.method)).c_str(),
                  static_cast<long long>(m.steps), m.wall_seconds, static_cast<long long>(m.collision_calls),
                  m.max_relative_mass_drift());
      if (!spec.output_dir.empty()) std::printf("output written to %s\n", spec.output_dir.string().c_str());
      return 0;
    }
    if (*cmp) {
      const auto rows = compare(dir_a, dir_b);
      std::cout << metrics_table(rows);
      if (!csv_path.empty()) std::ofstream(csv_path) << metrics_csv(rows);
      return 0;
    }
    if (*modes) {
      if (!check) {
        std::cerr << "modes: nothing to do (try --check)\n";
        return 2;
      }
      const double R = radius > 0.0 ? radius : half_width;
      const ModeCheck c = check_modes(n_v, half_width, R, seed);
      std::printf("table vs quadrature   %.3e\n", c.max_table_error);
      std::printf("fast vs reference     %.3e\n", c.fast_vs_reference);
      std::printf("mass defect           %.3e\n", c.mass_defect);
      std::printf("%s\n", c.passed ? "modes check passed" : "modes check FAILED");
      return c.passed ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
