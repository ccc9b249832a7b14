#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlrk/io.hpp"
#include "dlrk/moments.hpp"
#include "dlrk/solver.hpp"

namespace dlrk {

enum class Problem { Sine, ShockTube, BkwHomogeneous, BgkSine, Custom };

Problem parse_problem(std::string_view name);
std::string_view to_string(Problem p);

struct ExperimentSpec {
  Problem problem = Problem::Sine;
  SolverConfig solver;
  /// True when the penalty was requested as Auto; resolved at run time.
  bool lambda_auto = true;
  Index snapshot_every = 100;
  std::filesystem::path output_dir;
  bool dump_full = false;
  /// Initial moments for Problem::Custom.
  std::optional<MacroFields> custom;
  /// Start time of the homogeneous BKW relaxation.
  double bkw_t0 = 2.0;

  /// Checks snapshot_every and problem/grid compatibility; throws ConfigError.
  void validate() const;
};

ExperimentSpec parse_config(const nlohmann::json& doc);
ExperimentSpec parse_config(const std::filesystem::path& file);

/// Equilibrium moments of the configured problem on its spatial grid.
MacroFields initial_moments(const ExperimentSpec& spec);
/// Initial distribution on the full grid.
Matrix initial_field(const ExperimentSpec& spec);

/// BKW solution of the homogeneous equation (B = 1/(2 pi)) at time t on a dim = 2 grid.
Vector bkw_profile(const VelocityGrid& vg, double t);
/// Its exact time derivative.
Vector bkw_time_derivative(const VelocityGrid& vg, double t);

struct LedgerSample {
  Index step = 0;
  double t = 0.0;
  ConservedTotals totals;
};

struct RunManifest {
  nlohmann::json config;
  std::string version;
  double wall_seconds = 0.0;
  Index steps = 0;
  std::vector<RankSample> rank_history;
  std::int64_t collision_calls = 0;
  std::vector<LedgerSample> ledger;

  /// max_n |mass_n - mass_0| / |mass_0|.
  double max_relative_mass_drift() const;
  nlohmann::json to_json() const;
};

struct RunResult {
  RunManifest manifest;
  MacroFields final_moments;
  std::vector<SnapshotEntry> snapshots;
};

/// Steps to t_final; writes snapshots, rank history and manifest when output_dir is set.
RunResult run_experiment(const ExperimentSpec& spec);

/// ||a - b|| / ||b|| in the discrete L2 and max norms; absolute when ||b|| = 0.
struct FieldError {
  double l2 = 0.0;
  double linf = 0.0;
};
FieldError relative_error(const Vector& a, const Vector& b);

struct SnapshotMetrics {
  Index step = 0;
  double t = 0.0;
  FieldError rho, u1, T;
};
/// Errors of run_a against run_b (the reference), one row per shared snapshot.
std::vector<SnapshotMetrics> compare(const std::filesystem::path& run_a, const std::filesystem::path& run_b);
std::string metrics_csv(const std::vector<SnapshotMetrics>& rows);
std::string metrics_table(const std::vector<SnapshotMetrics>& rows);

struct ModeCheck {
  double max_table_error = 0.0;   // tabulated vs quadrature, relative to 2 pi R^2 / 2
  double fast_vs_reference = 0.0; // fast vs naive bilinear, relative
  double mass_defect = 0.0;       // |int Q dv| / rho
  bool passed = false;
};
/// Kernel-mode self-test on an n_v^2 grid.
ModeCheck check_modes(Index n_v, double L, double R, std::uint64_t seed);

std::string_view version();

}  // namespace dlrk
