#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "dlrk/collision.hpp"
#include "dlrk/common.hpp"
#include "dlrk/grid.hpp"
#include "dlrk/lowrank.hpp"

namespace dlrk {

enum class Method { FullTensor, KslNonstiff, DlrXL, DlrSxl1, DlrSxl2, DlrSxl3 };

Method parse_method(std::string_view name);
std::string_view to_string(Method m);
bool is_low_rank(Method m);

struct SolverConfig {
  double eps = 1.0;
  /// Penalty lambda; empty means Auto (1.1 x sup rho at t = 0, resolved by the driver).
  std::optional<double> lambda;
  double dt = 1e-3;
  double t_final = 0.1;
  Index rank = 6;
  Method method = Method::DlrXL;
  /// Score threshold for the tolerance-based augmentation (DlrSxl2).
  double sxl_tol = 0.01;
  Truncation truncation = Truncation::fixed(6);
  SpatialGrid xgrid;
  VelocityGrid vgrid;
  /// Relative-velocity support radius of the collision kernel.
  double collision_R = 8.4;
  /// Project collision outputs onto the moment-free subspace (see CollisionOperator).
  bool collision_conservative = false;

  /// Checks positivity, rank range and the advection CFL condition; throws ConfigError.
  void validate() const;
  /// Resolved penalty; throws ConfigError while lambda is still Auto.
  double penalty() const;
  Truncation effective_truncation() const;
};

struct StepReport {
  Index rank_before_trunc = 0;
  Index rank_after_trunc = 0;
  Index augmented = 0;
  Vector singular_values;
  std::int64_t collision_calls = 0;
};

/// Pair-selection rule for the sXL augmentation.
struct AugmentationStrategy {
  enum class Kind { TopR, Tol, All };
  Kind kind = Kind::TopR;
  double tol = 0.0;

  static AugmentationStrategy top_r() { return {Kind::TopR, 0.0}; }
  static AugmentationStrategy tolerance(double tau) { return {Kind::Tol, tau}; }
  static AugmentationStrategy all() { return {Kind::All, 0.0}; }
};

/// Collision evaluations on the velocity basis: column p*r + q of `Q` holds Q(V_p, V_q),
/// and C(j, p*r + q) = <V_j, Q(V_p, V_q)>_v.
struct CollisionTable {
  Matrix Q;
  Matrix C;
};
/// Exactly r^2 counted bilinear evaluations.
CollisionTable collision_table(const Matrix& V, const VelocityGrid& vg, const CollisionOperator& op);

/// Column p*r + q holds the pointwise product K_p K_q.
Matrix pairwise_products(const Matrix& K);

/// s(k, l) = max_j |d_jkl| with d_jkl = coef sum_{pq} C_jpq S_kp S_lq.
Matrix augmentation_scores(const Matrix& C, const Matrix& S, double coef);

/// Selected (k, l) pairs in row-major order.
std::vector<std::pair<Index, Index>> select_pairs(const Matrix& scores, const AugmentationStrategy& strategy);

/// Fully discrete penalised splitting step on the full tensor.
Matrix full_tensor_step(const Matrix& f, const SolverConfig& cfg, const CollisionOperator& op,
                        StepReport* report = nullptr);

/// Full-tensor step for the one-dimensional BGK surrogate (lambda = 1).
Matrix bgk_full_tensor_step(const Matrix& f, const SolverConfig& cfg);

/// K, S and L substeps for the transport part (explicit Euler, upwinded projections).
LowRankState ksl_advection_substep(const LowRankState& state, const SolverConfig& cfg);

LowRankState collision_substep_xl(const LowRankState& state, const SolverConfig& cfg,
                                  const CollisionOperator& op, StepReport* report = nullptr);

LowRankState collision_substep_sxl(const LowRankState& state, const SolverConfig& cfg,
                                   const CollisionOperator& op, const AugmentationStrategy& strategy,
                                   StepReport* report = nullptr);

/// Transport substep followed by the collision substep selected by cfg.method.
LowRankState dlr_step(const LowRankState& state, const SolverConfig& cfg, const CollisionOperator& op,
                      StepReport* report = nullptr);

/// Unsplit explicit projector-splitting step for moderate eps; one collision table per step.
LowRankState ksl_nonstiff_step(const LowRankState& state, const SolverConfig& cfg, const CollisionOperator& op,
                               StepReport* report = nullptr);

enum class BgkVariant { XL, SXL };

LowRankState bgk_collision_substep(const LowRankState& state, const SolverConfig& cfg, BgkVariant variant,
                                   StepReport* report = nullptr);

LowRankState bgk_step(const LowRankState& state, const SolverConfig& cfg, BgkVariant variant,
                      StepReport* report = nullptr);

}  // namespace dlrk
