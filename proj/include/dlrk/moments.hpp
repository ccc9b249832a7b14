#pragma once

#include <vector>

#include "dlrk/common.hpp"
#include "dlrk/grid.hpp"
#include "dlrk/lowrank.hpp"

namespace dlrk {

/// Density, bulk velocity, temperature and total energy per spatial cell.
struct MacroFields {
  Vector rho;
  Matrix u;  // n_x x dim
  Vector T;
  Vector E;  // (dim/2) rho T + (1/2) rho |u|^2
  /// Cells with rho <= 1e-14; u and T are reported as zero there.
  std::vector<bool> degenerate;

  Index cells() const { return rho.size(); }
  int dim() const { return static_cast<int>(u.cols()); }
  /// rho > 0 and T > 0 everywhere, all values finite.
  bool physical() const;

  /// Builds fields from primitive profiles and fills E.
  static MacroFields from_primitive(const Vector& rho, const Matrix& u, const Vector& T);
};

MacroFields compute_moments_full(const Matrix& f, const VelocityGrid& vg);

/// Moments straight from the factors, O(r (n_x + n_v^dim)).
MacroFields compute_moments_lowrank(const LowRankState& state, const VelocityGrid& vg);

/// rho / (2 pi T)^{dim/2} exp(-|v - u|^2 / (2T)) for dim = 1 or 2.
Matrix maxwellian(const MacroFields& m, const VelocityGrid& vg);

/// Two-dimensional Maxwellian; requires a dim = 2 grid.
Matrix maxwellian_2v(const MacroFields& m, const VelocityGrid& vg);

/// Rank-3 surrogate rho e^{-v^2/2}/sqrt(2 pi) (1 + v u + (v^2 - 1) u^2 / 2) on a dim = 1 grid.
Matrix maxwellian_bgk_1v(const Vector& rho, const Vector& u, const VelocityGrid& vg);

/// The three velocity profiles of the BGK surrogate, as columns:
/// phi, v phi, (v^2 - 1) phi / 2 with phi the unit Gaussian.
Matrix bgk_velocity_profiles(const VelocityGrid& vg);

/// Totals of mass, momentum (per component) and energy over the spatial domain.
struct ConservedTotals {
  double mass = 0.0;
  Vector momentum;
  double energy = 0.0;
};
ConservedTotals conserved_totals(const MacroFields& m, const SpatialGrid& xg);

}  // namespace dlrk
