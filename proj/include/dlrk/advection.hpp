#pragma once

#include "dlrk/common.hpp"
#include "dlrk/grid.hpp"

namespace dlrk {

double minmod(double a, double b);

enum class Upwind {
  Positive,  // left-biased reconstruction, for positive advection speed
  Negative,  // right-biased reconstruction, for negative advection speed
};

/// Conservative MUSCL/minmod flux difference (F_{i+1/2} - F_{i-1/2}) / dx for unit speed.
/// Positive is the operator written Dm elsewhere, Negative is Dp.
Vector upwind_difference(const Vector& a, const SpatialGrid& grid, Upwind dir);

/// One forward-Euler step of a_t + speed a_x = 0.
Vector transport_column(const Vector& a, double speed, double dt, const SpatialGrid& grid);

/// Courant number max|speed| dt / dx; throws ConfigError above 1.
double check_cfl(double max_speed, double dt, const SpatialGrid& grid);

/// One forward-Euler MUSCL step of f_t + v_1 f_x = 0 on the full tensor (OpenMP over velocity nodes).
Matrix muscl_transport_full(const Matrix& f, double dt, const SpatialGrid& xg, const VelocityGrid& vg);

/// Serial reference built on ghost_fill with explicit reconstruction, kept for tests and benchmarks.
Matrix muscl_transport_full_reference(const Matrix& f, double dt, const SpatialGrid& xg,
                                      const VelocityGrid& vg);

/// A[j, l] = <v_axis V_j V_l>_v.
Matrix coefficient_matrix_v(const Matrix& V, const VelocityGrid& vg, int axis);

/// Eigen-split of a symmetric matrix into positive and negative semidefinite parts.
struct SymmetricSplit {
  Matrix eigenvectors;
  Vector eigenvalues;
  Matrix positive;
  Matrix negative;
};
SymmetricSplit split_symmetric(const Matrix& A);

/// K-step transport K_j <- K_j - dt sum_l A_jl d_x K_l, upwinded per characteristic of A.
Matrix projected_K_transport(const Matrix& K, const Matrix& A, double dt, const SpatialGrid& grid);

/// plus(i, k) = <X_i, Dm X_k>_x and minus(i, k) = <X_i, Dp X_k>_x.
struct ProjectedDerivative {
  Matrix plus;
  Matrix minus;
};
ProjectedDerivative projected_x_derivative(const Matrix& X, const SpatialGrid& grid);

}  // namespace dlrk
