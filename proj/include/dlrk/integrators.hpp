#pragma once

#include <functional>
#include <optional>
#include <random>

#include "dlrk/common.hpp"
#include "dlrk/lowrank.hpp"

namespace dlrk {

/// F(K V^T) = kmap(K) vmap(V)^T for every factorisation of the argument.
struct SeparablePair {
  std::function<Matrix(const Matrix& K)> kmap;  // m1 x r -> m1 x r~
  std::function<Matrix(const Matrix& V)> vmap;  // m2 x r -> m2 x r~
};

/// Matrix differential equation dA/dt = F(t, A) with A of size rows x cols.
struct MatrixOde {
  Index rows = 0;
  Index cols = 0;
  std::function<Matrix(double t, const Matrix& A)> rhs;
  std::optional<SeparablePair> separable;

  /// Checks the separable contract on random rank-`rank` probes; throws ContractViolation.
  void validate_separable(Index rank, std::mt19937_64& rng, int probes = 3) const;
};

/// Y = X S V^T with Euclidean-orthonormal X and V.
struct FactoredMatrix {
  Matrix X;
  Matrix S;
  Matrix V;

  Index rank() const { return S.rows(); }
  Matrix full() const { return X * S * V.transpose(); }
};

enum class Substep { Euler, RK4 };

struct StepDiagnostics {
  Index augmented_rank = 0;  // columns of X_hat
  Vector singular_values;
};

/// One XL step: K-substep with V fixed, augmentation [X, K], L-substep from [V S^T, 0],
/// QR and truncation. `substeps` sub-intervals of the chosen scheme cover [t, t + dt].
FactoredMatrix xl_step(const MatrixOde& ode, const FactoredMatrix& Y, double t, double dt, Substep scheme,
                       const Truncation& truncation, StepDiagnostics* diag = nullptr, int substeps = 1);

/// One sXL step: augmentation [X, kmap(X S)], explicit-Euler L-step, QR and truncation.
FactoredMatrix sxl_step(const MatrixOde& ode, const FactoredMatrix& Y, double t, double dt,
                        const Truncation& truncation, StepDiagnostics* diag = nullptr);

/// Augmented spatial basis produced by the X-step of xl_step (exposed for span comparisons).
Matrix xl_augmented_basis(const MatrixOde& ode, const FactoredMatrix& Y, double t, double dt, Substep scheme,
                          int substeps = 1);
Matrix sxl_augmented_basis(const MatrixOde& ode, const FactoredMatrix& Y);

/// Largest principal angle (radians) between the column spans of two orthonormal bases;
/// with `containment`, measures how far span(A) is from lying inside span(B).
double subspace_angle(const Matrix& A, const Matrix& B, bool containment = false);

}  // namespace dlrk
