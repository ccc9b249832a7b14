#include "dlrk/integrators.hpp"

#include <algorithm>
#include <cmath>

namespace dlrk {

namespace {

using Rhs = std::function<Matrix(double, const Matrix&)>;

Matrix integrate(const Rhs& g, Matrix y, double t, double dt, Substep scheme, int substeps) {
  const double h = dt / substeps;
  for (int s = 0; s < substeps; ++s) {
    const double ts = t + s * h;
    if (scheme == Substep::Euler) {
      y += h * g(ts, y);
    } else {
      const Matrix k1 = g(ts, y);
      const Matrix k2 = g(ts + 0.5 * h, y + 0.5 * h * k1);
      const Matrix k3 = g(ts + 0.5 * h, y + 0.5 * h * k2);
      const Matrix k4 = g(ts + h, y + h * k3);
      y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!y.allFinite()) throw IntegrationFailure("matrix ODE substep produced non-finite values");
  }
  return y;
}

void check_factors(const MatrixOde& ode, const FactoredMatrix& Y) {
  require(Y.X.rows() == ode.rows && Y.V.rows() == ode.cols, "integrator: factor shapes do not match ODE");
  require(Y.S.rows() == Y.X.cols() && Y.S.cols() == Y.V.cols(), "integrator: inconsistent rank");
}

FactoredMatrix finish(const Matrix& X_hat, const Matrix& L_hat, const Truncation& truncation,
                      StepDiagnostics* diag) {
  if (!L_hat.allFinite()) throw IntegrationFailure("L-step produced non-finite values");
  const WeightedQr qr = weighted_qr(L_hat, 1.0);
  const TruncationResult tr = truncate(X_hat, qr.R.transpose(), qr.Q, truncation);
  if (diag) {
    diag->augmented_rank = X_hat.cols();
    diag->singular_values = tr.singular_values;
  }
  return {tr.state.X, tr.state.S, tr.state.V};
}

Matrix initial_L(const FactoredMatrix& Y, Index columns) {
  Matrix L = Matrix::Zero(Y.V.rows(), columns);
  L.leftCols(Y.rank()) = Y.V * Y.S.transpose();
  return L;
}

}  // namespace

void MatrixOde::validate_separable(Index rank, std::mt19937_64& rng, int probes) const {
  require(separable.has_value(), "validate_separable: no separable pair registered");
  std::normal_distribution<double> normal;
  for (int p = 0; p < probes; ++p) {
    Matrix K(rows, rank), V(cols, rank);
    for (Index i = 0; i < K.size(); ++i) K.data()[i] = normal(rng);
    for (Index i = 0; i < V.size(); ++i) V.data()[i] = normal(rng);
    const Matrix direct = rhs(0.0, K * V.transpose());
    const Matrix split = separable->kmap(K) * separable->vmap(V).transpose();
    const double scale = std::max(direct.norm(), 1e-300);
    if ((direct - split).norm() > 1e-10 * scale)
      throw ContractViolation("separable pair does not reproduce F(K V^T)");
  }
}

Matrix xl_augmented_basis(const MatrixOde& ode, const FactoredMatrix& Y, double t, double dt, Substep scheme,
                          int substeps) {
  check_factors(ode, Y);
  const Matrix& V = Y.V;
  const Rhs kstep = [&](double s, const Matrix& K) { return Matrix(ode.rhs(s, K * V.transpose()) * V); };
  const Matrix K1 = integrate(kstep, Y.X * Y.S, t, dt, scheme, substeps);
  return orthonormalize_augment(Y.X, K1, 1.0).basis;
}

Matrix sxl_augmented_basis(const MatrixOde& ode, const FactoredMatrix& Y) {
  check_factors(ode, Y);
  require(ode.separable.has_value(), "sxl_step: separable pair required");
  return orthonormalize_augment(Y.X, ode.separable->kmap(Y.X * Y.S), 1.0).basis;
}

FactoredMatrix xl_step(const MatrixOde& ode, const FactoredMatrix& Y, double t, double dt, Substep scheme,
                       const Truncation& truncation, StepDiagnostics* diag, int substeps) {
  const Matrix X_hat = xl_augmented_basis(ode, Y, t, dt, scheme, substeps);
  const Rhs lstep = [&](double s, const Matrix& L) {
    return Matrix(ode.rhs(s, X_hat * L.transpose()).transpose() * X_hat);
  };
  const Matrix L1 = integrate(lstep, initial_L(Y, X_hat.cols()), t, dt, scheme, substeps);
  return finish(X_hat, L1, truncation, diag);
}

FactoredMatrix sxl_step(const MatrixOde& ode, const FactoredMatrix& Y, double t, double dt,
                        const Truncation& truncation, StepDiagnostics* diag) {
  const Matrix X_hat = sxl_augmented_basis(ode, Y);
  const Matrix L0 = initial_L(Y, X_hat.cols());
  const Matrix L1 = L0 + dt * ode.rhs(t, X_hat * L0.transpose()).transpose() * X_hat;
  return finish(X_hat, L1, truncation, diag);
}

double subspace_angle(const Matrix& A, const Matrix& B, bool containment) {
  require(A.rows() == B.rows(), "subspace_angle: row mismatch");
  if (!containment) require(A.cols() == B.cols(), "subspace_angle: dimension mismatch");
  // Residual of projecting A onto span(B): sin of the largest principal angle.
  const Matrix residual = A - B * (B.transpose() * A);
  Eigen::JacobiSVD<Matrix> svd(residual);
  const double s = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  return std::asin(std::min(1.0, s));
}

}  // namespace dlrk
