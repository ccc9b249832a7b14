#include "dlrk/advection.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace dlrk {

namespace {

// out = D a for contiguous a of length n; `pad` is scratch of length n + 4.
void flux_difference(const double* a, double* out, Index n, Boundary bc, Upwind dir, double inv_dx,
                     std::vector<double>& pad) {
  pad.resize(static_cast<std::size_t>(n + 4));
  double* p = pad.data() + 2;
  std::copy(a, a + n, p);
  if (bc == Boundary::Periodic) {
    p[-1] = a[(n - 1) % n];
    p[-2] = a[((n - 2) % n + n) % n];
    p[n] = a[0];
    p[n + 1] = a[1 % n];
  } else {
    p[-1] = p[-2] = a[0];
    p[n] = p[n + 1] = a[n - 1];
  }
  // Interface values at i + 1/2 for i = -1 .. n-1.
  double prev = 0.0;
  for (Index i = -1; i < n; ++i) {
    double face;
    if (dir == Upwind::Positive)
      face = p[i] + 0.5 * minmod(p[i] - p[i - 1], p[i + 1] - p[i]);
    else
      face = p[i + 1] - 0.5 * minmod(p[i + 1] - p[i], p[i + 2] - p[i + 1]);
    if (i >= 0) out[i] = (face - prev) * inv_dx;
    prev = face;
  }
}

void transport_into(const double* a, double* out, Index n, double speed, double dt, const SpatialGrid& grid,
                    std::vector<double>& pad, std::vector<double>& diff) {
  if (speed == 0.0) {
    std::copy(a, a + n, out);
    return;
  }
  diff.resize(static_cast<std::size_t>(n));
  flux_difference(a, diff.data(), n, grid.bc, speed > 0.0 ? Upwind::Positive : Upwind::Negative,
                  1.0 / grid.dx(), pad);
  const double nu = dt * speed;
  for (Index i = 0; i < n; ++i) out[i] = a[i] - nu * diff[static_cast<std::size_t>(i)];
}

}  // namespace

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return a > 0.0 ? std::min(a, b) : std::max(a, b);
}

Vector upwind_difference(const Vector& a, const SpatialGrid& grid, Upwind dir) {
  require(a.size() == grid.n_x, "upwind_difference: length mismatch");
  Vector out(a.size());
  std::vector<double> pad;
  flux_difference(a.data(), out.data(), a.size(), grid.bc, dir, 1.0 / grid.dx(), pad);
  return out;
}

Vector transport_column(const Vector& a, double speed, double dt, const SpatialGrid& grid) {
  require(a.size() == grid.n_x, "transport_column: length mismatch");
  check_cfl(speed, dt, grid);
  Vector out(a.size());
  std::vector<double> pad, diff;
  transport_into(a.data(), out.data(), a.size(), speed, dt, grid, pad, diff);
  return out;
}

double check_cfl(double max_speed, double dt, const SpatialGrid& grid) {
  const double cfl = std::abs(max_speed) * dt / grid.dx();
  if (cfl > 1.0) {
    std::ostringstream msg;
    msg << "CFL violation: |speed| dt / dx = " << cfl << " > 1";
    throw ConfigError(msg.str());
  }
  return cfl;
}

Matrix muscl_transport_full(const Matrix& f, double dt, const SpatialGrid& xg, const VelocityGrid& vg) {
  require(f.rows() == xg.n_x && f.cols() == vg.size(), "muscl_transport_full: shape mismatch");
  const Vector speed = vg.component(0);
  check_cfl(speed.cwiseAbs().maxCoeff(), dt, xg);
  Matrix out(f.rows(), f.cols());
  const Index n = f.rows();
#pragma omp parallel if (!omp_in_parallel())
  {
    std::vector<double> pad, diff;
#pragma omp for schedule(static)
    for (Index k = 0; k < f.cols(); ++k)
      transport_into(f.col(k).data(), out.col(k).data(), n, speed[k], dt, xg, pad, diff);
  }
  return out;
}

Matrix muscl_transport_full_reference(const Matrix& f, double dt, const SpatialGrid& xg,
                                      const VelocityGrid& vg) {
  require(f.rows() == xg.n_x && f.cols() == vg.size(), "muscl_transport_full_reference: shape mismatch");
  const Vector speed = vg.component(0);
  check_cfl(speed.cwiseAbs().maxCoeff(), dt, xg);
  const Index n = xg.n_x;
  const double dx = xg.dx();
  Matrix out = f;
  for (Index k = 0; k < f.cols(); ++k) {
    const double c = speed[k];
    if (c == 0.0) continue;
    const Vector g = ghost_fill(f.col(k), xg.bc, 2);
    Vector flux(n + 1);  // flux at faces i - 1/2, i = 0..n
    for (Index face = 0; face <= n; ++face) {
      const Index left = face + 1;  // padded index of the cell left of the face
      const Index right = face + 2;
      double value;
      if (c > 0.0) {
        const double slope = minmod(g[left] - g[left - 1], g[right] - g[left]);
        value = g[left] + 0.5 * slope;
      } else {
        const double slope = minmod(g[right] - g[left], g[right + 1] - g[right]);
        value = g[right] - 0.5 * slope;
      }
      flux[face] = c * value;
    }
    for (Index i = 0; i < n; ++i) out(i, k) = f(i, k) - dt / dx * (flux[i + 1] - flux[i]);
  }
  return out;
}

Matrix coefficient_matrix_v(const Matrix& V, const VelocityGrid& vg, int axis) {
  require(V.rows() == vg.size(), "coefficient_matrix_v: velocity size mismatch");
  const Vector v = vg.component(axis);
  Matrix A = V.transpose() * (v.asDiagonal() * V) * vg.weight();
  return 0.5 * (A + A.transpose());
}

SymmetricSplit split_symmetric(const Matrix& A) {
  require(A.rows() == A.cols(), "split_symmetric: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
  SymmetricSplit s;
  s.eigenvectors = eig.eigenvectors();
  s.eigenvalues = eig.eigenvalues();
  const Vector pos = s.eigenvalues.cwiseMax(0.0);
  const Vector neg = s.eigenvalues.cwiseMin(0.0);
  s.positive = s.eigenvectors * pos.asDiagonal() * s.eigenvectors.transpose();
  s.negative = s.eigenvectors * neg.asDiagonal() * s.eigenvectors.transpose();
  return s;
}

Matrix projected_K_transport(const Matrix& K, const Matrix& A, double dt, const SpatialGrid& grid) {
  require(K.rows() == grid.n_x && A.rows() == K.cols() && A.cols() == K.cols(),
          "projected_K_transport: shape mismatch");
  const SymmetricSplit s = split_symmetric(A);
  check_cfl(s.eigenvalues.size() ? s.eigenvalues.cwiseAbs().maxCoeff() : 0.0, dt, grid);
  const Matrix W = K * s.eigenvectors;
  Matrix Wn(W.rows(), W.cols());
  const Index n = W.rows();
#pragma omp parallel if (!omp_in_parallel())
  {
    std::vector<double> pad, diff;
#pragma omp for schedule(static)
    for (Index c = 0; c < W.cols(); ++c)
      transport_into(W.col(c).data(), Wn.col(c).data(), n, s.eigenvalues[c], dt, grid, pad, diff);
  }
  return Wn * s.eigenvectors.transpose();
}

ProjectedDerivative projected_x_derivative(const Matrix& X, const SpatialGrid& grid) {
  require(X.rows() == grid.n_x, "projected_x_derivative: length mismatch");
  const Index r = X.cols();
  Matrix Dm(X.rows(), r), Dp(X.rows(), r);
  const double inv_dx = 1.0 / grid.dx();
#pragma omp parallel if (!omp_in_parallel())
  {
    std::vector<double> pad;
#pragma omp for schedule(static)
    for (Index k = 0; k < r; ++k) {
      flux_difference(X.col(k).data(), Dm.col(k).data(), X.rows(), grid.bc, Upwind::Positive, inv_dx, pad);
      flux_difference(X.col(k).data(), Dp.col(k).data(), X.rows(), grid.bc, Upwind::Negative, inv_dx, pad);
    }
  }
  return {X.transpose() * Dm * grid.dx(), X.transpose() * Dp * grid.dx()};
}

}  // namespace dlrk
