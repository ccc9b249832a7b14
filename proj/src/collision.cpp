#include "dlrk/collision.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace dlrk {

namespace {

using cd = std::complex<double>;

double j0(double x) { return std::cyl_bessel_j(0.0, x); }
double j1(double x) { return std::cyl_bessel_j(1.0, x); }

double wave_scale(double L) { return std::numbers::pi / (2.0 * L); }

Index norm2(Index a, Index b) { return a * a + b * b; }

}  // namespace

double lommel_gain(double R, double a, double b) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (a == b) {
    const double x = a * R;
    return two_pi * 0.5 * R * R * (j0(x) * j0(x) + j1(x) * j1(x));
  }
  const double aR = a * R;
  const double bR = b * R;
  return two_pi * R * (a * j1(aR) * j0(bR) - b * j0(aR) * j1(bR)) / ((a - b) * (a + b));
}

KernelModes KernelModes::build(Index n_v, double L, double R) {
  if (n_v < 4 || n_v % 2 != 0) throw ConfigError("collision: n_v must be even and >= 4");
  if (!(L > 0.0)) throw ConfigError("collision: L must be positive");
  if (!(R > 0.0) || R > 2.0 * L) throw ConfigError("collision: R must satisfy 0 < R <= 2L");

  KernelModes km;
  km.n_v_ = n_v;
  km.L_ = L;
  km.R_ = R;
  km.half_ = n_v / 2 - 1;
  const Index h = km.half_;
  const Index M = 2 * h + 1;
  km.span_ = M * M;
  const double s = wave_scale(L);

  auto lookup = [&](Index p, Index q) {
    const auto k = key(p, q);
    auto it = km.table_.find(k);
    if (it != km.table_.end()) return it->second;
    const double g = lommel_gain(R, s * std::sqrt(static_cast<double>(p)),
                                 s * std::sqrt(static_cast<double>(q)));
    km.table_.emplace(k, g);
    return g;
  };

  // The full tabulated range {-n/2, ..., n/2-1}^2 for both wave vectors.
  const Index lo = -n_v / 2;
  const Index hi = n_v / 2 - 1;
  for (Index l1 = lo; l1 <= hi; ++l1)
    for (Index l2 = lo; l2 <= hi; ++l2)
      for (Index m1 = lo; m1 <= hi; ++m1)
        for (Index m2 = lo; m2 <= hi; ++m2) lookup(norm2(l1 + m1, l2 + m2), norm2(l1 - m1, l2 - m2));

  km.loss_.resize(M * M);
  for (Index l1 = -h; l1 <= h; ++l1)
    for (Index l2 = -h; l2 <= h; ++l2) km.loss_[(l1 + h) * M + (l2 + h)] = lookup(4 * norm2(l1, l2), 0);

  km.weights_.assign(static_cast<std::size_t>(km.span_ * km.span_), 0.0);
  for (Index k1 = -h; k1 <= h; ++k1)
    for (Index k2 = -h; k2 <= h; ++k2) {
      const Index kf = (k1 + h) * M + (k2 + h);
      for (Index l1 = std::max(-h, k1 - h); l1 <= std::min(h, k1 + h); ++l1)
        for (Index l2 = std::max(-h, k2 - h); l2 <= std::min(h, k2 + h); ++l2) {
          const Index lf = (l1 + h) * M + (l2 + h);
          const Index m1 = k1 - l1;
          const Index m2 = k2 - l2;
          km.weights_[kf * km.span_ + lf] =
              lookup(norm2(k1, k2), norm2(l1 - m1, l2 - m2)) - km.loss_[lf];
        }
    }
  return km;
}

double KernelModes::gain(std::int64_t p, std::int64_t q) const {
  auto it = table_.find(key(p, q));
  if (it == table_.end()) throw ContractViolation("KernelModes::gain: pair not tabulated");
  return it->second;
}

double KernelModes::loss(Index l1, Index l2) const {
  require(std::abs(l1) <= half_ && std::abs(l2) <= half_, "KernelModes::loss: mode out of range");
  return loss_[(l1 + half_) * modes_per_dim() + (l2 + half_)];
}

SpectralTransform::SpectralTransform(Index n_v, double L, Index half) : n_v_(n_v) {
  const Index M = 2 * half + 1;
  forward_.resize(M, n_v);
  inverse_.resize(n_v, M);
  const double dv = 2.0 * L / static_cast<double>(n_v);
  const double s = std::numbers::pi / L;
  for (Index k = -half; k <= half; ++k)
    for (Index j = 0; j < n_v; ++j) {
      const double v = -L + static_cast<double>(j) * dv;
      const double phase = s * static_cast<double>(k) * v;
      forward_(k + half, j) = std::polar(1.0 / static_cast<double>(n_v), -phase);
      inverse_(j, k + half) = std::polar(1.0, phase);
    }
}

Spectrum SpectralTransform::forward(const Vector& f) const {
  require(f.size() == n_v_ * n_v_, "SpectralTransform::forward: size mismatch");
  // Row-major flat layout (k1 slowest) maps onto a column-major n x n view transposed.
  Eigen::Map<const Matrix> view(f.data(), n_v_, n_v_);  // view(k2, k1)
  const ComplexMatrix grid = view.transpose().cast<cd>();
  return forward_ * grid * forward_.transpose();
}

Vector SpectralTransform::inverse(const Spectrum& fhat, double* max_imag) const {
  const ComplexMatrix values = inverse_ * fhat * inverse_.transpose();  // (k1, k2)
  if (max_imag) *max_imag = values.imag().cwiseAbs().maxCoeff();
  Vector out(n_v_ * n_v_);
  Eigen::Map<Matrix> view(out.data(), n_v_, n_v_);
  view = values.real().transpose();
  return out;
}

Spectrum bilinear_spectrum(const Spectrum& ghat, const Spectrum& fhat, const KernelModes& modes) {
  const Index h = modes.half();
  const Index M = modes.modes_per_dim();
  require(ghat.rows() == M && ghat.cols() == M && fhat.rows() == M && fhat.cols() == M,
          "bilinear_spectrum: spectrum shape does not match kernel modes");
  Spectrum out(M, M);
#pragma omp parallel for schedule(static) if (!omp_in_parallel())
  for (Index kf = 0; kf < M * M; ++kf) {
    const Index k1 = kf / M - h;
    const Index k2 = kf % M - h;
    double re = 0.0;
    double im = 0.0;
    for (Index l1 = std::max(-h, k1 - h); l1 <= std::min(h, k1 + h); ++l1) {
      const Index m1 = k1 - l1;
      for (Index l2 = std::max(-h, k2 - h); l2 <= std::min(h, k2 + h); ++l2) {
        const Index m2 = k2 - l2;
        const Index lf = (l1 + h) * M + (l2 + h);
        const double w = modes.weight(kf, lf);
        const cd g = ghat(l1 + h, l2 + h);
        const cd f = fhat(m1 + h, m2 + h);
        re += w * (g.real() * f.real() - g.imag() * f.imag());
        im += w * (g.real() * f.imag() + g.imag() * f.real());
      }
    }
    out(k1 + h, k2 + h) = cd(re, im);
  }
  return out;
}

BilinearWithResidue q_bilinear_with_residue(const Vector& g, const Vector& f, const KernelModes& modes) {
  const Index n = modes.n_v();
  require(g.size() == n * n && f.size() == n * n, "q_bilinear: grid does not match kernel modes");
  const SpectralTransform tr(n, modes.L(), modes.half());
  BilinearWithResidue out;
  out.value = tr.inverse(bilinear_spectrum(tr.forward(g), tr.forward(f), modes), &out.max_imag);
  return out;
}

Vector q_bilinear(const Vector& g, const Vector& f, const KernelModes& modes) {
  return q_bilinear_with_residue(g, f, modes).value;
}

Vector q_quadratic(const Vector& f, const KernelModes& modes) { return q_bilinear(f, f, modes); }

Vector q_bilinear_reference(const Vector& g, const Vector& f, const VelocityGrid& grid, double R) {
  require(grid.dim == 2, "q_bilinear_reference: two velocity dimensions required");
  const Index n = grid.n;
  const Index N = n * n;
  require(g.size() == N && f.size() == N, "q_bilinear_reference: size mismatch");
  const Index h = n / 2 - 1;
  const double L = grid.half_width;
  const double s = std::numbers::pi / L;
  const double ws = wave_scale(L);

  auto dft = [&](const Vector& u, Index k1, Index k2) {
    cd acc = 0.0;
    for (Index j1 = 0; j1 < n; ++j1)
      for (Index j2 = 0; j2 < n; ++j2) {
        const double phase = s * (static_cast<double>(k1) * grid.node(j1) + static_cast<double>(k2) * grid.node(j2));
        acc += u[j1 * n + j2] * std::polar(1.0, -phase);
      }
    return acc / static_cast<double>(N);
  };
  const Index M = 2 * h + 1;
  ComplexMatrix gh(M, M), fh(M, M), qh(M, M);
  for (Index k1 = -h; k1 <= h; ++k1)
    for (Index k2 = -h; k2 <= h; ++k2) {
      gh(k1 + h, k2 + h) = dft(g, k1, k2);
      fh(k1 + h, k2 + h) = dft(f, k1, k2);
    }
  auto beta = [&](Index l1, Index l2, Index m1, Index m2) {
    const double a = ws * std::hypot(static_cast<double>(l1 + m1), static_cast<double>(l2 + m2));
    const double b = ws * std::hypot(static_cast<double>(l1 - m1), static_cast<double>(l2 - m2));
    return lommel_gain(R, a, b);
  };
  for (Index k1 = -h; k1 <= h; ++k1)
    for (Index k2 = -h; k2 <= h; ++k2) {
      cd acc = 0.0;
      for (Index l1 = -h; l1 <= h; ++l1)
        for (Index l2 = -h; l2 <= h; ++l2) {
          const Index m1 = k1 - l1;
          const Index m2 = k2 - l2;
          if (std::abs(m1) > h || std::abs(m2) > h) continue;
          const double w = beta(l1, l2, m1, m2) - beta(l1, l2, l1, l2);
          acc += gh(l1 + h, l2 + h) * fh(m1 + h, m2 + h) * w;
        }
      qh(k1 + h, k2 + h) = acc;
    }
  Vector out(N);
  for (Index j1 = 0; j1 < n; ++j1)
    for (Index j2 = 0; j2 < n; ++j2) {
      cd acc = 0.0;
      for (Index k1 = -h; k1 <= h; ++k1)
        for (Index k2 = -h; k2 <= h; ++k2) {
          const double phase = s * (static_cast<double>(k1) * grid.node(j1) + static_cast<double>(k2) * grid.node(j2));
          acc += qh(k1 + h, k2 + h) * std::polar(1.0, phase);
        }
      out[j1 * n + j2] = acc.real();
    }
  return out;
}

double loss_bound(const Vector& rho) {
  require(rho.size() > 0, "loss_bound: empty density");
  return rho.maxCoeff();
}

CollisionOperator::CollisionOperator(const VelocityGrid& grid, double R, bool conservative)
    : grid_(grid),
      calls_(std::make_shared<std::atomic<std::int64_t>>(0)) {
  if (grid.dim != 2) throw ConfigError("collision operator requires two velocity dimensions");
  modes_ = std::make_shared<const KernelModes>(KernelModes::build(grid.n, grid.half_width, R));
  transform_ = std::make_shared<const SpectralTransform>(grid.n, grid.half_width, modes_->half());
  if (conservative) {
    Matrix phi(grid.size(), 4);
    phi.col(0).setOnes();
    phi.col(1) = grid.component(0);
    phi.col(2) = grid.component(1);
    phi.col(3) = grid.speed_squared();
    Eigen::HouseholderQR<Matrix> qr(phi);
    invariants_ = std::make_shared<const Matrix>(qr.householderQ() * Matrix::Identity(grid.size(), 4));
  }
}

Vector CollisionOperator::bilinear(const Spectrum& ghat, const Spectrum& fhat) const {
  calls_->fetch_add(1, std::memory_order_relaxed);
  Vector q = transform_->inverse(bilinear_spectrum(ghat, fhat, *modes_));
  if (invariants_) q -= *invariants_ * (invariants_->transpose() * q);
  return q;
}

Vector CollisionOperator::bilinear(const Vector& g, const Vector& f) const {
  return bilinear(transform(g), transform(f));
}

Vector CollisionOperator::quadratic(const Vector& f) const {
  const Spectrum fh = transform(f);
  return bilinear(fh, fh);
}

}  // namespace dlrk
