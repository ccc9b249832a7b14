#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "dlrk/common.hpp"
#include "dlrk/grid.hpp"

namespace dlrk {

/// Radial gain integral 2*pi * int_0^R xi J0(a xi) J0(b xi) dxi in closed form (Lommel).
double lommel_gain(double R, double a, double b);

/// Fourier kernel modes of the 2D constant-kernel (B = 1/(2 pi)) collision operator on
/// the periodic box [-L, L)^2 with relative-velocity support |v - v_*| <= R.
///
/// The gain weight of a wave-vector pair (l, m) depends only on the integers
/// p = |l+m|^2, q = |l-m|^2; the table stores each distinct (p, q) once.
/// Nyquist modes (index -n/2 in either direction) are carried as zero so the
/// retained mode set is symmetric and the operator output stays real.
class KernelModes {
 public:
  static KernelModes build(Index n_v, double L, double R);

  Index n_v() const { return n_v_; }
  double L() const { return L_; }
  double R() const { return R_; }
  /// Highest retained wave number per dimension (n_v/2 - 1).
  Index half() const { return half_; }
  Index modes_per_dim() const { return 2 * half_ + 1; }

  /// G(p, q); throws ContractViolation for a key never tabulated.
  double gain(std::int64_t p, std::int64_t q) const;
  const std::unordered_map<std::uint64_t, double>& table() const { return table_; }
  /// Loss modes lambda_l = G(4|l|^2, 0), indexed like a spectrum.
  double loss(Index l1, Index l2) const;

  /// Dense evaluation weights beta(l, k-l) - beta(l, l) for output k and input l,
  /// both as flat spectrum indices; entries with k-l outside the range are unused.
  double weight(Index k_flat, Index l_flat) const { return weights_[k_flat * span_ + l_flat]; }

 private:
  static std::uint64_t key(std::int64_t p, std::int64_t q) {
    return (static_cast<std::uint64_t>(p) << 32) | static_cast<std::uint64_t>(q);
  }

  Index n_v_ = 0;
  double L_ = 0.0;
  double R_ = 0.0;
  Index half_ = 0;
  Index span_ = 0;  // modes_per_dim^2
  std::unordered_map<std::uint64_t, double> table_;
  Vector loss_;
  std::vector<double> weights_;
};

/// Fourier coefficients on the retained modes, (modes_per_dim x modes_per_dim),
/// entry (k1 + half, k2 + half).
using Spectrum = ComplexMatrix;

/// Collocation transforms between grid values and retained Fourier modes,
/// f(v) = sum_k fhat_k exp(i (pi/L) k.v).
class SpectralTransform {
 public:
  SpectralTransform(Index n_v, double L, Index half);
  Spectrum forward(const Vector& f) const;
  /// Inverse transform; `max_imag` receives the largest discarded imaginary part.
  Vector inverse(const Spectrum& fhat, double* max_imag = nullptr) const;

 private:
  Index n_v_;
  ComplexMatrix forward_;  // modes x n_v
  ComplexMatrix inverse_;  // n_v x modes
};

/// Direct O(n^4) spectral sum Qhat_k = sum_{l+m=k} ghat_l fhat_m [beta(l,m) - beta(l,l)].
Spectrum bilinear_spectrum(const Spectrum& ghat, const Spectrum& fhat, const KernelModes& modes);

/// Q(g, f) on the 2D velocity grid.
Vector q_bilinear(const Vector& g, const Vector& f, const KernelModes& modes);
Vector q_quadratic(const Vector& f, const KernelModes& modes);

struct BilinearWithResidue {
  Vector value;
  double max_imag = 0.0;
};
BilinearWithResidue q_bilinear_with_residue(const Vector& g, const Vector& f, const KernelModes& modes);

/// Serial reference: naive DFTs and per-pair Lommel evaluation, no tables.
Vector q_bilinear_reference(const Vector& g, const Vector& f, const VelocityGrid& grid, double R);

/// Penalty estimate sup |Q^-(f)| = sup_x rho for B = 1/(2 pi) in two velocity dimensions.
double loss_bound(const Vector& rho);

/// Shared kernel modes plus transforms, with a call counter on bilinear evaluations.
class CollisionOperator {
 public:
  /// With `conservative`, every output is projected onto the orthogonal complement of
  /// span{1, v1, v2, |v|^2}, so discrete mass, momentum and energy are conserved exactly.
  CollisionOperator(const VelocityGrid& grid, double R, bool conservative = false);
  bool conservative() const { return static_cast<bool>(invariants_); }

  const KernelModes& modes() const { return *modes_; }
  const VelocityGrid& grid() const { return grid_; }

  Spectrum transform(const Vector& f) const { return transform_->forward(f); }
  /// Counted: one call to the bilinear operator.
  Vector bilinear(const Spectrum& ghat, const Spectrum& fhat) const;
  Vector bilinear(const Vector& g, const Vector& f) const;
  Vector quadratic(const Vector& f) const;

  std::int64_t calls() const { return calls_->load(); }
  void reset_calls() const { calls_->store(0); }

 private:
  VelocityGrid grid_;
  std::shared_ptr<const KernelModes> modes_;
  std::shared_ptr<const SpectralTransform> transform_;
  std::shared_ptr<std::atomic<std::int64_t>> calls_;
  std::shared_ptr<const Matrix> invariants_;  // orthonormal basis of the collision invariants
};

}  // namespace dlrk
