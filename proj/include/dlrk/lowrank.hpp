#pragma once

#include "dlrk/common.hpp"
#include "dlrk/grid.hpp"

namespace dlrk {

/// f(x, v) ~ X S V^T with X orthonormal under <.,.>_x and V under <.,.>_v.
struct LowRankState {
  Matrix X;  // n_x x r
  Matrix S;  // r x r
  Matrix V;  // n_v^dim x r

  Index rank() const { return S.rows(); }
};

/// Rank selection for SVD truncation.
struct Truncation {
  enum class Mode { FixedRank, Threshold };
  Mode mode = Mode::FixedRank;
  Index rank = 1;
  /// In threshold mode: keep the smallest k with sqrt(sum_{j>k} sigma_j^2) <= threshold.
  double threshold = 0.0;

  static Truncation fixed(Index r) { return {Mode::FixedRank, r, 0.0}; }
  static Truncation tail(double threshold) { return {Mode::Threshold, 1, threshold}; }
};

/// A = Q R with Q^T Q * weight = I.
struct WeightedQr {
  Matrix Q;
  Matrix R;
};

WeightedQr weighted_qr(const Matrix& A, double weight);

Matrix evaluate_full(const LowRankState& state);

/// Best approximation of `field` in the quadrature-weighted Frobenius norm.
LowRankState from_full(const Matrix& field, const SpatialGrid& xg, const VelocityGrid& vg,
                       const Truncation& target);

struct Augmented {
  Matrix basis;     // [X, new columns]
  Index added = 0;  // number of new columns kept
};

/// Extends the weighted-orthonormal X by the directions of `extras` not already
/// spanned. X is copied unchanged into the leading columns. Residual directions
/// with norm below 1e-10 times the largest extras column norm are dropped.
Augmented orthonormalize_augment(const Matrix& X, const Matrix& extras, double weight);

struct TruncationResult {
  LowRankState state;
  Vector singular_values;  // all singular values of the augmented S, descending
  double discarded = 0.0;  // l2 norm of dropped singular values
};

/// SVD truncation of X_hat S_hat V_hat^T (factors weighted-orthonormal).
TruncationResult truncate(const Matrix& X_hat, const Matrix& S_hat, const Matrix& V_hat,
                          const Truncation& target);

/// Weighted Frobenius norm sqrt(sum f^2 dx dv^d).
double weighted_norm(const Matrix& field, const SpatialGrid& xg, const VelocityGrid& vg);

/// max |X^T X w - I|.
double orthonormality_defect(const Matrix& X, double weight);

}  // namespace dlrk
