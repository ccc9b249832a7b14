#include "dlrk/lowrank.hpp"

#include <algorithm>
#include <cmath>

namespace dlrk {

namespace {

constexpr double kDropTolerance = 1e-10;

Index select_rank(const Vector& sigma, const Truncation& target) {
  const Index n = sigma.size();
  if (target.mode == Truncation::Mode::FixedRank) {
    require(target.rank >= 1 && target.rank <= n, "truncate: target rank exceeds available rank");
    return target.rank;
  }
  require(target.threshold >= 0.0, "truncate: negative threshold");
  double tail = 0.0;
  Index k = n;
  while (k > 1) {
    const double next = tail + sigma[k - 1] * sigma[k - 1];
    if (std::sqrt(next) > target.threshold) break;
    tail = next;
    --k;
  }
  return k;
}

Matrix canonical_columns(Index rows, Index cols, double weight) {
  return Matrix::Identity(rows, cols) / std::sqrt(weight);
}

}  // namespace

WeightedQr weighted_qr(const Matrix& A, double weight) {
  require(weight > 0.0, "weighted_qr: weight must be positive");
  const Index m = A.rows();
  const Index n = A.cols();
  require(n <= m, "weighted_qr: more columns than rows");
  const double s = std::sqrt(weight);
  Eigen::HouseholderQR<Matrix> qr(A * s);
  WeightedQr out;
  out.Q = (qr.householderQ() * Matrix::Identity(m, n)) / s;
  out.R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  // Non-negative diagonal makes the factorisation unique for full-rank input.
  for (Index j = 0; j < n; ++j) {
    if (out.R(j, j) < 0.0) {
      out.R.row(j) *= -1.0;
      out.Q.col(j) *= -1.0;
    }
  }
  return out;
}

Matrix evaluate_full(const LowRankState& state) { return state.X * state.S * state.V.transpose(); }

double weighted_norm(const Matrix& field, const SpatialGrid& xg, const VelocityGrid& vg) {
  return field.norm() * std::sqrt(xg.dx() * vg.weight());
}

double orthonormality_defect(const Matrix& X, double weight) {
  const Matrix gram = X.transpose() * X * weight;
  return (gram - Matrix::Identity(X.cols(), X.cols())).cwiseAbs().maxCoeff();
}

LowRankState from_full(const Matrix& field, const SpatialGrid& xg, const VelocityGrid& vg,
                       const Truncation& target) {
  require(field.rows() == xg.n_x && field.cols() == vg.size(), "from_full: field shape mismatch");
  const Index max_rank = std::min(field.rows(), field.cols());
  if (target.mode == Truncation::Mode::FixedRank)
    require(target.rank >= 1 && target.rank <= max_rank, "from_full: rank out of range");

  const double wx = xg.dx();
  const double wv = vg.weight();
  if (field.cwiseAbs().maxCoeff() == 0.0) {
    const Index r = target.mode == Truncation::Mode::FixedRank ? target.rank : 1;
    return {canonical_columns(field.rows(), r, wx), Matrix::Zero(r, r),
            canonical_columns(field.cols(), r, wv)};
  }

  const double scale = std::sqrt(wx * wv);
  Eigen::BDCSVD<Matrix> svd(field * scale, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const Index r = select_rank(sigma, target);
  LowRankState state;
  state.X = svd.matrixU().leftCols(r) / std::sqrt(wx);
  state.V = svd.matrixV().leftCols(r) / std::sqrt(wv);
  state.S = sigma.head(r).asDiagonal();
  return state;
}

Augmented orthonormalize_augment(const Matrix& X, const Matrix& extras, double weight) {
  require(X.rows() == extras.rows(), "orthonormalize_augment: row mismatch");
  const Index n = X.rows();
  const Index r = X.cols();
  Augmented out;
  if (extras.cols() == 0 || r >= n) {
    out.basis = X;
    return out;
  }
  const double s = std::sqrt(weight);
  const Matrix Q0 = X * s;  // Euclidean-orthonormal
  Matrix residual = extras * s;
  const double scale = residual.colwise().norm().maxCoeff();
  if (scale == 0.0) {
    out.basis = X;
    return out;
  }
  // Block classical Gram-Schmidt with one re-orthogonalisation pass.
  for (int pass = 0; pass < 2; ++pass) residual -= Q0 * (Q0.transpose() * residual);

  Eigen::ColPivHouseholderQR<Matrix> qr(residual);
  const Index max_new = std::min<Index>(residual.cols(), n - r);
  Index keep = 0;
  const auto& packed = qr.matrixQR();
  while (keep < max_new && std::abs(packed(keep, keep)) >= kDropTolerance * scale) ++keep;

  out.basis = X;
  if (keep == 0) return out;

  Matrix block = qr.householderQ() * Matrix::Identity(n, keep);
  block -= Q0 * (Q0.transpose() * block);
  Eigen::HouseholderQR<Matrix> clean(block);
  block = clean.householderQ() * Matrix::Identity(n, keep);

  out.basis.conservativeResize(n, r + keep);
  out.basis.rightCols(keep) = block / s;
  out.added = keep;
  return out;
}

TruncationResult truncate(const Matrix& X_hat, const Matrix& S_hat, const Matrix& V_hat,
                          const Truncation& target) {
  const Index R = S_hat.rows();
  require(S_hat.cols() == R && X_hat.cols() == R && V_hat.cols() == R,
          "truncate: factor shapes disagree");
  Eigen::JacobiSVD<Matrix> svd(S_hat, Eigen::ComputeFullU | Eigen::ComputeFullV);
  TruncationResult out;
  out.singular_values = svd.singularValues();
  const Index r = select_rank(out.singular_values, target);
  out.state.X = X_hat * svd.matrixU().leftCols(r);
  out.state.V = V_hat * svd.matrixV().leftCols(r);
  out.state.S = out.singular_values.head(r).asDiagonal();
  out.discarded = out.singular_values.tail(R - r).norm();
  return out;
}

}  // namespace dlrk
