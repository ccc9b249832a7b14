#include "dlrk/solver.hpp"

#include <omp.h>

#include <algorithm>
#include <numeric>
#include <string>

#include "dlrk/advection.hpp"
#include "dlrk/moments.hpp"

namespace dlrk {

namespace {

void ensure_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw IntegrationFailure(std::string(what) + " produced non-finite values");
}

// L_hat(4) in column form: L_i = sum_j S_ij V_j for i < r, zero beyond.
Matrix padded_L(const LowRankState& s, Index columns) {
  Matrix L = Matrix::Zero(s.V.rows(), columns);
  L.leftCols(s.rank()) = s.V * s.S.transpose();
  return L;
}

LowRankState qr_and_truncate(const Matrix& X_hat, const Matrix& L_hat, const SolverConfig& cfg,
                             StepReport* report) {
  ensure_finite(L_hat, "collision L-step");
  const WeightedQr qr = weighted_qr(L_hat, cfg.vgrid.weight());
  const TruncationResult tr = truncate(X_hat, qr.R.transpose(), qr.Q, cfg.effective_truncation());
  if (report) {
    report->rank_before_trunc = X_hat.cols();
    report->rank_after_trunc = tr.state.rank();
    report->singular_values = tr.singular_values;
  }
  return tr.state;
}

// Penalised L-step shared by the XL and sXL collision substeps.
LowRankState collision_L_step(const LowRankState& star, const Matrix& X_hat, const Matrix& Kprod,
                              const CollisionTable& table, const SolverConfig& cfg, StepReport* report) {
  const double eps = cfg.eps;
  const double dt = cfg.dt;
  const double lambda = cfg.penalty();
  const Matrix L4 = padded_L(star, X_hat.cols());
  // G(i, pq) = <X_hat_i, K_p K_q>_x
  const Matrix G = X_hat.transpose() * Kprod * cfg.xgrid.dx();
  const Matrix gain = table.Q * G.transpose();
  const Matrix L_new = (eps * L4 + dt * (gain + lambda * L4)) / (eps + lambda * dt);
  return qr_and_truncate(X_hat, L_new, cfg, report);
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "FullTensor") return Method::FullTensor;
  if (name == "KslNonstiff") return Method::KslNonstiff;
  if (name == "DlrXL") return Method::DlrXL;
  if (name == "DlrSxl1") return Method::DlrSxl1;
  if (name == "DlrSxl2") return Method::DlrSxl2;
  if (name == "DlrSxl3") return Method::DlrSxl3;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::FullTensor: return "FullTensor";
    case Method::KslNonstiff: return "KslNonstiff";
    case Method::DlrXL: return "DlrXL";
    case Method::DlrSxl1: return "DlrSxl1";
    case Method::DlrSxl2: return "DlrSxl2";
    case Method::DlrSxl3: return "DlrSxl3";
  }
  return "?";
}

bool is_low_rank(Method m) { return m != Method::FullTensor; }

void SolverConfig::validate() const {
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_final >= 0.0)) throw ConfigError("t_final must be nonnegative");
  if (lambda && !(*lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (rank < 1) throw ConfigError("rank must be >= 1");
  if (is_low_rank(method) && rank > std::min(xgrid.n_x, vgrid.size()))
    throw ConfigError("rank exceeds min(n_x, n_v^dim)");
  if (truncation.mode == Truncation::Mode::Threshold && !(truncation.threshold >= 0.0))
    throw ConfigError("truncation threshold must be nonnegative");
  if (method == Method::KslNonstiff && vgrid.dim != 2)
    throw ConfigError("KslNonstiff requires two velocity dimensions");
  if (method == Method::DlrSxl2 && !(sxl_tol >= 0.0)) throw ConfigError("sxl_tol must be nonnegative");
  check_cfl(vgrid.half_width, dt, xgrid);
}

double SolverConfig::penalty() const {
  if (!lambda) throw ConfigError("penalty lambda is unresolved (Auto)");
  return *lambda;
}

Truncation SolverConfig::effective_truncation() const {
  if (truncation.mode == Truncation::Mode::FixedRank) return Truncation::fixed(rank);
  return truncation;
}

CollisionTable collision_table(const Matrix& V, const VelocityGrid& vg, const CollisionOperator& op) {
  require(V.rows() == vg.size(), "collision_table: velocity size mismatch");
  const Index r = V.cols();
  std::vector<Spectrum> spectra(static_cast<std::size_t>(r));
#pragma omp parallel for schedule(static) if (!omp_in_parallel())
  for (Index p = 0; p < r; ++p) spectra[static_cast<std::size_t>(p)] = op.transform(V.col(p));
  CollisionTable t;
  t.Q.resize(V.rows(), r * r);
#pragma omp parallel for schedule(dynamic) if (!omp_in_parallel())
  for (Index pq = 0; pq < r * r; ++pq)
    t.Q.col(pq) = op.bilinear(spectra[static_cast<std::size_t>(pq / r)], spectra[static_cast<std::size_t>(pq % r)]);
  t.C = V.transpose() * t.Q * vg.weight();
  return t;
}

Matrix pairwise_products(const Matrix& K) {
  const Index r = K.cols();
  Matrix out(K.rows(), r * r);
  for (Index p = 0; p < r; ++p)
    for (Index q = 0; q < r; ++q) out.col(p * r + q) = K.col(p).cwiseProduct(K.col(q));
  return out;
}

Matrix augmentation_scores(const Matrix& C, const Matrix& S, double coef) {
  const Index r = S.rows();
  require(C.rows() == r && C.cols() == r * r, "augmentation_scores: table shape mismatch");
  Matrix scores = Matrix::Zero(r, r);
  for (Index j = 0; j < r; ++j) {
    Matrix Cj(r, r);
    for (Index p = 0; p < r; ++p)
      for (Index q = 0; q < r; ++q) Cj(p, q) = C(j, p * r + q);
    const Matrix d = (coef * (S * Cj * S.transpose())).cwiseAbs();
    scores = scores.cwiseMax(d);
  }
  return scores;
}

std::vector<std::pair<Index, Index>> select_pairs(const Matrix& scores, const AugmentationStrategy& strategy) {
  const Index r = scores.rows();
  std::vector<Index> chosen;
  switch (strategy.kind) {
    case AugmentationStrategy::Kind::All:
      chosen.resize(static_cast<std::size_t>(r * r));
      std::iota(chosen.begin(), chosen.end(), 0);
      break;
    case AugmentationStrategy::Kind::Tol:
      for (Index idx = 0; idx < r * r; ++idx)
        if (scores(idx / r, idx % r) > strategy.tol) chosen.push_back(idx);
      break;
    case AugmentationStrategy::Kind::TopR: {
      std::vector<Index> order(static_cast<std::size_t>(r * r));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return scores(a / r, a % r) > scores(b / r, b % r);
      });
      chosen.assign(order.begin(), order.begin() + std::min(r, r * r));
      std::sort(chosen.begin(), chosen.end());
      break;
    }
  }
  std::vector<std::pair<Index, Index>> pairs;
  for (Index idx : chosen) pairs.emplace_back(idx / r, idx % r);
  return pairs;
}

Matrix full_tensor_step(const Matrix& f, const SolverConfig& cfg, const CollisionOperator& op, StepReport* report) {
  const std::int64_t calls0 = op.calls();
  const Matrix fs = muscl_transport_full(f, cfg.dt, cfg.xgrid, cfg.vgrid);
  const double eps = cfg.eps;
  const double dt = cfg.dt;
  const double lambda = cfg.penalty();
  Matrix out(f.rows(), f.cols());
#pragma omp parallel for schedule(dynamic) if (!omp_in_parallel())
  for (Index i = 0; i < f.rows(); ++i) {
    const Vector row = fs.row(i).transpose();
    const Vector q = op.quadratic(row);
    out.row(i) = ((eps * row + dt * (q + lambda * row)) / (eps + lambda * dt)).transpose();
  }
  ensure_finite(out, "full tensor step");
  if (report) {
    report->collision_calls = op.calls() - calls0;
    report->rank_before_trunc = report->rank_after_trunc = 0;
  }
  return out;
}

Matrix bgk_full_tensor_step(const Matrix& f, const SolverConfig& cfg) {
  require(cfg.vgrid.dim == 1, "bgk_full_tensor_step: one velocity dimension required");
  const Matrix fs = muscl_transport_full(f, cfg.dt, cfg.xgrid, cfg.vgrid);
  const MacroFields m = compute_moments_full(fs, cfg.vgrid);
  for (bool d : m.degenerate)
    if (d) throw DomainError("BGK step: nonpositive density");
  const Matrix M = maxwellian_bgk_1v(m.rho, m.u.col(0), cfg.vgrid);
  const Matrix out = (cfg.eps * fs + cfg.dt * M) / (cfg.eps + cfg.dt);
  ensure_finite(out, "BGK full tensor step");
  return out;
}

LowRankState ksl_advection_substep(const LowRankState& state, const SolverConfig& cfg) {
  const SpatialGrid& xg = cfg.xgrid;
  const VelocityGrid& vg = cfg.vgrid;
  const double dt = cfg.dt;

  // K-step
  const Matrix A = coefficient_matrix_v(state.V, vg, 0);
  const SymmetricSplit split = split_symmetric(A);
  const Matrix K1 = projected_K_transport(state.X * state.S, A, dt, xg);
  ensure_finite(K1, "K-step");
  const WeightedQr kq = weighted_qr(K1, xg.dx());
  const Matrix& Xs = kq.Q;
  const Matrix& S1 = kq.R;

  // S-step (integrates the projected flux with reversed sign)
  const ProjectedDerivative D = projected_x_derivative(Xs, xg);
  const Matrix S2 = S1 + dt * (D.plus * S1 * split.positive + D.minus * S1 * split.negative);

  // L-step, column form: column i holds L_i(v)
  const Vector v = vg.component(0);
  const Vector vp = v.cwiseMax(0.0);
  const Vector vm = v.cwiseMin(0.0);
  const Matrix L2 = state.V * S2.transpose();
  const Matrix Ls = L2 - dt * (vp.asDiagonal() * L2 * D.plus.transpose() + vm.asDiagonal() * L2 * D.minus.transpose());
  ensure_finite(Ls, "L-step");
  const WeightedQr lq = weighted_qr(Ls, vg.weight());
  return {Xs, lq.R.transpose(), lq.Q};
}

LowRankState collision_substep_xl(const LowRankState& state, const SolverConfig& cfg, const CollisionOperator& op,
                                  StepReport* report) {
  const std::int64_t calls0 = op.calls();
  const double eps = cfg.eps;
  const double dt = cfg.dt;
  const double lambda = cfg.penalty();

  const Matrix K = state.X * state.S;
  const CollisionTable table = collision_table(state.V, cfg.vgrid, op);
  const Matrix Kprod = pairwise_products(K);
  const Matrix K4 = (eps * K + dt * (Kprod * table.C.transpose() + lambda * K)) / (eps + lambda * dt);
  ensure_finite(K4, "collision X-step");
  const Augmented aug = orthonormalize_augment(state.X, K4, cfg.xgrid.dx());

  LowRankState out = collision_L_step(state, aug.basis, Kprod, table, cfg, report);
  if (report) {
    report->augmented = aug.added;
    report->collision_calls = op.calls() - calls0;
  }
  return out;
}

LowRankState collision_substep_sxl(const LowRankState& state, const SolverConfig& cfg, const CollisionOperator& op,
                                   const AugmentationStrategy& strategy, StepReport* report) {
  const std::int64_t calls0 = op.calls();
  const double coef = cfg.dt / (cfg.eps + cfg.penalty() * cfg.dt);

  const Matrix K = state.X * state.S;
  const CollisionTable table = collision_table(state.V, cfg.vgrid, op);
  const Matrix scores = augmentation_scores(table.C, state.S, coef);
  const auto pairs = select_pairs(scores, strategy);
  Matrix extras(state.X.rows(), static_cast<Index>(pairs.size()));
  for (std::size_t c = 0; c < pairs.size(); ++c)
    extras.col(static_cast<Index>(c)) = state.X.col(pairs[c].first).cwiseProduct(state.X.col(pairs[c].second));
  const Augmented aug = orthonormalize_augment(state.X, extras, cfg.xgrid.dx());

  LowRankState out = collision_L_step(state, aug.basis, pairwise_products(K), table, cfg, report);
  if (report) {
    report->augmented = aug.added;
    report->collision_calls = op.calls() - calls0;
  }
  return out;
}

LowRankState dlr_step(const LowRankState& state, const SolverConfig& cfg, const CollisionOperator& op,
                      StepReport* report) {
  switch (cfg.method) {
    case Method::KslNonstiff: return ksl_nonstiff_step(state, cfg, op, report);
    case Method::FullTensor: throw ConfigError("dlr_step: FullTensor is not a low-rank method");
    default: break;
  }
  const LowRankState star = ksl_advection_substep(state, cfg);
  switch (cfg.method) {
    case Method::DlrXL: return collision_substep_xl(star, cfg, op, report);
    case Method::DlrSxl1: return collision_substep_sxl(star, cfg, op, AugmentationStrategy::top_r(), report);
    case Method::DlrSxl2:
      return collision_substep_sxl(star, cfg, op, AugmentationStrategy::tolerance(cfg.sxl_tol), report);
    case Method::DlrSxl3: return collision_substep_sxl(star, cfg, op, AugmentationStrategy::all(), report);
    default: throw ConfigError("dlr_step: unsupported method");
  }
}

LowRankState ksl_nonstiff_step(const LowRankState& state, const SolverConfig& cfg, const CollisionOperator& op,
                               StepReport* report) {
  const std::int64_t calls0 = op.calls();
  const SpatialGrid& xg = cfg.xgrid;
  const VelocityGrid& vg = cfg.vgrid;
  const double dt = cfg.dt;
  const double inv_eps = 1.0 / cfg.eps;
  const double wx = xg.dx();

  const CollisionTable table = collision_table(state.V, vg, op);

  // K-step with transport and collision
  const Matrix A = coefficient_matrix_v(state.V, vg, 0);
  const SymmetricSplit split = split_symmetric(A);
  const Matrix K = state.X * state.S;
  const Matrix K1 = projected_K_transport(K, A, dt, xg) + dt * inv_eps * pairwise_products(K) * table.C.transpose();
  ensure_finite(K1, "K-step");
  const WeightedQr kq = weighted_qr(K1, wx);
  const Matrix& Xn = kq.Q;
  const Matrix& S1 = kq.R;

  // S-step (backward in time for both terms)
  const ProjectedDerivative D = projected_x_derivative(Xn, xg);
  const Matrix G1 = Xn.transpose() * pairwise_products(Xn * S1) * wx;
  const Matrix S2 = S1 + dt * (D.plus * S1 * split.positive + D.minus * S1 * split.negative) -
                    dt * inv_eps * G1 * table.C.transpose();

  // L-step
  const Vector v = vg.component(0);
  const Vector vp = v.cwiseMax(0.0);
  const Vector vm = v.cwiseMin(0.0);
  const Matrix L2 = state.V * S2.transpose();
  const Matrix G2 = Xn.transpose() * pairwise_products(Xn * S2) * wx;
  const Matrix Ln = L2 - dt * (vp.asDiagonal() * L2 * D.plus.transpose() + vm.asDiagonal() * L2 * D.minus.transpose()) +
                    dt * inv_eps * table.Q * G2.transpose();
  ensure_finite(Ln, "L-step");
  const WeightedQr lq = weighted_qr(Ln, vg.weight());
  LowRankState out{Xn, lq.R.transpose(), lq.Q};
  if (report) {
    report->rank_before_trunc = report->rank_after_trunc = out.rank();
    report->augmented = 0;
    report->collision_calls = op.calls() - calls0;
  }
  return out;
}

LowRankState bgk_collision_substep(const LowRankState& state, const SolverConfig& cfg, BgkVariant variant,
                                   StepReport* report) {
  const VelocityGrid& vg = cfg.vgrid;
  require(vg.dim == 1, "bgk_collision_substep: one velocity dimension required");
  const double eps = cfg.eps;
  const double dt = cfg.dt;
  const double wx = cfg.xgrid.dx();
  const double wv = vg.weight();

  const Matrix K = state.X * state.S;
  const Vector rho = K * (state.V.transpose() * Vector::Ones(vg.size()) * wv);
  const Vector mom = K * (state.V.transpose() * vg.component(0) * wv);
  if (!(rho.minCoeff() > 0.0)) throw DomainError("BGK collision: nonpositive density");

  // M* = sum_c a_c(x) h_c(v) with a = (rho, rho u, rho u^2).
  Matrix a(rho.size(), 3);
  a.col(0) = rho;
  a.col(1) = mom;
  a.col(2) = mom.cwiseProduct(mom).cwiseQuotient(rho);
  const Matrix h = bgk_velocity_profiles(vg);
  const Matrix MV = a * (h.transpose() * state.V * wv);  // <M* V_j>_v, n_x x r

  const Matrix extras = variant == BgkVariant::XL ? Matrix((eps * K + dt * MV) / (eps + dt)) : MV;
  ensure_finite(extras, "BGK X-step");
  const Augmented aug = orthonormalize_augment(state.X, extras, wx);
  const Matrix& X_hat = aug.basis;

  const Matrix L4 = padded_L(state, X_hat.cols());
  const Matrix XM = h * (X_hat.transpose() * a * wx).transpose();  // column i: <X_hat_i M*>_x
  const Matrix L_new = (eps * L4 + dt * XM) / (eps + dt);
  LowRankState out = qr_and_truncate(X_hat, L_new, cfg, report);
  if (report) report->augmented = aug.added;
  return out;
}

LowRankState bgk_step(const LowRankState& state, const SolverConfig& cfg, BgkVariant variant, StepReport* report) {
  return bgk_collision_substep(ksl_advection_substep(state, cfg), cfg, variant, report);
}

}  // namespace dlrk
