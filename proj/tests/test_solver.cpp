#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dlrk/advection.hpp"
#include "dlrk/experiment.hpp"
#include "dlrk/integrators.hpp"
#include "dlrk/moments.hpp"
#include "dlrk/solver.hpp"
#include "helpers.hpp"

using namespace dlrk;
using std::numbers::pi;
using testing::max_abs;

namespace {

SolverConfig make_config(Index n_x, Index n_v, double L, int dim = 2, Boundary bc = Boundary::Periodic) {
  SolverConfig c;
  c.xgrid = SpatialGrid::make(n_x, 0.0, 1.0, bc);
  c.vgrid = VelocityGrid::make(dim, n_v, L);
  c.collision_R = L;
  c.eps = 1.0;
  c.lambda = 1.1;
  c.dt = 1e-3;
  c.rank = 6;
  c.truncation = Truncation::fixed(6);
  return c;
}

Matrix sine_field(const SolverConfig& c) {
  ExperimentSpec spec;
  spec.problem = c.vgrid.dim == 1 ? Problem::BgkSine : Problem::Sine;
  spec.solver = c;
  return initial_field(spec);
}

MacroFields uniform_moments(Index n, double rho, double u1, double T) {
  Matrix u = Matrix::Zero(n, 2);
  u.col(0).setConstant(u1);
  return MacroFields::from_primitive(Vector::Constant(n, rho), u, Vector::Constant(n, T));
}

// Collision-substep oracle on the full tensor: [eps f + dt (Q(f, f) + lambda f)] / (eps + lambda dt) row by row.
Matrix penalised_collision(const Matrix& f, const SolverConfig& c, const CollisionOperator& op) {
  Matrix out(f.rows(), f.cols());
  const double lam = c.penalty();
  for (Index i = 0; i < f.rows(); ++i) {
    const Vector row = f.row(i).transpose();
    out.row(i) = ((c.eps * row + c.dt * (op.quadratic(row) + lam * row)) / (c.eps + lam * c.dt)).transpose();
  }
  return out;
}

double rel_linf(const Vector& a, const Vector& b) { return max_abs(a - b) / max_abs(b); }

}  // namespace

TEST_CASE("method names and config validation") {
  for (Method m : {Method::FullTensor, Method::KslNonstiff, Method::DlrXL, Method::DlrSxl1, Method::DlrSxl2,
                   Method::DlrSxl3})
    CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("DlrXYZ"), ConfigError);

  SolverConfig c = make_config(20, 8, 4.0);
  CHECK_NOTHROW(c.validate());
  c.dt = 0.02;  // 4 * 0.02 / 0.05 > 1
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = make_config(20, 8, 4.0);
  c.eps = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = make_config(20, 8, 4.0);
  c.rank = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = make_config(20, 8, 4.0);
  c.rank = 21;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = make_config(20, 8, 4.0);
  c.lambda.reset();
  CHECK_THROWS_AS(c.penalty(), ConfigError);
}

TEST_CASE("pair selection") {
  Matrix s(2, 2);
  s << 0.5, 0.9, 0.9, 0.1;
  const auto top = select_pairs(s, AugmentationStrategy::top_r());
  REQUIRE(top.size() == 2);
  CHECK(top[0] == std::pair<Index, Index>(0, 1));
  CHECK(top[1] == std::pair<Index, Index>(1, 0));

  Matrix ties = Matrix::Constant(3, 3, 1.0);
  const auto t3 = select_pairs(ties, AugmentationStrategy::top_r());
  REQUIRE(t3.size() == 3);
  CHECK(t3[0] == std::pair<Index, Index>(0, 0));
  CHECK(t3[1] == std::pair<Index, Index>(0, 1));
  CHECK(t3[2] == std::pair<Index, Index>(0, 2));

  CHECK(select_pairs(s, AugmentationStrategy::tolerance(0.6)).size() == 2);
  CHECK(select_pairs(s, AugmentationStrategy::tolerance(1.0)).empty());
  CHECK(select_pairs(s, AugmentationStrategy::all()).size() == 4);

  Matrix one(1, 1);
  one << 2.0;
  CHECK(select_pairs(one, AugmentationStrategy::top_r()).size() == 1);
}

TEST_CASE("collision table and scores") {
  const SolverConfig c = make_config(24, 12, 6.0);
  const CollisionOperator op(c.vgrid, c.collision_R);
  const LowRankState s = from_full(sine_field(c), c.xgrid, c.vgrid, Truncation::fixed(3));
  const CollisionTable t = collision_table(s.V, c.vgrid, op);
  CHECK(op.calls() == 9);
  CHECK(t.Q.cols() == 9);
  CHECK(max_abs(t.Q.col(1 * 3 + 2) - op.bilinear(Vector(s.V.col(1)), Vector(s.V.col(2)))) <= 1e-15);
  const Matrix d = augmentation_scores(t.C, s.S, 0.5);
  CHECK(d.allFinite());
  CHECK(d.minCoeff() >= 0.0);
  // brute force for one entry
  double best = 0.0;
  for (Index j = 0; j < 3; ++j) {
    double acc = 0.0;
    for (Index p = 0; p < 3; ++p)
      for (Index q = 0; q < 3; ++q) acc += t.C(j, p * 3 + q) * s.S(1, p) * s.S(2, q);
    best = std::max(best, std::abs(0.5 * acc));
  }
  CHECK(d(1, 2) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("full tensor step") {
  SUBCASE("collision keeps the conserved moments") {
    SolverConfig c = make_config(4, 32, 8.4);
    c.eps = 1e-2;
    const CollisionOperator op(c.vgrid, c.collision_R);
    Matrix f(4, c.vgrid.size());
    for (Index i = 0; i < 4; ++i) {
      const Matrix a = maxwellian(uniform_moments(1, 0.5, 1.0 + 0.1 * i, 0.6), c.vgrid);
      const Matrix b = maxwellian(uniform_moments(1, 0.5, -0.8, 1.2), c.vgrid);
      f.row(i) = a.row(0) + b.row(0);
    }
    const Matrix fs = muscl_transport_full(f, c.dt, c.xgrid, c.vgrid);
    StepReport rep;
    const Matrix out = full_tensor_step(f, c, op, &rep);
    CHECK(rep.collision_calls == 4);
    const MacroFields a = compute_moments_full(fs, c.vgrid), b = compute_moments_full(out, c.vgrid);
    CHECK(rel_linf(b.rho, a.rho) <= 1e-10);
    CHECK(max_abs(b.rho.cwiseProduct(b.u.col(0)) - a.rho.cwiseProduct(a.u.col(0))) <= 1e-6);
    CHECK(max_abs(b.E - a.E) <= 1e-6);

    const CollisionOperator cons(c.vgrid, c.collision_R, true);
    const MacroFields e = compute_moments_full(full_tensor_step(f, c, cons), c.vgrid);
    CHECK(rel_linf(e.rho, a.rho) <= 1e-10);
    CHECK(rel_linf(e.E, a.E) <= 1e-10);
    CHECK(max_abs(e.rho.cwiseProduct(e.u.col(0)) - a.rho.cwiseProduct(a.u.col(0))) <= 1e-10);
  }
  SUBCASE("uniform equilibrium is a fixed point up to the spectral floor") {
    SolverConfig c = make_config(3, 32, 8.4);
    c.eps = 1e-6;
    const CollisionOperator op(c.vgrid, c.collision_R);
    const Matrix f = maxwellian(uniform_moments(3, 1.0, 0.0, 1.0), c.vgrid);
    CHECK(max_abs(full_tensor_step(f, c, op) - f) <= 1e-8 * max_abs(f));
  }
  SUBCASE("BGK surrogate relaxes to equilibrium in one stiff step") {
    SolverConfig c = make_config(32, 64, 8.4, 1);
    c.eps = 1e-12;
    c.lambda = 1.0;
    const VelocityGrid& v = c.vgrid;
    const Vector x = v.component(0);
    Matrix f(32, 64);
    for (Index i = 0; i < 32; ++i)
      for (Index k = 0; k < 64; ++k)
        f(i, k) = std::exp(-(x(k) - 1) * (x(k) - 1)) + 0.5 * std::exp(-(x(k) + 1.5) * (x(k) + 1.5) / 0.5) *
                                                          (1 + 0.3 * std::sin(2 * pi * c.xgrid.center(i)));
    const Matrix out = bgk_full_tensor_step(f, c);
    const MacroFields m = compute_moments_full(out, v);
    const Matrix M = maxwellian_bgk_1v(m.rho, m.u.col(0), v);
    CHECK(max_abs(out - M) <= c.eps / (c.dt) * max_abs(f) * 10);
  }
  SUBCASE("non-finite input is reported") {
    SolverConfig c = make_config(3, 8, 4.0);
    const CollisionOperator op(c.vgrid, c.collision_R);
    Matrix f = Matrix::Ones(3, 64);
    f(1, 3) = NAN;
    CHECK_THROWS_AS(full_tensor_step(f, c, op), IntegrationFailure);
  }
}

TEST_CASE("transport substep") {
  SUBCASE("x-uniform state is unchanged") {
    const SolverConfig c = make_config(20, 12, 6.0);
    const Matrix f = maxwellian(uniform_moments(20, 1.0, 0.3, 0.9), c.vgrid);
    const LowRankState s = from_full(f, c.xgrid, c.vgrid, Truncation::fixed(3));
    const LowRankState out = ksl_advection_substep(s, c);
    CHECK(max_abs(evaluate_full(out) - evaluate_full(s)) <= 1e-12 * max_abs(f));
  }
  SUBCASE("full rank: K-step exact, S and L steps cancel to second order") {
    SolverConfig c = make_config(32, 8, 4.0, 1, Boundary::Periodic);
    c.rank = 8;
    Matrix f(32, 8);
    for (Index i = 0; i < 32; ++i)
      for (Index k = 0; k < 8; ++k) f(i, k) = 1.0 + 0.5 * std::sin(2 * pi * c.xgrid.center(i) + 0.7 * k);
    const LowRankState s = from_full(f, c.xgrid, c.vgrid, Truncation::fixed(8));
    // K-step alone
    const Matrix A = coefficient_matrix_v(s.V, c.vgrid, 0);
    const Matrix K1 = projected_K_transport(s.X * s.S, A, c.dt, c.xgrid);
    CHECK(max_abs(K1 * s.V.transpose() - muscl_transport_full(f, c.dt, c.xgrid, c.vgrid)) <= 1e-12);
    // whole substep
    double prev = 0.0;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
      c.dt = dt;
      const double e = max_abs(evaluate_full(ksl_advection_substep(s, c)) - muscl_transport_full(f, dt, c.xgrid, c.vgrid));
      if (prev > 0.0) CHECK(prev / e == doctest::Approx(4.0).epsilon(0.1));
      prev = e;
    }
  }
  SUBCASE("periodic mass conservation with the constant in the spatial span") {
    // r = n_x: every spatial basis produced by the K-step contains the constant function
    const SolverConfig c = make_config(8, 12, 6.0);
    std::mt19937_64 rng(41);
    LowRankState s;
    s.X = weighted_qr(testing::random_matrix(8, 8, rng), c.xgrid.dx()).Q;
    s.V = weighted_qr(maxwellian(uniform_moments(8, 1.0, 0.3, 0.8), c.vgrid).transpose() +
                          0.1 * testing::random_matrix(c.vgrid.size(), 8, rng),
                      c.vgrid.weight()).Q;
    s.S = testing::random_matrix(8, 8, rng);
    const double m0 = conserved_totals(compute_moments_lowrank(s, c.vgrid), c.xgrid).mass;
    const LowRankState out = ksl_advection_substep(s, c);
    const double m1 = conserved_totals(compute_moments_lowrank(out, c.vgrid), c.xgrid).mass;
    CHECK(std::abs(m1 - m0) / std::abs(m0) <= 1e-10);
    CHECK(orthonormality_defect(out.X, c.xgrid.dx()) <= 1e-10);
    CHECK(orthonormality_defect(out.V, c.vgrid.weight()) <= 1e-10);
  }
}

TEST_CASE("XL collision substep") {
  SolverConfig c = make_config(16, 32, 8.4);
  c.eps = 1e-2;
  c.rank = 4;
  c.truncation = Truncation::tail(0.0);
  const CollisionOperator op(c.vgrid, c.collision_R);
  Matrix f(16, c.vgrid.size());
  for (Index i = 0; i < 16; ++i) {
    const double x = c.xgrid.center(i);
    f.row(i) = maxwellian(uniform_moments(1, 0.6 + 0.2 * std::sin(2 * pi * x), 0.8, 0.7), c.vgrid).row(0) +
               maxwellian(uniform_moments(1, 0.4, -0.6, 1.1 + 0.2 * std::cos(2 * pi * x)), c.vgrid).row(0);
  }
  const LowRankState s = from_full(f, c.xgrid, c.vgrid, Truncation::fixed(4));
  StepReport rep;
  const LowRankState out = collision_substep_xl(s, c, op, &rep);
  CHECK(rep.collision_calls == 16);
  CHECK(op.calls() == 16);
  CHECK(rep.rank_before_trunc == 4 + rep.augmented);
  const MacroFields a = compute_moments_lowrank(s, c.vgrid), b = compute_moments_lowrank(out, c.vgrid);
  CHECK(max_abs(b.rho - a.rho) <= 1e-6);
  CHECK(max_abs(b.rho.cwiseProduct(b.u.col(0)) - a.rho.cwiseProduct(a.u.col(0))) <= 1e-6);
  CHECK(max_abs(b.E - a.E) <= 1e-6);
  CHECK(orthonormality_defect(out.X, c.xgrid.dx()) <= 1e-10);
  CHECK(orthonormality_defect(out.V, c.vgrid.weight()) <= 1e-10);

  SUBCASE("equilibrium fixed point") {
    const Matrix M = maxwellian(uniform_moments(16, 1.0, 0.0, 1.0), c.vgrid);
    const LowRankState e = from_full(M, c.xgrid, c.vgrid, Truncation::fixed(2));
    SolverConfig stiff = c;
    stiff.eps = 1e-6;
    stiff.truncation = Truncation::fixed(2);
    stiff.rank = 2;
    CHECK(max_abs(evaluate_full(collision_substep_xl(e, stiff, op)) - M) <= 1e-8 * max_abs(M));
  }
}

TEST_CASE("sXL collision substep") {
  SolverConfig c = make_config(16, 16, 8.4);
  c.eps = 1e-3;
  c.rank = 3;
  c.truncation = Truncation::tail(0.0);
  const CollisionOperator op(c.vgrid, c.collision_R);
  const LowRankState s = from_full(sine_field(make_config(16, 16, 8.4)), c.xgrid, c.vgrid, Truncation::fixed(3));

  SUBCASE("augmenting every pair contains the XL basis and is exact before truncation") {
    StepReport rx, rs;
    const LowRankState xl = collision_substep_xl(s, c, op, &rx);
    const LowRankState all = collision_substep_sxl(s, c, op, AugmentationStrategy::all(), &rs);
    CHECK(rs.collision_calls == 9);
    // X_hat of each substep is spanned by its output before truncation (threshold 0 keeps all directions)
    const Matrix bx = weighted_qr(xl.X, c.xgrid.dx()).Q;
    const Matrix bs = weighted_qr(all.X, c.xgrid.dx()).Q;
    CHECK(subspace_angle(bx * std::sqrt(c.xgrid.dx()), bs * std::sqrt(c.xgrid.dx()), true) <= 1e-8);
    const Matrix oracle = penalised_collision(evaluate_full(s), c, op);
    CHECK(max_abs(evaluate_full(all) - oracle) <= 1e-10 * max_abs(oracle));
  }
  SUBCASE("tolerance above every score adds nothing") {
    StepReport rep;
    const LowRankState out = collision_substep_sxl(s, c, op, AugmentationStrategy::tolerance(1e300), &rep);
    CHECK(rep.augmented == 0);
    // pure penalty relaxation on the existing spatial basis
    const Matrix full = penalised_collision(evaluate_full(s), c, op);
    const Matrix projected = s.X * (s.X.transpose() * full * c.xgrid.dx());
    CHECK(max_abs(evaluate_full(out) - projected) <= 1e-10 * max_abs(full));
  }
  SUBCASE("top-r augments at most r directions") {
    StepReport rep;
    collision_substep_sxl(s, c, op, AugmentationStrategy::top_r(), &rep);
    CHECK(rep.augmented <= 3);
  }
}

TEST_CASE("composed DLR step") {
  SUBCASE("large time step relative to eps") {
    SolverConfig c = make_config(40, 16, 8.4);
    c.eps = 1e-6;
    c.rank = 10;
    c.truncation = Truncation::fixed(10);
    const CollisionOperator op(c.vgrid, c.collision_R);
    LowRankState s = from_full(sine_field(c), c.xgrid, c.vgrid, Truncation::fixed(10));
    for (Method m : {Method::DlrXL, Method::DlrSxl1, Method::DlrSxl2, Method::DlrSxl3}) {
      c.method = m;
      op.reset_calls();
      StepReport rep;
      const LowRankState out = dlr_step(s, c, op, &rep);
      CHECK(evaluate_full(out).allFinite());
      CHECK(compute_moments_lowrank(out, c.vgrid).rho.minCoeff() > 0.0);
      CHECK(rep.collision_calls == 100);
      CHECK(rep.rank_after_trunc == 10);
    }
  }
  SUBCASE("uniform equilibrium over two steps") {
    SolverConfig c = make_config(8, 32, 8.4);
    c.eps = 1e-3;
    c.rank = 2;
    c.truncation = Truncation::fixed(2);
    const Matrix M = maxwellian(uniform_moments(8, 1.0, 0.2, 1.0), c.vgrid);
    for (bool conservative : {false, true}) {
      const CollisionOperator op(c.vgrid, c.collision_R, conservative);
      LowRankState s = from_full(M, c.xgrid, c.vgrid, Truncation::fixed(2));
      const MacroFields a = compute_moments_lowrank(s, c.vgrid);
      for (int n = 0; n < 2; ++n) s = dlr_step(s, c, op);
      const MacroFields b = compute_moments_lowrank(s, c.vgrid);
      CHECK(max_abs(b.rho - a.rho) <= 1e-8);
      CHECK(max_abs(b.u - a.u) <= 1e-8);
      // the spectral operator conserves energy only to its floor; the projected one exactly
      CHECK(max_abs(b.T - a.T) <= (conservative ? 1e-8 : 1e-7));
    }
  }
  SUBCASE("ten steps against the full tensor scheme") {
    SolverConfig c = make_config(100, 16, 8.4);
    c.eps = 1.0;
    const CollisionOperator op(c.vgrid, c.collision_R);
    Matrix f = sine_field(c);
    LowRankState s = from_full(f, c.xgrid, c.vgrid, Truncation::fixed(6));
    for (int n = 0; n < 10; ++n) {
      f = full_tensor_step(f, c, op);
      s = dlr_step(s, c, op);
    }
    const MacroFields a = compute_moments_lowrank(s, c.vgrid), b = compute_moments_full(f, c.vgrid);
    CHECK(rel_linf(a.rho, b.rho) <= 2e-2);
    CHECK(rel_linf(a.u.col(0), b.u.col(0)) <= 2e-2);
    CHECK(rel_linf(a.T, b.T) <= 2e-2);
  }
}

TEST_CASE("non-stiff projector-splitting step") {
  SolverConfig c = make_config(50, 12, 6.0);
  c.eps = 1.0;
  c.rank = 5;
  c.truncation = Truncation::fixed(5);
  c.method = Method::KslNonstiff;
  const CollisionOperator op(c.vgrid, c.collision_R);
  const LowRankState s0 = from_full(sine_field(c), c.xgrid, c.vgrid, Truncation::fixed(5));

  StepReport rep;
  const LowRankState one = ksl_nonstiff_step(s0, c, op, &rep);
  CHECK(rep.collision_calls == 25);
  CHECK(orthonormality_defect(one.X, c.xgrid.dx()) <= 1e-10);
  CHECK(orthonormality_defect(one.V, c.vgrid.weight()) <= 1e-10);

  SUBCASE("first-order agreement with the split scheme") {
    auto difference = [&](double dt) {
      SolverConfig a = c, b = c;
      a.dt = b.dt = dt;
      b.method = Method::DlrXL;
      LowRankState sa = s0, sb = s0;
      const auto steps = static_cast<int>(std::llround(0.01 / dt));
      for (int n = 0; n < steps; ++n) {
        sa = ksl_nonstiff_step(sa, a, op);
        sb = dlr_step(sb, b, op);
      }
      return max_abs(compute_moments_lowrank(sa, c.vgrid).T - compute_moments_lowrank(sb, c.vgrid).T);
    };
    const double e1 = difference(1e-3), e2 = difference(5e-4);
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.25));
  }
  SUBCASE("uniform equilibrium") {
    SolverConfig u = c;
    u.vgrid = VelocityGrid::make(2, 32, 8.4);
    u.collision_R = 8.4;
    u.rank = 2;
    u.truncation = Truncation::fixed(2);
    const CollisionOperator op32(u.vgrid, 8.4);
    const Matrix M = maxwellian(uniform_moments(c.xgrid.n_x, 1.0, 0.0, 1.0), u.vgrid);
    const LowRankState e = from_full(M, u.xgrid, u.vgrid, Truncation::fixed(2));
    CHECK(max_abs(evaluate_full(ksl_nonstiff_step(e, u, op32)) - M) <= 1e-8 * max_abs(M));
  }
}

TEST_CASE("BGK collision substep") {
  SolverConfig c = make_config(50, 64, 8.4, 1);
  c.eps = 1e-12;
  c.lambda = 1.0;
  const LowRankState s = from_full(sine_field(c), c.xgrid, c.vgrid, Truncation::fixed(6));
  const LowRankState star = ksl_advection_substep(s, c);
  const MacroFields ms = compute_moments_lowrank(star, c.vgrid);

  const LowRankState xl = bgk_collision_substep(star, c, BgkVariant::XL);
  const LowRankState sxl = bgk_collision_substep(star, c, BgkVariant::SXL);
  const Matrix M = maxwellian_bgk_1v(ms.rho, ms.u.col(0), c.vgrid);
  CHECK(max_abs(evaluate_full(xl) - M) <= 1e-10);
  CHECK(max_abs(evaluate_full(sxl) - evaluate_full(xl)) <= 1e-10);
  const MacroFields mx = compute_moments_lowrank(xl, c.vgrid);
  CHECK(max_abs(mx.rho - ms.rho) <= 1e-10);
  CHECK(max_abs(mx.rho.cwiseProduct(mx.u.col(0)) - ms.rho.cwiseProduct(ms.u.col(0))) <= 1e-10);

  LowRankState bad = s;
  bad.S = -bad.S;
  CHECK_THROWS_AS(bgk_collision_substep(bad, c, BgkVariant::XL), DomainError);
}

TEST_CASE("BGK step") {
  SUBCASE("stays Maxwellian in the stiff limit") {
    SolverConfig c = make_config(50, 64, 8.4, 1);
    c.eps = 1e-12;
    c.lambda = 1.0;
    LowRankState s = from_full(sine_field(c), c.xgrid, c.vgrid, Truncation::fixed(6));
    double worst = 0.0;
    for (int n = 0; n < 20; ++n) {
      s = bgk_step(s, c, BgkVariant::XL);
      const MacroFields m = compute_moments_lowrank(s, c.vgrid);
      worst = std::max(worst, max_abs(evaluate_full(s) - maxwellian_bgk_1v(m.rho, m.u.col(0), c.vgrid)));
    }
    CHECK(worst <= 1e-8);
  }
  SUBCASE("kinetic regime against the full-tensor BGK solver") {
    auto error = [](double dt) {
      SolverConfig c = make_config(50, 64, 8.4, 1);
      c.eps = 1.0;
      c.lambda = 1.0;
      c.dt = dt;
      c.rank = 8;
      c.truncation = Truncation::fixed(8);
      Matrix f = sine_field(c);
      // start away from equilibrium
      const Vector v = c.vgrid.component(0);
      for (Index i = 0; i < f.rows(); ++i)
        for (Index k = 0; k < f.cols(); ++k) f(i, k) *= 1.0 + 0.2 * std::tanh(v(k)) * std::sin(2 * pi * c.xgrid.center(i));
      LowRankState s = from_full(f, c.xgrid, c.vgrid, Truncation::fixed(8));
      f = evaluate_full(s);
      const int steps = static_cast<int>(std::llround(0.02 / dt));
      for (int n = 0; n < steps; ++n) {
        f = bgk_full_tensor_step(f, c);
        s = bgk_step(s, c, BgkVariant::XL);
      }
      return max_abs(evaluate_full(s) - f);
    };
    const double e = error(1e-3);
    CHECK(e <= 1e-3);
  }
}
