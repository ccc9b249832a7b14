#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dlrk/experiment.hpp"
#include "dlrk/moments.hpp"
#include "helpers.hpp"

using namespace dlrk;
using std::numbers::pi;

namespace {

const SpatialGrid xg = SpatialGrid::make(20, 0.0, 1.0, Boundary::Periodic);
const VelocityGrid vg = VelocityGrid::make(2, 32, 8.4);

MacroFields uniform(double rho, double u1, double T, Index n = xg.n_x) {
  Matrix u = Matrix::Zero(n, 2);
  u.col(0).setConstant(u1);
  return MacroFields::from_primitive(Vector::Constant(n, rho), u, Vector::Constant(n, T));
}

}  // namespace

TEST_CASE("moments of a resolved Maxwellian") {
  const Matrix f = maxwellian(uniform(1.0, 0.2, 1.0), vg);
  const MacroFields m = compute_moments_full(f, vg);
  CHECK(testing::max_abs(m.rho.array() - 1.0) <= 1e-8);
  CHECK(testing::max_abs(m.u.col(0).array() - 0.2) <= 1e-8);
  CHECK(testing::max_abs(m.u.col(1)) <= 1e-8);
  CHECK(testing::max_abs(m.T.array() - 1.0) <= 1e-8);
  CHECK(m.physical());
  const Vector E = m.rho.cwiseProduct(m.T) + 0.5 * m.rho.cwiseProduct(m.u.rowwise().squaredNorm());
  CHECK(testing::max_abs(E - m.E) <= 1e-12 * testing::max_abs(E));
}

TEST_CASE("two-stream mixture against its analytic moments") {
  // 0.5 M(u = +1, T = 0.5) + 0.5 M(u = -1, T = 0.5): rho = 1, u = 0, T = 0.5 + |du|^2 / d_v = 1
  const Matrix f = maxwellian(uniform(0.5, 1.0, 0.5), vg) + maxwellian(uniform(0.5, -1.0, 0.5), vg);
  const MacroFields m = compute_moments_full(f, vg);
  CHECK(testing::max_abs(m.rho.array() - 1.0) <= 1e-10);
  CHECK(testing::max_abs(m.u) <= 1e-10);
  CHECK(testing::max_abs(m.T.array() - 1.0) <= 1e-10);
}

TEST_CASE("vacuum cells are flagged") {
  const MacroFields m = compute_moments_full(Matrix::Zero(3, vg.size()), vg);
  for (Index i = 0; i < 3; ++i) {
    CHECK(m.rho(i) == 0.0);
    CHECK(m.T(i) == 0.0);
    CHECK(m.degenerate[static_cast<std::size_t>(i)]);
  }
  CHECK_FALSE(m.physical());
}

TEST_CASE("low-rank moments match the full path") {
  std::mt19937_64 rng(10);
  SUBCASE("random rank-5 states") {
    const VelocityGrid v = VelocityGrid::make(2, 12, 6.0);
    for (int trial = 0; trial < 3; ++trial) {
      LowRankState s{testing::random_orthonormal(xg.n_x, 5, rng) / std::sqrt(xg.dx()),
                     testing::random_matrix(5, 5, rng),
                     testing::random_orthonormal(v.size(), 5, rng) / std::sqrt(v.weight())};
      // keep the density away from zero
      s.S(0, 0) += 50.0;
      s.V.col(0).setConstant(1.0 / std::sqrt(v.weight() * v.size()));
      s.V = weighted_qr(s.V, v.weight()).Q;
      const MacroFields a = compute_moments_lowrank(s, v);
      const MacroFields b = compute_moments_full(evaluate_full(s), v);
      CHECK(testing::max_abs(a.rho - b.rho) <= 1e-12 * testing::max_abs(b.rho));
      CHECK(testing::max_abs(a.u - b.u) <= 1e-12 * std::max(1.0, testing::max_abs(b.u)));
      CHECK(testing::max_abs(a.T - b.T) <= 1e-10 * testing::max_abs(b.T));
    }
  }
  SUBCASE("rank-one Maxwellian") {
    const Matrix f = maxwellian(uniform(1.0, 0.2, 1.0), vg);
    const LowRankState s = from_full(f, xg, vg, Truncation::fixed(1));
    const MacroFields m = compute_moments_lowrank(s, vg);
    CHECK(testing::max_abs(m.rho.array() - 1.0) <= 1e-8);
    CHECK(testing::max_abs(m.u.col(0).array() - 0.2) <= 1e-8);
    CHECK(testing::max_abs(m.T.array() - 1.0) <= 1e-8);
  }
  SUBCASE("truncated sine data") {
    ExperimentSpec spec;
    spec.solver.xgrid = SpatialGrid::make(100, 0.0, 1.0, Boundary::Periodic);
    spec.solver.vgrid = VelocityGrid::make(2, 16, 8.4);
    const LowRankState s = from_full(initial_field(spec), spec.solver.xgrid, spec.solver.vgrid, Truncation::fixed(6));
    const MacroFields a = compute_moments_lowrank(s, spec.solver.vgrid);
    const MacroFields b = compute_moments_full(evaluate_full(s), spec.solver.vgrid);
    CHECK(testing::max_abs(a.rho - b.rho) <= 1e-12);
    CHECK(testing::max_abs(a.u - b.u) <= 1e-12);
    CHECK(testing::max_abs(a.T - b.T) <= 1e-12);
  }
}

TEST_CASE("Maxwellian construction") {
  const MacroFields m = uniform(1.0, 0.0, 1.0, 1);
  const Matrix f = maxwellian_2v(m, vg);
  // node (16, 16) is v = 0
  CHECK(std::abs(f(0, 16 * 32 + 16) - 1 / (2 * pi)) <= 1e-15);
  CHECK_THROWS_AS(maxwellian(uniform(1.0, 0.0, -1.0, 1), vg), DomainError);
  CHECK_THROWS_AS(maxwellian(uniform(0.0, 0.0, 1.0, 1), vg), DomainError);
  CHECK_THROWS_AS(maxwellian_2v(uniform(1.0, 0.0, 1.0, 1), VelocityGrid::make(1, 32, 8.4)), ContractViolation);
}

TEST_CASE("Maxwellian shares the conserved moments of f") {
  const Matrix f = maxwellian(uniform(0.5, 1.0, 0.5), vg) + maxwellian(uniform(0.3, -0.5, 0.8), vg);
  const MacroFields m = compute_moments_full(f, vg);
  const MacroFields mm = compute_moments_full(maxwellian(m, vg), vg);
  CHECK(testing::max_abs(m.rho - mm.rho) <= 1e-8);
  CHECK(testing::max_abs(m.u - mm.u) <= 1e-8);
  CHECK(testing::max_abs(m.T - mm.T) <= 1e-8);
}

TEST_CASE("one-dimensional BGK Maxwellian") {
  const VelocityGrid v1 = VelocityGrid::make(1, 64, 8.4);
  Vector rho(xg.n_x), u(xg.n_x);
  for (Index i = 0; i < xg.n_x; ++i) {
    rho(i) = (2 + std::sin(2 * pi * xg.center(i))) / 3;
    u(i) = 0.2 + 0.1 * std::cos(2 * pi * xg.center(i));
  }
  const Matrix M = maxwellian_bgk_1v(rho, u, v1);
  const Vector v = v1.component(0);
  CHECK(testing::max_abs(M * Vector::Ones(64) * v1.weight() - rho) <= 1e-10);
  CHECK(testing::max_abs(M * v * v1.weight() - rho.cwiseProduct(u)) <= 1e-10);

  const Matrix M0 = maxwellian_bgk_1v(rho, Vector::Zero(xg.n_x), v1);
  for (Index k = 0; k < 64; ++k)
    CHECK(std::abs(M0(3, k) - rho(3) * std::exp(-v(k) * v(k) / 2) / std::sqrt(2 * pi)) <= 1e-15);

  const LowRankState s = from_full(M, xg, v1, Truncation::fixed(3));
  CHECK(testing::max_abs(evaluate_full(s) - M) <= 1e-12 * testing::max_abs(M));

  const Matrix h = bgk_velocity_profiles(v1);
  Matrix a(xg.n_x, 3);
  a.col(0) = rho;
  a.col(1) = rho.cwiseProduct(u);
  a.col(2) = rho.cwiseProduct(u).cwiseProduct(u);
  CHECK(testing::max_abs(a * h.transpose() - M) <= 1e-15);
}

TEST_CASE("conserved totals") {
  const MacroFields m = uniform(2.0, 0.5, 1.0);
  const ConservedTotals t = conserved_totals(m, xg);
  CHECK(t.mass == doctest::Approx(2.0));
  CHECK(t.momentum(0) == doctest::Approx(1.0));
  CHECK(t.energy == doctest::Approx(2.0 + 0.25));
}
