#include "dlrk/moments.hpp"

#include <cmath>
#include <numbers>

namespace dlrk {

namespace {

constexpr double kVacuum = 1e-14;

// Fills u, T, E and flags from rho, first moments and the centred second moment.
void finish(MacroFields& m, const Matrix& momentum, const Vector& centred_or_raw, bool centred) {
  const Index n = m.rho.size();
  const int d = static_cast<int>(momentum.cols());
  m.u = Matrix::Zero(n, d);
  m.T = Vector::Zero(n);
  m.degenerate.assign(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) {
    if (!(m.rho[i] > kVacuum)) {
      m.degenerate[static_cast<std::size_t>(i)] = true;
      continue;
    }
    m.u.row(i) = momentum.row(i) / m.rho[i];
    const double second = centred ? centred_or_raw[i] : centred_or_raw[i] - m.rho[i] * m.u.row(i).squaredNorm();
    m.T[i] = second / (d * m.rho[i]);
  }
  m.E = 0.5 * d * m.rho.cwiseProduct(m.T) + 0.5 * m.rho.cwiseProduct(m.u.rowwise().squaredNorm());
}

}  // namespace

bool MacroFields::physical() const {
  for (Index i = 0; i < rho.size(); ++i)
    if (!std::isfinite(rho[i]) || !std::isfinite(T[i]) || !(rho[i] > 0.0) || !(T[i] > 0.0)) return false;
  return u.allFinite();
}

MacroFields MacroFields::from_primitive(const Vector& rho, const Matrix& u, const Vector& T) {
  require(u.rows() == rho.size() && T.size() == rho.size(), "MacroFields: profile length mismatch");
  MacroFields m;
  m.rho = rho;
  m.u = u;
  m.T = T;
  const double d = static_cast<double>(u.cols());
  m.E = 0.5 * d * rho.cwiseProduct(T) + 0.5 * rho.cwiseProduct(u.rowwise().squaredNorm());
  m.degenerate.assign(static_cast<std::size_t>(rho.size()), false);
  return m;
}

MacroFields compute_moments_full(const Matrix& f, const VelocityGrid& vg) {
  require(f.cols() == vg.size(), "compute_moments_full: velocity size mismatch");
  const double w = vg.weight();
  const Index n = f.rows();
  MacroFields m;
  m.rho = f.rowwise().sum() * w;
  Matrix momentum(n, vg.dim);
  std::vector<Vector> comps;
  for (int a = 0; a < vg.dim; ++a) {
    comps.push_back(vg.component(a));
    momentum.col(a) = f * comps.back() * w;
  }
  Vector centred = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (!(m.rho[i] > kVacuum)) continue;
    Vector dev2 = Vector::Zero(vg.size());
    for (int a = 0; a < vg.dim; ++a)
      dev2.array() += (comps[static_cast<std::size_t>(a)].array() - momentum(i, a) / m.rho[i]).square();
    centred[i] = f.row(i).dot(dev2) * w;
  }
  finish(m, momentum, centred, true);
  return m;
}

MacroFields compute_moments_lowrank(const LowRankState& state, const VelocityGrid& vg) {
  require(state.V.rows() == vg.size(), "compute_moments_lowrank: velocity size mismatch");
  const double w = vg.weight();
  const Matrix K = state.X * state.S;
  MacroFields m;
  m.rho = K * (state.V.transpose() * Vector::Ones(vg.size()) * w);
  Matrix momentum(K.rows(), vg.dim);
  for (int a = 0; a < vg.dim; ++a) momentum.col(a) = K * (state.V.transpose() * vg.component(a) * w);
  const Vector raw = K * (state.V.transpose() * vg.speed_squared() * w);
  finish(m, momentum, raw, false);
  return m;
}

Matrix maxwellian(const MacroFields& m, const VelocityGrid& vg) {
  require(m.dim() == vg.dim, "maxwellian: dimension mismatch");
  const Index n = m.cells();
  Matrix f(n, vg.size());
  std::vector<Vector> comps;
  for (int a = 0; a < vg.dim; ++a) comps.push_back(vg.component(a));
  for (Index i = 0; i < n; ++i) {
    const double rho = m.rho[i];
    const double T = m.T[i];
    if (!(rho > 0.0) || !(T > 0.0)) throw DomainError("maxwellian: nonpositive density or temperature");
    const double norm = rho / std::pow(2.0 * std::numbers::pi * T, 0.5 * vg.dim);
    Vector dev2 = Vector::Zero(vg.size());
    for (int a = 0; a < vg.dim; ++a)
      dev2.array() += (comps[static_cast<std::size_t>(a)].array() - m.u(i, a)).square();
    f.row(i) = (norm * (-dev2.array() / (2.0 * T)).exp()).matrix().transpose();
  }
  return f;
}

Matrix maxwellian_2v(const MacroFields& m, const VelocityGrid& vg) {
  require(vg.dim == 2, "maxwellian_2v: two velocity dimensions required");
  return maxwellian(m, vg);
}

Matrix bgk_velocity_profiles(const VelocityGrid& vg) {
  require(vg.dim == 1, "bgk profiles: one velocity dimension required");
  const Vector v = vg.component(0);
  const Vector phi = ((-0.5 * v.array().square()).exp() / std::sqrt(2.0 * std::numbers::pi)).matrix();
  Matrix h(vg.size(), 3);
  h.col(0) = phi;
  h.col(1) = v.cwiseProduct(phi);
  h.col(2) = (0.5 * (v.array().square() - 1.0) * phi.array()).matrix();
  return h;
}

Matrix maxwellian_bgk_1v(const Vector& rho, const Vector& u, const VelocityGrid& vg) {
  require(rho.size() == u.size(), "maxwellian_bgk_1v: length mismatch");
  const Matrix h = bgk_velocity_profiles(vg);
  Matrix coeff(rho.size(), 3);
  coeff.col(0) = rho;
  coeff.col(1) = rho.cwiseProduct(u);
  coeff.col(2) = rho.cwiseProduct(u).cwiseProduct(u);
  return coeff * h.transpose();
}

ConservedTotals conserved_totals(const MacroFields& m, const SpatialGrid& xg) {
  ConservedTotals t;
  const double dx = xg.dx();
  t.mass = m.rho.sum() * dx;
  t.momentum = (m.u.array().colwise() * m.rho.array()).colwise().sum().transpose() * dx;
  t.energy = m.E.sum() * dx;
  return t;
}

}  // namespace dlrk
