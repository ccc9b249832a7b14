#include "dlrk/grid.hpp"

#include <cmath>
#include <string>

namespace dlrk {

Boundary parse_boundary(std::string_view name) {
  if (name == "periodic" || name == "Periodic") return Boundary::Periodic;
  if (name == "neumann" || name == "Neumann") return Boundary::Neumann;
  throw ConfigError("unknown boundary condition '" + std::string(name) + "'");
}

std::string_view to_string(Boundary bc) { return bc == Boundary::Periodic ? "periodic" : "neumann"; }

SpatialGrid SpatialGrid::make(Index n_x, double x_min, double x_max, Boundary bc) {
  if (n_x < 1) throw ConfigError("grid.n_x must be >= 1");
  if (!(x_max > x_min)) throw ConfigError("grid.x_max must exceed grid.x_min");
  return SpatialGrid{n_x, x_min, x_max, bc};
}

Vector SpatialGrid::centers() const {
  Vector x(n_x);
  for (Index i = 0; i < n_x; ++i) x[i] = center(i);
  return x;
}

VelocityGrid VelocityGrid::make(int dim, Index n, double half_width) {
  if (dim != 1 && dim != 2) throw ConfigError("velocity.dim must be 1 or 2");
  if (n < 4 || n % 2 != 0) throw ConfigError("velocity.n_v must be even and >= 4");
  if (!(half_width > 0.0)) throw ConfigError("velocity.L_v must be positive");
  return VelocityGrid{dim, n, half_width};
}

Vector VelocityGrid::component(int axis) const {
  require(axis >= 0 && axis < dim, "velocity axis out of range");
  Vector out(size());
  if (dim == 1) {
    for (Index k = 0; k < n; ++k) out[k] = node(k);
    return out;
  }
  for (Index k1 = 0; k1 < n; ++k1)
    for (Index k2 = 0; k2 < n; ++k2) out[k1 * n + k2] = node(axis == 0 ? k1 : k2);
  return out;
}

Vector VelocityGrid::speed_squared() const {
  Vector out = component(0).array().square();
  if (dim == 2) out += component(1).array().square().matrix();
  return out;
}

double inner_product_x(const SpatialGrid& grid, const Vector& a, const Vector& b) {
  require(a.size() == grid.n_x && b.size() == grid.n_x, "inner_product_x: length mismatch");
  return a.dot(b) * grid.dx();
}

double inner_product_v(const VelocityGrid& grid, const Vector& a, const Vector& b) {
  require(a.size() == grid.size() && b.size() == grid.size(), "inner_product_v: length mismatch");
  return a.dot(b) * grid.weight();
}

Vector ghost_fill(const Vector& field, Boundary bc, Index width) {
  require(width >= 1, "ghost_fill: width must be >= 1");
  const Index n = field.size();
  require(n >= 1, "ghost_fill: empty field");
  Vector out(n + 2 * width);
  out.segment(width, n) = field;
  for (Index g = 1; g <= width; ++g) {
    if (bc == Boundary::Periodic) {
      out[width - g] = field[((n - g) % n + n) % n];
      out[width + n - 1 + g] = field[(g - 1) % n];
    } else {
      out[width - g] = field[0];
      out[width + n - 1 + g] = field[n - 1];
    }
  }
  return out;
}

}  // namespace dlrk
