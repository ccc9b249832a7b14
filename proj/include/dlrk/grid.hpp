#pragma once

#include <string_view>

#include "dlrk/common.hpp"

namespace dlrk {

enum class Boundary { Periodic, Neumann };

Boundary parse_boundary(std::string_view name);
std::string_view to_string(Boundary bc);

/// Uniform cell-centred grid on [x_min, x_max].
struct SpatialGrid {
  Index n_x = 0;
  double x_min = 0.0;
  double x_max = 1.0;
  Boundary bc = Boundary::Periodic;

  static SpatialGrid make(Index n_x, double x_min, double x_max, Boundary bc);

  double dx() const { return (x_max - x_min) / static_cast<double>(n_x); }
  double center(Index i) const { return x_min + (static_cast<double>(i) + 0.5) * dx(); }
  double length() const { return x_max - x_min; }
  Vector centers() const;
};

/// Tensor velocity grid on [-L, L)^dim. The right endpoint is excluded so the
/// nodes coincide with the collocation points of the periodic Fourier transform.
///
/// Multi-dimensional nodes are stored with the first velocity component varying
/// slowest: flat index = k1 * n + k2.
struct VelocityGrid {
  int dim = 2;
  Index n = 32;
  double half_width = 8.4;

  static VelocityGrid make(int dim, Index n, double half_width);

  double dv() const { return 2.0 * half_width / static_cast<double>(n); }
  double node(Index k) const { return -half_width + static_cast<double>(k) * dv(); }
  Index size() const { return dim == 1 ? n : n * n; }
  /// Quadrature weight dv^dim.
  double weight() const { return dim == 1 ? dv() : dv() * dv(); }
  /// Values of velocity component `axis` at every grid point.
  Vector component(int axis) const;
  /// |v|^2 at every grid point.
  Vector speed_squared() const;
};

/// Midpoint-rule L2 inner product on the spatial grid.
double inner_product_x(const SpatialGrid& grid, const Vector& a, const Vector& b);

/// Rectangle-rule L2 inner product on the velocity grid.
double inner_product_v(const VelocityGrid& grid, const Vector& a, const Vector& b);

/// Pads `field` with `width` ghost cells on each side.
Vector ghost_fill(const Vector& field, Boundary bc, Index width);

}  // namespace dlrk
