#pragma once

// Uniform periodic grids, sampled complex fields and the unitary Fourier
// transform between position and momentum space.
//
// Transform convention (hbar = 1):
//
//   F(p) = (2 pi)^(-d/2) * integral f(x) exp(-i p.x) dx
//   f(x) = (2 pi)^(-d/2) * integral F(p) exp(+i p.x) dp
//
// The symmetric prefactor makes Parseval hold exactly, so the norm of a field
// is the same in both spaces. The momentum operator is -i d/dx, and a field
// f(x) exp(i k x) has its spectrum centred at p = +k.

#include <array>
#include <complex>
#include <span>

#include <Eigen/Core>

namespace urt {

enum class Space { position, momentum };

/// Tensor-product uniform grid with 1, 2 or 3 axes. Axis 0 varies slowest in
/// the flattened (row-major) layout. Unused axes have a single point.
struct Grid {
  int dimension = 1;
  std::array<int, 3> points{1, 1, 1};
  std::array<double, 3> extent{1.0, 1.0, 1.0};
  std::array<double, 3> center{0.0, 0.0, 0.0};

  double spacing(int axis) const { return extent[axis] / points[axis]; }

  /// Coordinate of node k: center - extent/2 + k * spacing.
  double node(int axis, int k) const {
    return center[axis] + (k - points[axis] / 2) * spacing(axis);
  }

  Eigen::Index size() const {
    return Eigen::Index(points[0]) * points[1] * points[2];
  }

  Eigen::Index flat_index(int i, int j = 0, int k = 0) const {
    return (Eigen::Index(i) * points[1] + j) * points[2] + k;
  }

  std::array<int, 3> unflatten(Eigen::Index flat) const;
  Eigen::Vector3d position(Eigen::Index flat) const;

  /// Product of spacings over the active axes.
  double cell_volume() const;

  Eigen::ArrayXd nodes(int axis) const;
};

Grid make_grid(int dimension, int points_per_axis, double extent,
               double center = 0.0);
Grid make_grid(std::span<const int> points, std::span<const double> extent,
               std::span<const double> center);

/// Grid of the conjugate variable: same point counts, spacing 2 pi / extent,
/// centred at zero.
Grid conjugate_grid(const Grid& grid);

/// Complex samples on a grid. `conjugate` is the grid of the other space and
/// is what an inverse transform lands on.
struct SampledField {
  Grid grid;
  Grid conjugate;
  Space space = Space::position;
  Eigen::ArrayXcd values;
};

SampledField make_field(const Grid& grid, Space space = Space::position);

/// Evaluates `fn(position)` on every node. `fn` receives an Eigen::Vector3d
/// whose unused components are zero.
template <typename Fn>
SampledField sample_field(const Grid& grid, Fn&& fn) {
  SampledField field = make_field(grid);
  for (Eigen::Index n = 0; n < grid.size(); ++n) {
    field.values[n] = std::complex<double>(fn(grid.position(n)));
  }
  return field;
}

SampledField forward_transform(const SampledField& field);
SampledField inverse_transform(const SampledField& field);

/// Rectangle-rule integral of |f|^2 (exact trapezoid for periodic data).
double norm_squared(const SampledField& field);

/// d^order/dx_axis^order by multiplication with (i p)^order in Fourier space.
/// Odd orders drop the Nyquist mode.
SampledField spectral_derivative(const SampledField& field, int axis,
                                 int order = 1);

SampledField laplacian(const SampledField& field);

/// Largest modulus on the outermost layer of nodes relative to the peak
/// modulus. Periodic wrap-around is negligible when this is ~1e-14 or less.
double edge_amplitude(const SampledField& field);

/// Every value finite.
bool is_finite(const SampledField& field);

}  // namespace urt
