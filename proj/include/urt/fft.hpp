#pragma once

// Raw multidimensional FFTs on grid-shaped buffers. These are the building
// blocks for the physical transforms in grid.hpp and for propagators that
// only need multipliers in wavenumber space.

#include <Eigen/Core>

#include "urt/grid.hpp"

namespace urt::fft {

/// Unnormalised in-place forward DFT (kernel exp(-2 pi i jk/n)).
void forward(const Grid& grid, Eigen::ArrayXcd& values);

/// Unnormalised in-place backward DFT (kernel exp(+2 pi i jk/n)).
void backward(const Grid& grid, Eigen::ArrayXcd& values);

/// Angular wavenumber of each flattened mode along `axis`, in FFT storage
/// order (0, 1, ..., n/2-1, -n/2, ..., -1) times 2 pi / extent.
Eigen::ArrayXd wavenumbers(const Grid& grid, int axis);

/// Sum of squared wavenumbers over the active axes, per flattened mode.
Eigen::ArrayXd wavenumbers_squared(const Grid& grid);

}  // namespace urt::fft
