#pragma once

// Position/momentum moments of one-dimensional fields and the quadratic form
//
//   Q(alpha) = (1/N) * integral |(alpha (x - x0) + d/dx - i p0) f|^2 dx
//            = alpha^2 var_x - alpha * B + var_p,
//
// whose nonnegativity for every alpha gives var_x * var_p >= 1/4.

#include <cstdint>

#include "urt/grid.hpp"

namespace urt {

struct MomentReport {
  double norm_N = 0.0;
  double x0 = 0.0;
  double p0 = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
  double product = 0.0;
};

struct QuadraticFormSample {
  double alpha = 0.0;
  double value = 0.0;
};

inline constexpr double kBoundTolerance = 1e-9;
inline constexpr double kTailFraction = 1e-8;

double centroid_position(const SampledField& field);
double centroid_momentum(const SampledField& field);
double variance_position(const SampledField& field);
double variance_momentum(const SampledField& field);

/// Mass of |f|^2 in the outer 2.5% of the domain on each side, relative to N.
double tail_mass(const SampledField& field);

/// Full report. Throws truncation if the tails of |f|^2 or |F|^2 exceed
/// kTailFraction of N and numerical if the bound is violated.
MomentReport ur_product(const SampledField& field);

QuadraticFormSample quadratic_form(const SampledField& field, double alpha);

/// B in the expansion above: -(2/N) * integral (x - x0) Re(conj(f) f') dx.
/// Integration by parts gives exactly 1 for any decaying f.
double cross_term(const SampledField& field);

/// Sum of 3 to 10 Gaussians with centres in the central half of the grid,
/// widths in [0.2, 2] and complex amplitudes. Deterministic in `seed`.
SampledField random_smooth_field(const Grid& grid, std::uint64_t seed);

}  // namespace urt
