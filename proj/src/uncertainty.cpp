#include "urt/uncertainty.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "urt/error.hpp"

namespace urt {
namespace {

void require(bool ok, ErrorKind kind, const std::string& message) {
  if (!ok) throw Error("uncertainty", kind, message);
}

void require_1d_position(const SampledField& field) {
  require(field.space == Space::position, ErrorKind::usage,
          "expected a position-space field");
  require(field.grid.dimension == 1, ErrorKind::usage,
          "moments are defined for one-dimensional fields");
}

// |f|^2 weights and their integral; rejects zero-norm input.
struct Density {
  Eigen::ArrayXd rho;
  Eigen::ArrayXd coord;
  double h = 0.0;
  double N = 0.0;
};

Density density(const SampledField& field) {
  Density d;
  d.rho = field.values.abs2();
  d.coord = field.grid.nodes(0);
  d.h = field.grid.spacing(0);
  d.N = d.rho.sum() * d.h;
  require(d.N > 0.0 && std::isfinite(d.N), ErrorKind::degenerate,
          "field has zero or non-finite norm");
  return d;
}

double mean(const Density& d) { return (d.coord * d.rho).sum() * d.h / d.N; }

double variance(const Density& d) {
  const double c = mean(d);
  return ((d.coord - c).square() * d.rho).sum() * d.h / d.N;
}

double tail(const Density& d) {
  const auto n = d.rho.size();
  const auto edge = std::max<Eigen::Index>(1, (n * 25 + 999) / 1000);
  const double outer = d.rho.head(edge).sum() + d.rho.tail(edge).sum();
  return outer * d.h / d.N;
}

Density momentum_density(const SampledField& field) {
  return density(forward_transform(field));
}

}  // namespace

double centroid_position(const SampledField& field) {
  require_1d_position(field);
  return mean(density(field));
}

double centroid_momentum(const SampledField& field) {
  require_1d_position(field);
  return mean(momentum_density(field));
}

double variance_position(const SampledField& field) {
  require_1d_position(field);
  return variance(density(field));
}

double variance_momentum(const SampledField& field) {
  require_1d_position(field);
  return variance(momentum_density(field));
}

double tail_mass(const SampledField& field) {
  require_1d_position(field);
  return tail(density(field));
}

MomentReport ur_product(const SampledField& field) {
  require_1d_position(field);
  const Density dx = density(field);
  const Density dp = momentum_density(field);
  require(tail(dx) <= kTailFraction, ErrorKind::truncation,
          "position tails exceed 1e-8 of the norm; enlarge the extent");
  require(tail(dp) <= kTailFraction, ErrorKind::truncation,
          "momentum tails exceed 1e-8 of the norm; refine the grid");

  MomentReport r;
  r.norm_N = dx.N;
  r.x0 = mean(dx);
  r.p0 = mean(dp);
  r.var_x = variance(dx);
  r.var_p = variance(dp);
  r.product = r.var_x * r.var_p;
  require(r.product >= 0.25 - kBoundTolerance, ErrorKind::numerical,
          "uncertainty product " + std::to_string(r.product) +
              " is below 1/4");
  return r;
}

QuadraticFormSample quadratic_form(const SampledField& field, double alpha) {
  const MomentReport r = ur_product(field);
  const Eigen::ArrayXd x = field.grid.nodes(0);
  const std::complex<double> ip0(0.0, r.p0);
  const Eigen::ArrayXcd g =
      alpha * (x - r.x0).cast<std::complex<double>>() * field.values +
      spectral_derivative(field, 0).values - ip0 * field.values;
  const double value = g.abs2().sum() * field.grid.spacing(0) / r.norm_N;
  require(value >= -1e-10, ErrorKind::numerical, "quadratic form negative");
  return {alpha, value};
}

double cross_term(const SampledField& field) {
  const MomentReport r = ur_product(field);
  const Eigen::ArrayXd x = field.grid.nodes(0);
  const Eigen::ArrayXcd df = spectral_derivative(field, 0).values;
  const Eigen::ArrayXd integrand =
      (x - r.x0) * (field.values.conjugate() * df).real();
  return -2.0 * integrand.sum() * field.grid.spacing(0) / r.norm_N;
}

SampledField random_smooth_field(const Grid& grid, std::uint64_t seed) {
  require(grid.dimension == 1, ErrorKind::usage,
          "random fields are one-dimensional");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(3, 10);
  const double lo = grid.center[0] - 0.25 * grid.extent[0];
  const double hi = grid.center[0] + 0.25 * grid.extent[0];
  std::uniform_real_distribution<double> centre(lo, hi);
  std::uniform_real_distribution<double> width(0.2, 2.0);
  std::normal_distribution<double> amp(0.0, 1.0);

  struct Bump {
    double c, w;
    std::complex<double> a;
  };
  std::vector<Bump> bumps(count(rng));
  for (auto& b : bumps) {
    b.c = centre(rng);
    b.w = width(rng);
    const double re = amp(rng);
    b.a = {re, amp(rng)};
  }
  return sample_field(grid, [&](const Eigen::Vector3d& r) {
    std::complex<double> sum = 0.0;
    for (const auto& b : bumps) {
      const double u = (r[0] - b.c) / b.w;
      sum += b.a * std::exp(-0.5 * u * u);
    }
    return sum;
  });
}

}  // namespace urt
