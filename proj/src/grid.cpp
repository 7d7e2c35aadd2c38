#include "urt/grid.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "urt/error.hpp"
#include "urt/fft.hpp"

namespace urt {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::usage: return "usage";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::untracked_peak: return "untracked-peak";
    case ErrorKind::insufficient_fringes: return "insufficient-fringes";
    case ErrorKind::proximity: return "proximity";
    case ErrorKind::singular: return "singular";
    case ErrorKind::invalid_ensemble: return "invalid-ensemble";
    case ErrorKind::io: return "io";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, ErrorKind kind, const std::string& message) {
  if (!ok) throw Error("grid", kind, message);
}

// Flattened outer product of one factor per axis; unused axes take factor 1.
Eigen::ArrayXcd separable(const Grid& grid,
                          const std::array<Eigen::ArrayXcd, 3>& f) {
  Eigen::ArrayXcd out(grid.size());
  Eigen::Index flat = 0;
  for (int i = 0; i < grid.points[0]; ++i) {
    for (int j = 0; j < grid.points[1]; ++j) {
      const std::complex<double> ij = f[0][i] * f[1][j];
      for (int k = 0; k < grid.points[2]; ++k) out[flat++] = ij * f[2][k];
    }
  }
  return out;
}

std::array<Eigen::ArrayXcd, 3> unit_factors(const Grid& grid) {
  std::array<Eigen::ArrayXcd, 3> f;
  for (int a = 0; a < 3; ++a) f[a] = Eigen::ArrayXcd::Ones(grid.points[a]);
  return f;
}

double x_min(const Grid& grid, int axis) {
  return grid.center[axis] - 0.5 * grid.extent[axis];
}

// Forward: out_k = h/sqrt(2pi) exp(-i p_k x_min) DFT[(-1)^j exp(-i c j h) f_j]
// where c is the centre of the momentum grid. The (-1)^j factor moves the
// zero mode to index n/2 so that index k maps to p_k = c + (k - n/2) dp.
SampledField forward_impl(const SampledField& in) {
  const Grid& pos = in.grid;
  const Grid& mom = in.conjugate;
  auto pre = unit_factors(pos);
  auto post = unit_factors(mom);
  for (int a = 0; a < pos.dimension; ++a) {
    const double h = pos.spacing(a);
    const double scale = h / std::sqrt(2.0 * kPi);
    for (int j = 0; j < pos.points[a]; ++j) {
      const double parity = (j % 2 == 0) ? 1.0 : -1.0;
      pre[a][j] = parity * std::polar(1.0, -mom.center[a] * j * h);
      post[a][j] = scale * std::polar(1.0, -mom.node(a, j) * x_min(pos, a));
    }
  }
  SampledField out{mom, pos, Space::momentum, in.values * separable(pos, pre)};
  fft::forward(pos, out.values);
  out.values *= separable(mom, post);
  return out;
}

// Inverse of the above, with dp/sqrt(2pi) as the scale.
SampledField inverse_impl(const SampledField& in) {
  const Grid& mom = in.grid;
  const Grid& pos = in.conjugate;
  auto pre = unit_factors(mom);
  auto post = unit_factors(pos);
  for (int a = 0; a < mom.dimension; ++a) {
    const double h = pos.spacing(a);
    const double scale = mom.spacing(a) / std::sqrt(2.0 * kPi);
    for (int k = 0; k < mom.points[a]; ++k) {
      const double parity = (k % 2 == 0) ? 1.0 : -1.0;
      pre[a][k] = std::polar(1.0, mom.node(a, k) * x_min(pos, a));
      post[a][k] = scale * parity * std::polar(1.0, mom.center[a] * k * h);
    }
  }
  SampledField out{pos, mom, Space::position, in.values * separable(mom, pre)};
  fft::backward(mom, out.values);
  out.values *= separable(pos, post);
  return out;
}

}  // namespace

std::array<int, 3> Grid::unflatten(Eigen::Index flat) const {
  const int k = static_cast<int>(flat % points[2]);
  flat /= points[2];
  const int j = static_cast<int>(flat % points[1]);
  const int i = static_cast<int>(flat / points[1]);
  return {i, j, k};
}

Eigen::Vector3d Grid::position(Eigen::Index flat) const {
  const auto idx = unflatten(flat);
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  for (int a = 0; a < dimension; ++a) r[a] = node(a, idx[a]);
  return r;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dimension; ++a) v *= spacing(a);
  return v;
}

Eigen::ArrayXd Grid::nodes(int axis) const {
  Eigen::ArrayXd out(points[axis]);
  for (int k = 0; k < points[axis]; ++k) out[k] = node(axis, k);
  return out;
}

Grid make_grid(std::span<const int> points, std::span<const double> extent,
               std::span<const double> center) {
  const auto dim = points.size();
  require(dim >= 1 && dim <= 3, ErrorKind::configuration,
          "dimension must be 1, 2 or 3");
  require(extent.size() == dim && center.size() == dim,
          ErrorKind::configuration, "per-axis parameter count mismatch");
  Grid g;
  g.dimension = static_cast<int>(dim);
  for (size_t a = 0; a < dim; ++a) {
    const int n = points[a];
    require(n >= 8 && std::has_single_bit(static_cast<unsigned>(n)),
            ErrorKind::configuration,
            "points per axis must be a power of two >= 8, got " +
                std::to_string(n));
    require(std::isfinite(extent[a]) && extent[a] > 0.0,
            ErrorKind::configuration, "extent must be positive");
    require(std::isfinite(center[a]), ErrorKind::configuration,
            "center must be finite");
    g.points[a] = n;
    g.extent[a] = extent[a];
    g.center[a] = center[a];
  }
  return g;
}

Grid make_grid(int dimension, int points_per_axis, double extent,
               double center) {
  require(dimension >= 1 && dimension <= 3, ErrorKind::configuration,
          "dimension must be 1, 2 or 3");
  std::array<int, 3> n;
  std::array<double, 3> e, c;
  n.fill(points_per_axis);
  e.fill(extent);
  c.fill(center);
  const auto d = static_cast<size_t>(dimension);
  return make_grid(std::span(n.data(), d), std::span(e.data(), d),
                   std::span(c.data(), d));
}

Grid conjugate_grid(const Grid& grid) {
  Grid g = grid;
  for (int a = 0; a < grid.dimension; ++a) {
    g.extent[a] = 2.0 * kPi / grid.spacing(a);
    g.center[a] = 0.0;
  }
  return g;
}

SampledField make_field(const Grid& grid, Space space) {
  SampledField f;
  f.grid = grid;
  f.conjugate = conjugate_grid(grid);
  f.space = space;
  f.values = Eigen::ArrayXcd::Zero(grid.size());
  return f;
}

SampledField forward_transform(const SampledField& field) {
  require(field.space == Space::position, ErrorKind::usage,
          "forward_transform expects a position-space field");
  return forward_impl(field);
}

SampledField inverse_transform(const SampledField& field) {
  require(field.space == Space::momentum, ErrorKind::usage,
          "inverse_transform expects a momentum-space field");
  return inverse_impl(field);
}

double norm_squared(const SampledField& field) {
  return field.values.abs2().sum() * field.grid.cell_volume();
}

SampledField spectral_derivative(const SampledField& field, int axis,
                                 int order) {
  require(field.space == Space::position, ErrorKind::usage,
          "spectral_derivative expects a position-space field");
  require(order >= 1, ErrorKind::usage, "derivative order must be >= 1");
  require(axis >= 0 && axis < field.grid.dimension, ErrorKind::usage,
          "derivative axis out of range");

  const Grid& g = field.grid;
  const int n = g.points[axis];
  const double dk = 2.0 * kPi / g.extent[axis];
  Eigen::ArrayXcd factor(n);
  for (int k = 0; k < n; ++k) {
    const int m = k < n / 2 ? k : k - n;
    if (m == -n / 2 && order % 2 == 1) {
      factor[k] = 0.0;
    } else {
      factor[k] = std::pow(std::complex<double>(0.0, dk * m), order);
    }
  }
  auto factors = unit_factors(g);
  factors[axis] = factor / static_cast<double>(g.size());

  SampledField out = field;
  fft::forward(g, out.values);
  out.values *= separable(g, factors);
  fft::backward(g, out.values);
  return out;
}

SampledField laplacian(const SampledField& field) {
  require(field.space == Space::position, ErrorKind::usage,
          "laplacian expects a position-space field");
  const Grid& g = field.grid;
  SampledField out = field;
  fft::forward(g, out.values);
  out.values *= (-fft::wavenumbers_squared(g) / static_cast<double>(g.size()))
                    .cast<std::complex<double>>();
  fft::backward(g, out.values);
  return out;
}

double edge_amplitude(const SampledField& field) {
  const Grid& g = field.grid;
  const double peak = field.values.abs().maxCoeff();
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  for (Eigen::Index flat = 0; flat < g.size(); ++flat) {
    const auto idx = g.unflatten(flat);
    bool on_edge = false;
    for (int a = 0; a < g.dimension; ++a) {
      on_edge = on_edge || idx[a] == 0 || idx[a] == g.points[a] - 1;
    }
    if (on_edge) edge = std::max(edge, std::abs(field.values[flat]));
  }
  return edge / peak;
}

bool is_finite(const SampledField& field) {
  return field.values.real().allFinite() && field.values.imag().allFinite();
}

}  // namespace urt
