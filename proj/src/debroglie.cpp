#include "urt/debroglie.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "urt/error.hpp"

namespace urt {
namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, ErrorKind kind, const std::string& message) {
  if (!ok) throw Error("debroglie", kind, message);
}

// Kaiser-shaped step: 1 for d <= 0, 0 for d >= taper, and in between one
// minus the normalised running integral of I0(beta sqrt(1 - (2u/T - 1)^2)).
class KaiserStep {
 public:
  KaiserStep(double taper, double beta) : taper_(taper), beta_(beta) {
    total_ = integral(taper_);
  }

  double operator()(double d) const {
    if (d <= 0.0) return 1.0;
    if (d >= taper_) return 0.0;
    return 1.0 - integral(d) / total_;
  }

 private:
  double kernel(double u) const {
    const double q = 2.0 * u / taper_ - 1.0;
    return std::cyl_bessel_i(0.0, beta_ * std::sqrt(std::max(0.0, 1.0 - q * q)));
  }

  // Composite Simpson on [0, d].
  double integral(double d) const {
    const int m = 2000;
    const double h = d / m;
    double sum = kernel(0.0) + kernel(d);
    for (int k = 1; k < m; ++k) sum += (k % 2 ? 4.0 : 2.0) * kernel(k * h);
    return sum * h / 3.0;
  }

  double taper_;
  double beta_;
  double total_;
};

constexpr double kInteriorFraction = 0.16;
constexpr double kTaperFraction = 0.835;
constexpr double kWindowBeta = 30.0;

void check_resolution(const PacketParams& p, const Grid& grid) {
  require(grid.dimension == 3, ErrorKind::usage, "packet grids are 3-D");
  const double speed = p.v.norm();
  for (int a = 0; a < 3; ++a) {
    const double h = grid.spacing(a);
    const double slack = 1.0 + 1e-12;
    require(8.0 * h <= kPi / p.s * slack, ErrorKind::resolution,
            "fewer than 8 points across the width pi/s");
    require(speed == 0.0 || 8.0 * h <= 2.0 * kPi / speed * slack,
            ErrorKind::resolution,
            "fewer than 8 points per wavelength 2 pi/|v|");
  }
}

}  // namespace

PacketParams make_packet(double s, const Eigen::Vector3d& v) {
  require(std::isfinite(s) && s > 0.0, ErrorKind::configuration,
          "s must be positive");
  require(v.allFinite(), ErrorKind::configuration, "v must be finite");
  return {s, v, 0.5 * (v.squaredNorm() + s * s)};
}

double spherical_j0(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

std::complex<double> evaluate_packet(const PacketParams& p,
                                     const Eigen::Vector3d& r, double t) {
  const double radial = spherical_j0(p.s * (r - p.v * t).norm());
  return std::polar(radial, p.v.dot(r) - p.omega * t);
}

SampledField sample_packet(const PacketParams& p, const Grid& grid, double t) {
  require(grid.dimension == 3, ErrorKind::usage, "packet grids are 3-D");
  return sample_field(grid, [&](const Eigen::Vector3d& r) {
    return evaluate_packet(p, r, t);
  });
}

Grid packet_grid(const PacketParams& p, int points_per_axis) {
  double h = kPi / p.s;
  if (p.v.norm() > 0.0) h = std::min(h, 2.0 * kPi / p.v.norm());
  h /= 8.0;
  return make_grid(3, points_per_axis, points_per_axis * h);
}

double schrodinger_residual(const PacketParams& p, const Grid& grid, double t,
                            double dt) {
  check_resolution(p, grid);
  require(dt > 0.0, ErrorKind::configuration, "dt must be positive");

  std::array<Eigen::ArrayXd, 3> window;
  std::array<Eigen::Array<bool, Eigen::Dynamic, 1>, 3> inside;
  for (int a = 0; a < 3; ++a) {
    const double half = 0.5 * grid.extent[a];
    const double flat = kInteriorFraction * half;
    const KaiserStep step(kTaperFraction * half, kWindowBeta);
    window[a].resize(grid.points[a]);
    inside[a].resize(grid.points[a]);
    for (int k = 0; k < grid.points[a]; ++k) {
      const double d = std::abs(grid.node(a, k) - grid.center[a]) - flat;
      window[a][k] = step(d);
      inside[a][k] = d <= 1e-12 * half;
    }
  }

  SampledField psi = sample_packet(p, grid, t);
  const SampledField ahead = sample_packet(p, grid, t + dt);
  const SampledField behind = sample_packet(p, grid, t - dt);
  const double peak = psi.values.abs().maxCoeff();

  for (Eigen::Index n = 0; n < grid.size(); ++n) {
    const auto idx = grid.unflatten(n);
    psi.values[n] *= window[0][idx[0]] * window[1][idx[1]] * window[2][idx[2]];
  }
  const SampledField lap = laplacian(psi);

  const std::complex<double> i(0.0, 1.0);
  double worst = 0.0;
  for (Eigen::Index n = 0; n < grid.size(); ++n) {
    const auto idx = grid.unflatten(n);
    if (!(inside[0][idx[0]] && inside[1][idx[1]] && inside[2][idx[2]])) continue;
    const std::complex<double> dpsi =
        (ahead.values[n] - behind.values[n]) / (2.0 * dt);
    worst = std::max(worst, std::abs(i * dpsi + 0.5 * lap.values[n]));
  }
  return worst / peak;
}

Eigen::Vector3d peak_position(const SampledField& field) {
  const Grid& g = field.grid;
  Eigen::Index best = 0;
  const Eigen::ArrayXd rho = field.values.abs2();
  rho.maxCoeff(&best);
  const auto idx = g.unflatten(best);

  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  for (int a = 0; a < g.dimension; ++a) {
    require(idx[a] > 0 && idx[a] < g.points[a] - 1, ErrorKind::untracked_peak,
            "maximum lies on the grid boundary");
    auto lo = idx, hi = idx;
    --lo[a];
    ++hi[a];
    const double fm = rho[g.flat_index(lo[0], lo[1], lo[2])];
    const double f0 = rho[best];
    const double fp = rho[g.flat_index(hi[0], hi[1], hi[2])];
    const double curv = fm - 2.0 * f0 + fp;
    const double shift = curv < 0.0 ? 0.5 * (fm - fp) / curv : 0.0;
    r[a] = g.node(a, idx[a]) + shift * g.spacing(a);
  }
  return r;
}

std::vector<std::pair<double, Eigen::Vector3d>> peak_trajectory(
    const PacketParams& p, const std::vector<double>& times) {
  require(!times.empty(), ErrorKind::configuration, "no sample times");
  const auto [t_min, t_max] = std::minmax_element(times.begin(), times.end());
  const Eigen::Vector3d mid = 0.5 * (*t_min + *t_max) * p.v;
  const double extent = p.v.norm() * (*t_max - *t_min) + 2.0 * kPi / p.s;
  const std::array<int, 3> n{64, 64, 64};
  const std::array<double, 3> e{extent, extent, extent};
  const std::array<double, 3> c{mid[0], mid[1], mid[2]};
  const Grid grid = make_grid(n, e, c);

  std::vector<std::pair<double, Eigen::Vector3d>> out;
  out.reserve(times.size());
  for (double t : times) out.emplace_back(t, peak_position(sample_packet(p, grid, t)));
  return out;
}

Eigen::Vector3d fitted_velocity(
    const std::vector<std::pair<double, Eigen::Vector3d>>& trajectory) {
  require(trajectory.size() >= 2, ErrorKind::configuration,
          "need at least two samples to fit a velocity");
  double t_mean = 0.0;
  Eigen::Vector3d r_mean = Eigen::Vector3d::Zero();
  for (const auto& [t, r] : trajectory) {
    t_mean += t;
    r_mean += r;
  }
  t_mean /= trajectory.size();
  r_mean /= trajectory.size();
  double stt = 0.0;
  Eigen::Vector3d str = Eigen::Vector3d::Zero();
  for (const auto& [t, r] : trajectory) {
    stt += (t - t_mean) * (t - t_mean);
    str += (t - t_mean) * (r - r_mean);
  }
  require(stt > 0.0, ErrorKind::degenerate, "all sample times coincide");
  return str / stt;
}

}  // namespace urt
