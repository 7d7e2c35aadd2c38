#include "urt/schrodinger2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "urt/error.hpp"
#include "urt/fft.hpp"

namespace urt {
namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

void require(bool ok, ErrorKind kind, const std::string& message) {
  if (!ok) throw Error("schrodinger2d", kind, message);
}

// Per-step mask value at depth u in [0, 1] into the absorbing layer.
double ramp(double u, double exponent) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double c = std::cos(0.5 * kPi * u);
  return std::pow(c * c, exponent);
}

}  // namespace

Eigen::ArrayXd screen_potential(const SlitScreen& screen, const Grid& grid) {
  require(grid.dimension == 2, ErrorKind::usage, "screen grids are 2-D");
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(grid.size());
  if (!screen.present) return v;
  require(screen.open_flags.size() == screen.slit_centers.size(),
          ErrorKind::configuration, "one open flag per slit required");
  require(screen.slit_width > 2.0 * grid.spacing(1), ErrorKind::configuration,
          "slit width must exceed two grid spacings");
  require(screen.thickness >= 2.0 * grid.spacing(0), ErrorKind::configuration,
          "screen thickness must be at least two grid spacings");
  auto centers = screen.slit_centers;
  std::sort(centers.begin(), centers.end());
  for (size_t k = 1; k < centers.size(); ++k) {
    require(centers[k] - centers[k - 1] > screen.slit_width,
            ErrorKind::configuration, "slits overlap");
  }

  const double half_t = 0.5 * screen.thickness;
  const double half_w = 0.5 * screen.slit_width;
  for (int i = 0; i < grid.points[0]; ++i) {
    if (std::abs(grid.node(0, i) - screen.screen_x) > half_t) continue;
    for (int j = 0; j < grid.points[1]; ++j) {
      const double y = grid.node(1, j);
      bool open = false;
      for (size_t s = 0; s < screen.slit_centers.size(); ++s) {
        open = open || (screen.open_flags[s] &&
                        std::abs(y - screen.slit_centers[s]) < half_w);
      }
      if (!open) v[grid.flat_index(i, j)] = screen.barrier;
    }
  }
  return v;
}

SampledField initial_packet_2d(const Grid& grid, const Eigen::Vector2d& center,
                               const Eigen::Vector2d& velocity, double width,
                               const SlitScreen* screen) {
  require(grid.dimension == 2, ErrorKind::usage, "packet grids are 2-D");
  require(width > 0.0, ErrorKind::configuration, "width must be positive");
  const double tail = 1e-12;
  // exp(-d^2 / (4 w^2)) <= tail  <=>  d >= reach
  const double reach = 2.0 * width * std::sqrt(-std::log(tail));
  for (int a = 0; a < 2; ++a) {
    const double lo = grid.node(a, 0);
    const double hi = grid.node(a, grid.points[a] - 1);
    require(center[a] - lo >= reach && hi - center[a] >= reach,
            ErrorKind::configuration, "packet tails reach the grid boundary");
  }
  if (screen && screen->present) {
    const double face = screen->screen_x - 0.5 * screen->thickness;
    require(face - center[0] >= reach, ErrorKind::configuration,
            "packet tails overlap the screen");
  }

  SampledField psi = sample_field(grid, [&](const Eigen::Vector3d& r) {
    const Eigen::Vector2d d = r.head<2>() - center;
    return std::exp(cd(-d.squaredNorm() / (4.0 * width * width),
                       velocity.dot(r.head<2>())));
  });
  psi.values /= std::sqrt(norm_squared(psi));
  return psi;
}

SplitStepPropagator::SplitStepPropagator(const Grid& grid,
                                         const Eigen::ArrayXd& potential,
                                         double dt, double absorber_width,
                                         double absorber_rate)
    : grid_(grid), dt_(dt) {
  require(potential.size() == grid.size(), ErrorKind::configuration,
          "potential size does not match the grid");
  require(dt > 0.0 && std::isfinite(dt), ErrorKind::configuration,
          "dt must be positive");
  const double vmax = potential.size() ? potential.abs().maxCoeff() : 0.0;
  require(dt * vmax <= 0.5, ErrorKind::configuration,
          "dt * max|V| exceeds 0.5");
  double kmax2 = 0.0;
  for (int a = 0; a < grid.dimension; ++a) {
    kmax2 += std::pow(kPi / grid.spacing(a), 2);
  }
  require(dt * kmax2 / 2.0 <= kPi, ErrorKind::configuration,
          "dt * p_max^2 / 2 exceeds pi");

  half_potential_ = (cd(0.0, -0.5 * dt) * potential.cast<cd>()).exp();
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  kinetic_ = (cd(0.0, -0.5 * dt) * fft::wavenumbers_squared(grid).cast<cd>())
                 .exp() *
             inv_n;

  if (absorber_width > 0.0) {
    absorbing_ = true;
    const double exponent = absorber_rate * dt;
    std::array<Eigen::ArrayXd, 3> f;
    for (int a = 0; a < 3; ++a) f[a] = Eigen::ArrayXd::Ones(grid.points[a]);
    for (int a = 0; a < grid.dimension; ++a) {
      // Measured from the periodic boundary c +- L/2 so that the mask is
      // mirror symmetric on the grid.
      const double lo = grid.center[a] - 0.5 * grid.extent[a];
      const double hi = grid.center[a] + 0.5 * grid.extent[a];
      for (int k = 0; k < grid.points[a]; ++k) {
        const double x = grid.node(a, k);
        const double depth = std::max(lo + absorber_width - x,
                                      x - (hi - absorber_width));
        f[a][k] = ramp(depth / absorber_width, exponent);
      }
    }
    mask_.resize(grid.size());
    for (Eigen::Index n = 0; n < grid.size(); ++n) {
      const auto idx = grid.unflatten(n);
      mask_[n] = f[0][idx[0]] * f[1][idx[1]] * f[2][idx[2]];
    }
  }
}

void SplitStepPropagator::step(SampledField& psi) const {
  psi.values *= half_potential_;
  fft::forward(grid_, psi.values);
  psi.values *= kinetic_;
  fft::backward(grid_, psi.values);
  psi.values *= half_potential_;
  if (absorbing_) psi.values *= mask_;
}

void SplitStepPropagator::evolve(SampledField& psi, int n_steps) const {
  for (int k = 0; k < n_steps; ++k) step(psi);
}

SampledField split_step_evolve(const SampledField& psi,
                               const Eigen::ArrayXd& potential, double dt,
                               int n_steps, double absorber_width) {
  require(psi.space == Space::position, ErrorKind::usage,
          "expected a position-space wavefunction");
  require(n_steps >= 0, ErrorKind::configuration, "n_steps must be >= 0");
  const SplitStepPropagator prop(psi.grid, potential, dt, absorber_width);
  SampledField out = psi;
  prop.evolve(out, n_steps);
  require(is_finite(out), ErrorKind::numerical, "wavefunction became non-finite");
  return out;
}

std::complex<double> free_gaussian_2d(const Eigen::Vector2d& center,
                                      const Eigen::Vector2d& velocity,
                                      double width, const Eigen::Vector2d& r,
                                      double t) {
  const cd spread(1.0, t / (2.0 * width * width));
  cd value = 1.0;
  for (int a = 0; a < 2; ++a) {
    const double d = r[a] - center[a] - velocity[a] * t;
    value *= std::pow(2.0 * kPi * width * width, -0.25) / std::sqrt(spread) *
             std::exp(-d * d / (4.0 * width * width * spread) +
                      cd(0.0, velocity[a] * (r[a] - 0.5 * velocity[a] * t)));
  }
  return value;
}

Profile detect_pattern(const SampledField& psi, double observe_x) {
  PatternDetector detector(psi.grid, observe_x);
  detector.accumulate(psi, 1.0);
  return detector.profile();
}

PatternDetector::PatternDetector(const Grid& grid, double observe_x)
    : grid_(grid), observe_x_(observe_x) {
  require(grid.dimension == 2, ErrorKind::usage, "detector grids are 2-D");
  const double u = (observe_x - grid.node(0, 0)) / grid.spacing(0);
  require(u >= 0.0 && u <= grid.points[0] - 1, ErrorKind::configuration,
          "observation plane outside the grid");
  column_ = std::min(static_cast<int>(std::floor(u)), grid.points[0] - 2);
  frac_ = u - column_;
  sum_ = Eigen::ArrayXd::Zero(grid.points[1]);
}

void PatternDetector::accumulate(const SampledField& psi, double dt) {
  const int ny = grid_.points[1];
  const auto left = psi.values.segment(grid_.flat_index(column_), ny).abs2();
  const auto right =
      psi.values.segment(grid_.flat_index(column_ + 1), ny).abs2();
  sum_ += dt * ((1.0 - frac_) * left + frac_ * right);
  reference_ += dt * psi.values.abs2().maxCoeff();
}

Profile PatternDetector::profile() const {
  Profile p;
  p.y = grid_.nodes(1);
  p.intensity = sum_;
  // Nothing appreciable arrived: the plane only saw far tails, if anything.
  if (!(sum_.maxCoeff() > 1e-12 * reference_)) {
    p.warnings.push_back("empty-profile: nothing reached x = " +
                         std::to_string(observe_x_));
  }
  return p;
}

std::vector<double> fringe_maxima(const Profile& profile) {
  const Eigen::ArrayXd& I = profile.intensity;
  const auto n = I.size();
  std::vector<double> out;
  if (n < 3) return out;
  const double peak = I.maxCoeff();
  if (!(peak > 0.0)) return out;
  const double h = profile.y[1] - profile.y[0];

  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    if (!(I[k] > I[k - 1] && I[k] >= I[k + 1])) continue;
    if (I[k] < 0.05 * peak) continue;
    // Prominence: lowest point between k and the nearest higher sample on
    // each side (or the profile end).
    double left_min = I[k];
    for (Eigen::Index j = k - 1; j >= 0 && I[j] <= I[k]; --j) {
      left_min = std::min(left_min, I[j]);
    }
    double right_min = I[k];
    for (Eigen::Index j = k + 1; j < n && I[j] <= I[k]; ++j) {
      right_min = std::min(right_min, I[j]);
    }
    if (I[k] - std::max(left_min, right_min) < 0.05 * peak) continue;
    const double curv = I[k - 1] - 2.0 * I[k] + I[k + 1];
    const double shift = curv < 0.0 ? 0.5 * (I[k - 1] - I[k + 1]) / curv : 0.0;
    out.push_back(profile.y[k] + shift * h);
  }
  return out;
}

double fringe_spacing(const Profile& profile) {
  const auto maxima = fringe_maxima(profile);
  require(maxima.size() >= 3, ErrorKind::insufficient_fringes,
          "fewer than 3 maxima in the profile");
  Eigen::Index top = 0;
  profile.intensity.maxCoeff(&top);
  const double y_top = profile.y[top];
  size_t centre = 0;
  for (size_t k = 1; k < maxima.size(); ++k) {
    if (std::abs(maxima[k] - y_top) < std::abs(maxima[centre] - y_top)) {
      centre = k;
    }
  }
  require(centre > 0 && centre + 1 < maxima.size(),
          ErrorKind::insufficient_fringes,
          "global maximum has no neighbouring maximum on one side");
  return 0.5 * (maxima[centre + 1] - maxima[centre - 1]);
}

int periodic_maxima_count(const std::vector<double>& maxima, double spacing,
                          double tolerance) {
  if (maxima.empty()) return 0;
  int best = 1, run = 1;
  for (size_t k = 1; k < maxima.size(); ++k) {
    const double gap = maxima[k] - maxima[k - 1];
    run = std::abs(gap - spacing) <= tolerance * spacing ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

Grid two_slit_grid(const TwoSlitConfig& c) {
  const std::array<int, 2> n{c.nx, c.ny};
  const std::array<double, 2> e{c.x_extent, c.y_extent};
  const std::array<double, 2> z{0.0, 0.0};
  return make_grid(n, e, z);
}

TwoSlitResult run_two_slit(const TwoSlitConfig& config,
                           const StepObserver& observer) {
  const Grid grid = two_slit_grid(config);
  require(config.observe_x > config.screen.screen_x, ErrorKind::configuration,
          "observation plane must lie beyond the screen");
  SampledField psi =
      initial_packet_2d(grid, config.packet_center, config.velocity,
                        config.packet_width, &config.screen);
  const SplitStepPropagator prop(grid, screen_potential(config.screen, grid),
                                 config.dt, config.absorber_width);
  PatternDetector detector(grid, config.observe_x);

  const int steps = static_cast<int>(std::lround(config.total_time / config.dt));
  if (observer) observer(0, 0.0, psi);
  for (int k = 1; k <= steps; ++k) {
    prop.step(psi);
    detector.accumulate(psi, config.dt);
    if (observer) observer(k, k * config.dt, psi);
  }
  require(is_finite(psi), ErrorKind::numerical, "wavefunction became non-finite");
  return {detector.profile(), norm_squared(psi), steps};
}

double fraunhofer_spacing(double speed, double distance, double separation) {
  require(speed > 0.0 && separation > 0.0, ErrorKind::configuration,
          "speed and separation must be positive");
  return 2.0 * kPi / speed * distance / separation;
}

}  // namespace urt
