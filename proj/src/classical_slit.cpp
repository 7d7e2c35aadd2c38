#include "urt/classical_slit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "urt/error.hpp"

namespace urt {
namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, ErrorKind kind, const std::string& message) {
  if (!ok) throw Error("classical_slit", kind, message);
}

constexpr std::array<double, 8> kGaussX{
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussW{
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

// Second antiderivative of ln|u|.
double K(double u) {
  if (u == 0.0) return 0.0;
  return 0.5 * u * u * std::log(std::abs(u)) - 0.75 * u * u;
}

// Antiderivative in u of (1/2) ln(u^2 + c^2).
double F(double u, double c) {
  const double log_term = (u == 0.0) ? 0.0 : 0.5 * u * std::log(u * u + c * c);
  const double atan_term = (c == 0.0) ? 0.0 : c * std::atan(u / c);
  return log_term - u + atan_term;
}

bool near(const Panels& p, Eigen::Index j, const Eigen::Vector2d& r) {
  return std::hypot(r.x(), r.y() - p.mid[j]) <= 2.0 * p.len[j];
}

bool on_panel(const Panels& p, Eigen::Index j, const Eigen::Vector2d& r) {
  return r.x() == 0.0 && r.y() >= p.a[j] && r.y() <= p.b[j];
}

}  // namespace

ScreenGeometry2D two_slit_geometry(double outer_extent, double separation,
                                   double width, Shutter shutter) {
  require(separation > width && width > 0.0, ErrorKind::configuration,
          "slits must have positive width and not overlap");
  const double lo_in = -0.5 * separation + 0.5 * width;
  const double lo_out = -0.5 * separation - 0.5 * width;
  const double hi_in = 0.5 * separation - 0.5 * width;
  const double hi_out = 0.5 * separation + 0.5 * width;
  require(outer_extent > hi_out, ErrorKind::configuration,
          "outer extent must enclose both slits");
  ScreenGeometry2D g;
  g.outer_extent = outer_extent;
  g.segments.push_back({-outer_extent, lo_out});
  if (shutter == Shutter::lower) g.segments.push_back({lo_out, lo_in});
  g.segments.push_back({lo_in, hi_in});
  if (shutter == Shutter::upper) g.segments.push_back({hi_in, hi_out});
  g.segments.push_back({hi_out, outer_extent});
  return g;
}

PanelSet build_panels(const ScreenGeometry2D& geometry, int n_per_segment) {
  require(n_per_segment >= 16, ErrorKind::configuration,
          "at least 16 panels per segment are required");
  require(!geometry.segments.empty(), ErrorKind::configuration,
          "geometry has no segments");
  for (size_t s = 0; s < geometry.segments.size(); ++s) {
    const Segment& seg = geometry.segments[s];
    require(std::isfinite(seg.y0) && std::isfinite(seg.y1) && seg.y1 > seg.y0,
            ErrorKind::configuration, "degenerate segment");
    require(s == 0 || seg.y0 >= geometry.segments[s - 1].y1,
            ErrorKind::configuration, "segments must be sorted and disjoint");
  }

  auto p = std::make_shared<Panels>();
  p->geometry = geometry;
  const auto n_seg = static_cast<Eigen::Index>(geometry.segments.size());
  const Eigen::Index N = n_seg * n_per_segment;
  p->a.resize(N);
  p->b.resize(N);
  for (Eigen::Index s = 0; s < n_seg; ++s) {
    const Segment& seg = geometry.segments[s];
    const double mid = 0.5 * (seg.y0 + seg.y1);
    const double half = 0.5 * (seg.y1 - seg.y0);
    auto edge = [&](int k) {
      if (k == 0) return seg.y0;
      if (k == n_per_segment) return seg.y1;
      return mid - half * std::cos(kPi * k / n_per_segment);
    };
    for (int k = 0; k < n_per_segment; ++k) {
      p->a[s * n_per_segment + k] = edge(k);
      p->b[s * n_per_segment + k] = edge(k + 1);
      p->segment.push_back(static_cast<int>(s));
    }
  }
  p->mid = 0.5 * (p->a + p->b);
  p->len = p->b - p->a;
  p->gauss_y.resize(N, 8);
  p->gauss_w.resize(N, 8);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (int g = 0; g < 8; ++g) {
      p->gauss_y(j, g) = p->mid[j] + 0.5 * p->len[j] * kGaussX[g];
      p->gauss_w(j, g) = 0.5 * p->len[j] * kGaussW[g];
    }
  }

  // Exact double integral for near pairs, 8x8 Gauss for far pairs.
  p->matrix.resize(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = i; j < N; ++j) {
      double I = 0.0;
      if (std::abs(p->mid[i] - p->mid[j]) > 2.0 * (p->len[i] + p->len[j])) {
        for (int g = 0; g < 8; ++g) {
          for (int h = 0; h < 8; ++h) {
            I += p->gauss_w(i, g) * p->gauss_w(j, h) *
                 std::log(std::abs(p->gauss_y(i, g) - p->gauss_y(j, h)));
          }
        }
      } else {
        I = K(p->b[i] - p->a[j]) - K(p->a[i] - p->a[j]) -
            K(p->b[i] - p->b[j]) + K(p->a[i] - p->b[j]);
      }
      p->matrix(i, j) = p->matrix(j, i) = -2.0 * I;
    }
  }
  p->lu.compute(p->matrix);

  PanelSet set;
  set.density = Eigen::VectorXd::Zero(N);
  set.panels = std::move(p);
  return set;
}

double conductor_distance(const ScreenGeometry2D& geometry,
                          const Eigen::Vector2d& point) {
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : geometry.segments) {
    const double y = std::clamp(point.y(), s.y0, s.y1);
    best = std::min(best, std::hypot(point.x(), point.y() - y));
  }
  return best;
}

double nearest_panel_length(const PanelSet& set, const Eigen::Vector2d& point) {
  const Panels& p = *set.panels;
  double best_d = std::numeric_limits<double>::infinity();
  double best_l = 0.0;
  for (Eigen::Index j = 0; j < p.mid.size(); ++j) {
    const double y = std::clamp(point.y(), p.a[j], p.b[j]);
    const double d = std::hypot(point.x(), point.y() - y);
    if (d < best_d) {
      best_d = d;
      best_l = p.len[j];
    }
  }
  return best_l;
}

Eigen::VectorXd panel_potentials(const Panels& p, const Eigen::Vector2d& r) {
  const Eigen::Index N = p.mid.size();
  Eigen::VectorXd out(N);
  const double x = r.x();
  for (Eigen::Index j = 0; j < N; ++j) {
    if (near(p, j, r)) {
      out[j] = -2.0 * (F(p.b[j] - r.y(), x) - F(p.a[j] - r.y(), x));
    } else {
      double s = 0.0;
      for (int g = 0; g < 8; ++g) {
        const double dy = r.y() - p.gauss_y(j, g);
        s += p.gauss_w(j, g) * std::log(x * x + dy * dy);
      }
      out[j] = -s;
    }
  }
  return out;
}

PanelSet solve_induced_density(const PanelSet& set, const ChargeState& charge) {
  require(std::isfinite(charge.q), ErrorKind::configuration,
          "charge must be finite");
  const double d = conductor_distance(set.panels->geometry, charge.position);
  require(d > nearest_panel_length(set, charge.position), ErrorKind::proximity,
          "charge within one panel length of the conductor");
  PanelSet out = set;
  out.density =
      set.panels->lu.solve(-charge.q * panel_potentials(*set.panels, charge.position));
  return out;
}

double induced_potential_at(const PanelSet& set, const Eigen::Vector2d& point) {
  return set.density.dot(panel_potentials(*set.panels, point));
}

Eigen::Vector2d induced_field_at(const PanelSet& set,
                                 const Eigen::Vector2d& point) {
  const Panels& p = *set.panels;
  const double x = point.x();
  Eigen::Vector2d E = Eigen::Vector2d::Zero();
  for (Eigen::Index j = 0; j < p.mid.size(); ++j) {
    require(!on_panel(p, j, point), ErrorKind::singular,
            "field evaluated on a conductor panel");
    const double lam = set.density[j];
    if (near(p, j, point)) {
      const double ya = point.y() - p.a[j];
      const double yb = point.y() - p.b[j];
      E.x() += 2.0 * lam * std::atan2((p.b[j] - p.a[j]) * x, x * x + ya * yb);
      E.y() += lam * std::log((x * x + ya * ya) / (x * x + yb * yb));
    } else {
      for (int g = 0; g < 8; ++g) {
        const double dy = point.y() - p.gauss_y(j, g);
        const double w = 2.0 * lam * p.gauss_w(j, g) / (x * x + dy * dy);
        E.x() += w * x;
        E.y() += w * dy;
      }
    }
  }
  return E;
}

double total_induced_charge(const PanelSet& set) {
  return set.density.dot(set.panels->len);
}

double boundary_potential(const PanelSet& set, const ChargeState& charge,
                          double y) {
  const Eigen::Vector2d on_line(0.0, y);
  const double bare =
      -2.0 * charge.q * std::log((charge.position - on_line).norm());
  return induced_potential_at(set, on_line) + bare;
}

double galerkin_residual(const PanelSet& set, const ChargeState& charge) {
  const Eigen::VectorXd b =
      -charge.q * panel_potentials(*set.panels, charge.position);
  const Eigen::VectorXd r = set.panels->matrix * set.density - b;
  return r.cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

double energy(const PanelSet& solved, const ChargeState& c) {
  return 0.5 * c.m * c.velocity.squaredNorm() +
         0.5 * c.q * induced_potential_at(solved, c.position);
}

TrajectoryResult advance_trajectory(
    const PanelSet& panels, const ChargeState& initial,
    const StepControl& control, int n_steps,
    const std::function<bool(const ChargeState&)>& stop) {
  require(initial.m > 0.0, ErrorKind::configuration, "mass must be positive");
  require(control.dt > 0.0 && control.near_fraction > 0.0,
          ErrorKind::configuration, "step control must be positive");
  const ScreenGeometry2D& geometry = panels.panels->geometry;

  TrajectoryResult out;
  ChargeState c = initial;
  auto collided = [&](const ChargeState& s) {
    return conductor_distance(geometry, s.position) <=
           nearest_panel_length(panels, s.position);
  };
  require(!collided(c), ErrorKind::proximity,
          "initial position is on or next to the conductor");

  PanelSet solved = solve_induced_density(panels, c);
  Eigen::Vector2d force = c.q * induced_field_at(solved, c.position);
  const double e0 = energy(solved, c);
  double max_kinetic = 0.5 * c.m * c.velocity.squaredNorm();
  double max_dev = 0.0;
  out.states.push_back(c);
  out.energy.push_back(e0);

  for (int step = 0; step < n_steps; ++step) {
    if (stop && stop(c)) break;
    const double d = conductor_distance(geometry, c.position);
    const double speed = c.velocity.norm();
    int levels = 0;
    while (levels < 30 && speed * std::ldexp(control.dt, -levels) >
                              control.near_fraction * d) {
      ++levels;
    }
    const int sub = 1 << levels;
    const double h = std::ldexp(control.dt, -levels);
    for (int s = 0; s < sub; ++s) {
      c.velocity += 0.5 * h * force / c.m;
      c.position += h * c.velocity;
      if (collided(c)) {
        out.collided = true;
        break;
      }
      solved = solve_induced_density(panels, c);
      force = c.q * induced_field_at(solved, c.position);
      c.velocity += 0.5 * h * force / c.m;
    }
    if (out.collided) break;
    c.t = initial.t + (step + 1) * control.dt;
    const double e = energy(solved, c);
    max_kinetic = std::max(max_kinetic, 0.5 * c.m * c.velocity.squaredNorm());
    max_dev = std::max(max_dev, std::abs(e - e0));
    out.states.push_back(c);
    out.energy.push_back(e);
  }
  out.energy_drift = max_dev / std::max(std::abs(e0), max_kinetic);
  return out;
}

ExitResult deflection_run(const ScreenGeometry2D& geometry, int n_panels,
                          const ChargeState& initial,
                          const StepControl& control, double exit_x,
                          double max_time) {
  const PanelSet panels = build_panels(geometry, n_panels);
  const int steps = static_cast<int>(std::ceil(max_time / control.dt));
  ExitResult r;
  r.trajectory = advance_trajectory(
      panels, initial, control, steps,
      [exit_x](const ChargeState& s) { return s.position.x() >= exit_x; });
  const ChargeState& last = r.trajectory.states.back();
  r.transmitted = !r.trajectory.collided && last.position.x() >= exit_x;
  r.angle = std::atan2(last.velocity.y(), last.velocity.x());
  return r;
}

DeflectionResult deflection_experiment(const DeflectionConfig& config) {
  const Shutter other = config.initial.position.y() >= 0.0 ? Shutter::lower
                                                           : Shutter::upper;
  DeflectionResult r;
  r.open = deflection_run(
      two_slit_geometry(config.outer_extent, config.separation,
                        config.slit_width, Shutter::none),
      config.panels, config.initial, config.step, config.exit_x,
      config.max_time);
  r.closed = deflection_run(
      two_slit_geometry(config.outer_extent, config.separation,
                        config.slit_width, other),
      config.panels, config.initial, config.step, config.exit_x,
      config.max_time);
  r.delta = r.open.angle - r.closed.angle;
  return r;
}

double quantization_length(double momentum) {
  require(std::isfinite(momentum) && momentum > 0.0, ErrorKind::configuration,
          "momentum must be positive");
  return 2.0 * kPi / momentum;
}

}  // namespace urt
