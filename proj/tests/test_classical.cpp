#include <doctest.h>

#include <cmath>
#include <numbers>

#include "urt/classical_slit.hpp"
#include "urt/error.hpp"

using namespace urt;

namespace {

ScreenGeometry2D plane(double half) {
  ScreenGeometry2D g;
  g.segments = {{-half, 0.0}, {0.0, half}};
  g.outer_extent = half;
  return g;
}

ChargeState at(double x, double y, double vx = 0.0, double vy = 0.0) {
  ChargeState c;
  c.position = {x, y};
  c.velocity = {vx, vy};
  return c;
}

}  // namespace

TEST_CASE("panel grading") {
  ScreenGeometry2D g;
  g.segments = {{-3.0, 5.0}};
  const PanelSet p = build_panels(g, 16);
  REQUIRE(p.panels->len.size() == 16);
  CHECK(p.panels->len.sum() == doctest::Approx(8.0));
  CHECK(p.panels->len[0] < p.panels->len[8]);
  CHECK(p.panels->len[15] < p.panels->len[8]);
  CHECK(p.panels->len[0] == doctest::Approx(p.panels->len[15]));

  const PanelSet two = build_panels(two_slit_geometry(20, 4, 1, Shutter::none), 16);
  CHECK(two.panels->len.size() == 16 * 3);

  // Refinement nests: every coarse breakpoint is a fine breakpoint.
  const PanelSet fine = build_panels(g, 32);
  for (int i = 0; i < 16; ++i) {
    CHECK(fine.panels->a[2 * i] == doctest::Approx(p.panels->a[i]));
  }

  ScreenGeometry2D bad;
  bad.segments = {{1.0, 1.0}};
  CHECK_THROWS_AS(build_panels(bad, 16), Error);
  CHECK_THROWS_AS(build_panels(g, 8), Error);
}

TEST_CASE("two-slit geometry and shutters") {
  const ScreenGeometry2D open = two_slit_geometry(20, 4, 1, Shutter::none);
  REQUIRE(open.segments.size() == 3);
  CHECK(open.segments[0].y0 == -20.0);
  CHECK(open.segments[0].y1 == -2.5);
  CHECK(open.segments[1].y0 == -1.5);
  CHECK(open.segments[1].y1 == 1.5);
  CHECK(open.segments[2].y0 == 2.5);
  CHECK(two_slit_geometry(20, 4, 1, Shutter::upper).segments.size() == 4);
  CHECK(conductor_distance(open, {0.0, 2.0}) == doctest::Approx(0.5));
  CHECK(conductor_distance(open, {-3.0, 0.0}) == doctest::Approx(3.0));
}

TEST_CASE("image charge on a long plane") {
  const PanelSet p = build_panels(plane(50.0), 512);
  const ChargeState c = at(1.0, 0.0);
  const PanelSet s = solve_induced_density(p, c);
  CHECK(total_induced_charge(s) == doctest::Approx(-1.0).epsilon(0.01));
  const Eigen::Vector2d E = induced_field_at(s, c.position);
  CHECK(E.x() == doctest::Approx(-1.0).epsilon(0.01));
  CHECK(std::abs(E.y()) < 1e-10);
  CHECK(galerkin_residual(s, c) < 1e-10);
}

TEST_CASE("symmetric solutions") {
  const PanelSet p = build_panels(two_slit_geometry(20, 4, 1, Shutter::none), 64);
  const ChargeState c = at(-3.0, 0.0);
  const PanelSet s = solve_induced_density(p, c);
  const Eigen::VectorXd& d = s.density;
  const Eigen::Index n = d.size();
  double asym = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) asym = std::max(asym, std::abs(d[i] - d[n - 1 - i]));
  CHECK(asym <= 1e-10 * d.cwiseAbs().maxCoeff());
  const Eigen::Vector2d E = induced_field_at(s, c.position);
  CHECK(std::abs(E.y()) <= 1e-10 * std::abs(E.x()));

  ChargeState neutral = c;
  neutral.q = 0.0;
  CHECK(solve_induced_density(p, neutral).density.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boundary condition converges with refinement") {
  const ChargeState c = at(-1.0, 0.3);
  double previous = 0.0;
  for (int n : {32, 64, 128}) {
    const PanelSet s = solve_induced_density(build_panels(plane(10.0), n), c);
    double worst = 0.0;
    for (double y : {-5.0, -1.0, -0.2, 0.3, 0.9, 4.0}) {
      worst = std::max(worst, std::abs(boundary_potential(s, c, y)));
    }
    if (previous > 0.0) CHECK(worst < 0.5 * previous);
    previous = worst;
  }
}

TEST_CASE("evaluation errors") {
  const PanelSet p = build_panels(plane(10.0), 64);
  try {
    solve_induced_density(p, at(1e-3, 0.0));
    FAIL("expected proximity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::proximity);
  }
  const PanelSet s = solve_induced_density(p, at(1.0, 0.0));
  try {
    induced_field_at(s, {0.0, 0.37});
    FAIL("expected singular evaluation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular);
  }
}

TEST_CASE("distant charge moves in a straight line") {
  const PanelSet p = build_panels(plane(1.0), 32);
  const ChargeState c = at(-1e6, 0.0, 1.0, 0.5);
  const TrajectoryResult tr = advance_trajectory(p, c, {0.01, 0.004}, 100);
  const ChargeState& end = tr.states.back();
  CHECK(std::abs(end.position.x() - (-1e6 + end.t)) < 1e-8 * 1e6);
  CHECK(std::abs(end.position.y() - 0.5 * end.t) < 1e-8);
}

TEST_CASE("charge on the axis stays on the axis") {
  const PanelSet p = build_panels(two_slit_geometry(20, 4, 1, Shutter::none), 64);
  const TrajectoryResult tr = advance_trajectory(p, at(-10.0, 0.0, 2.0, 0.0), {0.02, 0.004}, 400);
  double worst = 0.0;
  for (const auto& s : tr.states) worst = std::max(worst, std::abs(s.position.y()));
  CHECK(worst <= 1e-10);
  CHECK(tr.collided);
}

TEST_CASE("mirror-image deflection") {
  DeflectionConfig upper;
  upper.panels = 64;
  DeflectionConfig lower = upper;
  lower.initial.position.y() = -upper.initial.position.y();
  const DeflectionResult a = deflection_experiment(upper);
  const DeflectionResult b = deflection_experiment(lower);
  CHECK(a.open.transmitted);
  CHECK(a.closed.transmitted);
  CHECK(b.delta == doctest::Approx(-a.delta).epsilon(1e-6));
  CHECK(std::abs(a.open.trajectory.energy_drift) <= 1e-6);
}

TEST_CASE("shutter effect fades with separation") {
  auto delta = [](double separation) {
    DeflectionConfig c;
    c.panels = 64;
    c.separation = separation;
    c.outer_extent = 20.0 + separation;
    c.initial.position = {-20.0, 0.5 * separation};
    return std::abs(deflection_experiment(c).delta);
  };
  const double near = delta(4.0);
  const double far = delta(16.0);
  CHECK(far < 0.5 * near);
}

TEST_CASE("quantization length") {
  CHECK(quantization_length(1.0) == doctest::Approx(2 * std::numbers::pi));
  CHECK(quantization_length(2 * std::numbers::pi) == doctest::Approx(1.0));
  CHECK_THROWS_AS(quantization_length(0.0), Error);
  CHECK_THROWS_AS(quantization_length(-1.0), Error);
}
