#include <doctest.h>

#include <cmath>
#include <numbers>

#include "urt/debroglie.hpp"
#include "urt/error.hpp"

using namespace urt;

TEST_CASE("dispersion relation") {
  CHECK(make_packet(1.0, {1, 0, 0}).omega == doctest::Approx(1.0));
  CHECK(make_packet(2.0, {0, 0, 0}).omega == doctest::Approx(2.0));
  CHECK(make_packet(1.0, {3, 4, 0}).omega == doctest::Approx(13.0));
  CHECK_THROWS_AS(make_packet(0.0, {1, 0, 0}), Error);
  CHECK_THROWS_AS(make_packet(-1.0, {1, 0, 0}), Error);
}

TEST_CASE("packet values") {
  const PacketParams p = make_packet(1.0, {1, 0, 0});
  CHECK(std::abs(evaluate_packet(p, {0.7, 0, 0}, 0.7)) == doctest::Approx(1.0));
  CHECK(std::abs(evaluate_packet(p, {0.7 + std::numbers::pi, 0, 0}, 0.7)) < 1e-15);
  const auto at_origin = evaluate_packet(p, {0, 0, 0}, 0.0);
  CHECK(at_origin.real() == 1.0);
  CHECK(at_origin.imag() == 0.0);
  CHECK(spherical_j0(0.0) == 1.0);
  CHECK(spherical_j0(1e-9) == doctest::Approx(1.0));
}

TEST_CASE("residual of the exact packet") {
  const PacketParams p = make_packet(1.0, {1, 0, 0});
  const Grid g = packet_grid(p);
  const double r1 = schrodinger_residual(p, g, 0.0, 1e-4);
  const double r2 = schrodinger_residual(p, g, 0.0, 5e-5);
  CHECK(r1 <= 1e-4);
  CHECK(r1 / r2 > 3.5);
  CHECK(r1 / r2 < 4.5);

  PacketParams wrong = p;
  wrong.omega = 0.5;
  const double rw = schrodinger_residual(wrong, g, 0.0, 1e-4);
  CHECK(rw > 0.4);
  CHECK(rw < 0.6);

  const PacketParams still = make_packet(1.0, {0, 0, 0});
  CHECK(schrodinger_residual(still, packet_grid(still), 0.0, 1e-4) <= 1e-4);
}

TEST_CASE("coarse grid is a resolution error") {
  const PacketParams p = make_packet(1.0, {1, 0, 0});
  try {
    schrodinger_residual(p, make_grid(3, 16, 40.0), 0.0, 1e-4);
    FAIL("expected resolution error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resolution);
  }
}

TEST_CASE("peak positions") {
  const PacketParams p = make_packet(1.0, {1, 0.5, 0});
  const Grid g = make_grid(3, 32, 12.0);
  const double h = g.spacing(0);
  CHECK(peak_position(sample_packet(p, g, 0.0)).norm() < 0.05 * h);
  const Eigen::Vector3d r = peak_position(sample_packet(p, g, 1.3));
  CHECK((r - 1.3 * p.v).norm() < 0.05 * h);

  const Grid shifted = make_grid(3, 32, 12.0, 1.0);
  SampledField f = sample_field(shifted, [&](const Eigen::Vector3d& x) {
    return evaluate_packet(p, x - Eigen::Vector3d::Constant(1.0), 0.0);
  });
  CHECK((peak_position(f) - Eigen::Vector3d::Constant(1.0)).norm() < 0.05 * h);

  const double x0 = g.node(0, 0);
  const SampledField edge = sample_field(g, [&](const Eigen::Vector3d& x) {
    return std::exp(-(x - Eigen::Vector3d(x0, 0, 0)).squaredNorm());
  });
  try {
    peak_position(edge);
    FAIL("expected untracked peak");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::untracked_peak);
  }
}

TEST_CASE("stationary packet stays at the origin") {
  const PacketParams p = make_packet(1.0, {0, 0, 0});
  const auto tr = peak_trajectory(p, {0.0, 0.5, 1.0});
  for (const auto& [t, r] : tr) CHECK(r.norm() < 1e-9);
  CHECK(fitted_velocity(tr).norm() < 1e-9);
}
