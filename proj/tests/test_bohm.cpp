#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "urt/bohm.hpp"
#include "urt/error.hpp"

using namespace urt;

namespace {

const Grid kFree = make_grid(1, 512, 80.0);
const Grid kHarm = make_grid(1, 256, 24.0);

SampledField gaussian(const Grid& g, double sigma, double k = 0.0) {
  return sample_field(g, [&](const Eigen::Vector3d& r) {
    return std::pow(2 * std::numbers::pi * sigma * sigma, -0.25) *
           std::polar(std::exp(-r[0] * r[0] / (4 * sigma * sigma)), k * r[0]);
  });
}

SampledField plane_wave(double k) {
  const Grid g = make_grid(1, 64, 2 * std::numbers::pi);
  return sample_field(g, [&](const Eigen::Vector3d& r) { return std::polar(1.0, k * r[0]); });
}

Eigen::ArrayXd harmonic_potential() { return 0.5 * kHarm.nodes(0).square(); }

}  // namespace

TEST_CASE("Madelung decomposition") {
  const MadelungFields pw = decompose(plane_wave(3.0));
  CHECK((pw.R - 1.0).abs().maxCoeff() < 1e-14);
  const Eigen::ArrayXd x = pw.grid.nodes(0);
  const Eigen::ArrayXd d = pw.S - 3.0 * x;
  CHECK(d.maxCoeff() - d.minCoeff() < 1e-12);

  const MadelungFields g = decompose(gaussian(kFree, 1.0));
  CHECK(g.S.abs().maxCoeff() == 0.0);
  CHECK(g.components == 1);
  CHECK(g.warnings.empty());

  const SampledField psi = gaussian(kFree, 1.0, 1.5);
  const SampledField back = reconstruct(decompose(psi));
  CHECK((back.values - psi.values).abs().maxCoeff() < 1e-13);
}

TEST_CASE("disconnected support is unwrapped per component") {
  SampledField two = sample_field(kFree, [](const Eigen::Vector3d& r) {
    return std::exp(-0.5 * (r[0] - 15) * (r[0] - 15)) +
           std::exp(-0.5 * (r[0] + 15) * (r[0] + 15));
  });
  const MadelungFields f = decompose(two);
  CHECK(f.components == 2);
  CHECK_FALSE(f.warnings.empty());
}

TEST_CASE("quantum potential") {
  const SampledField ground = gaussian(kHarm, std::sqrt(0.5));
  const QuantumPotentialField q = quantum_potential(decompose(ground));
  const Eigen::ArrayXd x = kHarm.nodes(0);
  const Eigen::ArrayXd V = harmonic_potential();
  double err = 0.0;
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    if (std::abs(x[n]) > 4.0) continue;
    REQUIRE(q.valid[n]);
    err = std::max(err, std::abs(q.Q[n] - 0.5 * (1 - x[n] * x[n])));
    err = std::max(err, std::abs(V[n] + q.Q[n] - 0.5));
  }
  CHECK(err < 1e-8);
  CHECK(quantum_potential(decompose(plane_wave(2.0))).Q.abs().maxCoeff() < 1e-10);
}

TEST_CASE("guidance field") {
  const auto pw = velocity_field(decompose(plane_wave(2.0)));
  CHECK((pw[0] - 2.0).abs().maxCoeff() < 1e-10);
  const MadelungFields real = decompose(gaussian(kFree, 1.0));
  const auto v_real = velocity_field(real)[0];
  for (Eigen::Index n = 0; n < v_real.size(); ++n) {
    if (real.R[n] > 1e-4 * real.R.maxCoeff()) CHECK(std::abs(v_real[n]) < 1e-10);
  }

  const MadelungFields base = decompose(gaussian(kFree, 1.0, 0.7));
  const MadelungFields boosted = decompose(gaussian(kFree, 1.0, 1.2));
  const auto v0 = velocity_field(base)[0];
  const auto v1 = velocity_field(boosted)[0];
  for (Eigen::Index n = 0; n < v0.size(); ++n) {
    if (base.R[n] > 1e-4 * base.R.maxCoeff()) CHECK(std::abs(v1[n] - v0[n] - 0.5) < 1e-9);
  }
}

TEST_CASE("residuals sit at the dt^2 floor") {
  const Eigen::ArrayXd Vf = Eigen::ArrayXd::Zero(kFree.size());
  const Eigen::ArrayXd Vh = harmonic_potential();
  const SampledField pf = gaussian(kFree, 1.0);
  const SampledField ph = gaussian(kHarm, std::sqrt(0.5));

  auto pair = [](const SampledField& p, const Eigen::ArrayXd& V, double dt) {
    const auto s = evolve_series(p, V, dt, static_cast<int>(std::lround(0.5 / dt)) + 2);
    return std::pair{s[s.size() - 2], s.back()};
  };
  const auto [a1, b1] = pair(pf, Vf, 2e-3);
  const auto [a2, b2] = pair(pf, Vf, 1e-3);
  const double c1 = continuity_residual(a1, b1, 2e-3);
  const double c2 = continuity_residual(a2, b2, 1e-3);
  const double h1 = hj_residual(a1, b1, 2e-3, Vf);
  const double h2 = hj_residual(a2, b2, 1e-3, Vf);
  CHECK(c2 <= 1e-4);
  CHECK(c1 / c2 > 3.5);
  CHECK(c1 / c2 < 4.5);
  CHECK(h1 / h2 > 3.5);
  CHECK(h1 / h2 < 4.5);

  const auto [ha1, hb1] = pair(ph, Vh, 2e-3);
  const auto [ha2, hb2] = pair(ph, Vh, 1e-3);
  const double hh1 = hj_residual(ha1, hb1, 2e-3, Vh);
  const double hh2 = hj_residual(ha2, hb2, 1e-3, Vh);
  CHECK(hh1 / hh2 > 3.5);
  CHECK(hh1 / hh2 < 4.5);
  CHECK(continuity_residual(ha2, hb2, 1e-3) <= 1e-8);
}

TEST_CASE("negative controls") {
  const Eigen::ArrayXd Vh = harmonic_potential();
  const auto s = evolve_series(gaussian(kHarm, std::sqrt(0.5)), Vh, 1e-3, 2);
  ResidualOptions flipped;
  flipped.q_sign = -1.0;
  const QuantumPotentialField q = quantum_potential(decompose(s[1]));
  const double floor = hj_residual(s[0], s[1], 1e-3, Vh);
  const double wrong = hj_residual(s[0], s[1], 1e-3, Vh, flipped);
  double core_q = 0.0;
  const double peak = s[1].values.abs().maxCoeff();
  for (Eigen::Index n = 0; n < q.Q.size(); ++n) {
    if (std::abs(s[1].values[n]) > 1e-4 * peak) core_q = std::max(core_q, std::abs(q.Q[n]));
  }
  CHECK(wrong == doctest::Approx(2 * core_q).epsilon(1e-3));
  CHECK(wrong > 1e3 * floor);

  const Eigen::ArrayXd Vf = Eigen::ArrayXd::Zero(kFree.size());
  const auto f = evolve_series(gaussian(kFree, 1.0), Vf, 1e-3, 2);
  const SampledField other = gaussian(kFree, 1.3, 0.4);
  CHECK(continuity_residual(f[0], other, 1e-3) >
        10 * continuity_residual(f[0], f[1], 1e-3));
}

TEST_CASE("plane-wave trajectory") {
  const SampledField pw = plane_wave(2.0);
  const Eigen::ArrayXd V = Eigen::ArrayXd::Zero(pw.grid.size());
  const FlowSeries flow = make_flow(evolve_series(pw, V, 5e-3, 101), 0.0, 5e-3, V, true);
  const BohmTrajectory tr = integrate_trajectory(flow, {-2.0, 0, 0});
  CHECK_FALSE(tr.truncated);
  for (size_t k = 0; k < tr.t.size(); ++k) {
    CHECK(std::abs(tr.x[k][0] - (-2.0 + 2.0 * tr.t[k])) < 1e-8);
  }
  CHECK(newton_consistency(tr, flow).max_residual < 1e-8);
}

TEST_CASE("free Gaussian trajectories scale with the width") {
  const Eigen::ArrayXd V = Eigen::ArrayXd::Zero(kFree.size());
  const double dt = 1e-3;
  const FlowSeries flow =
      make_flow(evolve_series(gaussian(kFree, 1.0), V, dt, 1001), 0.0, dt, V, true);
  for (double x0 : {-2.5, -1.0, 0.4, 2.0}) {
    const BohmTrajectory tr = integrate_trajectory(flow, {x0, 0, 0});
    double worst = 0.0;
    for (size_t k = 0; k < tr.t.size(); ++k) {
      const double expect = x0 * std::sqrt(1 + std::pow(tr.t[k] / 2, 2));
      worst = std::max(worst, std::abs(tr.x[k][0] - expect) / std::abs(expect));
    }
    CHECK(worst <= 1e-3);
    const NewtonReport nr = newton_consistency(tr, flow);
    CHECK(nr.max_residual <= 1e-3);
    CHECK(nr.used > 0);
  }
}

TEST_CASE("ground-state trajectories are static") {
  const Eigen::ArrayXd V = harmonic_potential();
  const double dt = 1e-3;
  const FlowSeries flow = make_flow(
      evolve_series(gaussian(kHarm, std::sqrt(0.5)), V, dt, 10001), 0.0, dt, V, true);
  for (double x0 : {-2.0, 0.5, 1.5}) {
    const BohmTrajectory tr = integrate_trajectory(flow, {x0, 0, 0});
    double drift = 0.0;
    for (const auto& x : tr.x) drift = std::max(drift, std::abs(x[0] - x0));
    CHECK(drift <= 1e-6);
    CHECK(newton_consistency(tr, flow).max_residual <= 1e-5);
  }
}

TEST_CASE("sampling and KS distance") {
  const SampledField p = gaussian(kFree, 1.0);
  const auto a = sample_initial_positions(p, 5000, 9);
  CHECK(a == sample_initial_positions(p, 5000, 9));
  CHECK(a != sample_initial_positions(p, 5000, 10));
  CHECK(ks_distance(a, p) < 0.03);
  std::vector<double> shifted = a;
  for (double& x : shifted) x += 1.0;
  CHECK(ks_distance(shifted, p) > 0.3);
}

TEST_CASE("stationary state is trivially equivariant") {
  const Eigen::ArrayXd V = harmonic_potential();
  const auto s = evolve_series(gaussian(kHarm, std::sqrt(0.5)), V, 5e-3, 201);
  const FlowSeries flow = make_flow(s, 0.0, 5e-3, V);
  const auto starts = sample_initial_positions(s.front(), 10000, 4);
  const EquivarianceReport r = equivariance_check(flow, s.back(), starts, 1, 2);
  CHECK(r.ks <= 0.02);
  CHECK(r.truncated == 0);
  CHECK(r.n == 10000);
}

TEST_CASE("escaping ensemble is invalid") {
  const Grid g = make_grid(1, 128, 20.0);
  const SampledField p = gaussian(g, 1.0, 5.0);
  const Eigen::ArrayXd V = Eigen::ArrayXd::Zero(g.size());
  const FlowSeries flow = make_flow(evolve_series(p, V, 1e-2, 301), 0.0, 1e-2, V);
  try {
    equivariance_check(flow, p, sample_initial_positions(p, 200, 1));
    FAIL("expected invalid ensemble");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_ensemble);
  }
}

TEST_CASE("two-dimensional ensemble bookkeeping") {
  const Grid g = make_grid(2, 64, 32.0);
  const SampledField psi = initial_packet_2d(g, {-3, 0}, {2, 0}, 1.0);
  CrossingEnsemble a(psi, 50, 3, 0.0, 1, 1);
  CrossingEnsemble b(psi, 50, 3, 0.0, 1, 1);
  CHECK(a.starts() == b.starts());
  CHECK(a.size() == 50);
  CHECK_FALSE(a.histogram(0.5).warnings.empty());

  const Eigen::ArrayXd V = Eigen::ArrayXd::Zero(g.size());
  SplitStepPropagator prop(g, V, 1e-2);
  SampledField p = psi;
  for (int k = 0; k <= 250; ++k) {
    a.observe(k, k * 1e-2, p);
    prop.step(p);
  }
  int crossed = 0;
  for (double y : a.crossings()) crossed += !std::isnan(y);
  CHECK(crossed > 25);
  const Profile h = a.histogram(0.5);
  CHECK(h.warnings.empty());
  CHECK((h.intensity.sum() * 0.5) == doctest::Approx(1.0));
}
