#include <doctest.h>

#include <cmath>

#include "urt/error.hpp"
#include "urt/uncertainty.hpp"

using namespace urt;

namespace {

const Grid kGrid = make_grid(1, 2048, 40.0);

SampledField field(double x0, double k, bool odd = false) {
  return sample_field(kGrid, [&](const Eigen::Vector3d& r) {
    const double x = r[0] - x0;
    return std::polar((odd ? x : 1.0) * std::exp(-0.5 * x * x), k * r[0]);
  });
}

}  // namespace

TEST_CASE("centroids") {
  CHECK(std::abs(centroid_position(field(0, 0))) < 1e-12);
  CHECK(std::abs(centroid_position(field(3, 0)) - 3.0) < 1e-10);
  CHECK(std::abs(centroid_position(field(3, 2)) - 3.0) < 1e-10);
  CHECK(std::abs(centroid_momentum(field(0, 0))) < 1e-12);
  CHECK(std::abs(centroid_momentum(field(0, 2)) - 2.0) < 1e-10);
  SampledField conj = field(1, 1.5);
  conj.values = conj.values.conjugate();
  CHECK(centroid_momentum(conj) == doctest::Approx(-1.5).epsilon(1e-10));
}

TEST_CASE("variances") {
  CHECK(variance_position(field(0, 0)) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(variance_momentum(field(0, 0)) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(variance_position(field(0, 0, true)) == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(variance_momentum(field(0, 0, true)) == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("zero field is degenerate") {
  const SampledField z = make_field(kGrid);
  for (auto fn : {centroid_position, centroid_momentum, variance_position,
                  variance_momentum}) {
    try {
      fn(z);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::degenerate);
    }
  }
}

TEST_CASE("uncertainty products") {
  CHECK(std::abs(ur_product(field(0, 0)).product - 0.25) < 1e-6);
  CHECK(std::abs(ur_product(field(0, 0, true)).product - 2.25) < 1e-6);
  const MomentReport r = ur_product(field(1, 2));
  CHECK(r.x0 == doctest::Approx(1.0));
  CHECK(r.p0 == doctest::Approx(2.0));
  CHECK(r.norm_N == doctest::Approx(std::sqrt(std::numbers::pi)));
}

TEST_CASE("truncated field is rejected") {
  const Grid g = make_grid(1, 256, 10.0);
  const SampledField wide = sample_field(g, [](const Eigen::Vector3d& r) {
    return std::exp(-r[0] * r[0] / 18.0);
  });
  try {
    ur_product(wide);
    FAIL("expected truncation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::truncation);
  }
}

TEST_CASE("quadratic form") {
  const SampledField g = field(0, 0);
  CHECK(std::abs(quadratic_form(g, 1.0).value) < 1e-8);
  CHECK(quadratic_form(field(0.5, 1.0), 0.0).value ==
        doctest::Approx(variance_momentum(field(0.5, 1.0))).epsilon(1e-9));
  CHECK(cross_term(field(0.5, 1.0)) == doctest::Approx(1.0).epsilon(1e-9));

  // Exact parabola: A alpha^2 - B alpha + C.
  const SampledField f = random_smooth_field(kGrid, 11);
  const double A = variance_position(f), C = variance_momentum(f);
  const double B = cross_term(f);
  for (double a : {-5.0, -1.0, 0.3, 2.0, 5.0}) {
    const double q = quadratic_form(f, a).value;
    CHECK(q == doctest::Approx(A * a * a - B * a + C).epsilon(1e-9));
    CHECK(q >= -1e-10);
  }
}

TEST_CASE("random fields are seeded and satisfy the bound") {
  const SampledField a = random_smooth_field(kGrid, 5);
  const SampledField b = random_smooth_field(kGrid, 5);
  CHECK((a.values - b.values).abs().maxCoeff() == 0.0);
  CHECK((a.values - random_smooth_field(kGrid, 6).values).abs().maxCoeff() > 0.0);
  for (std::uint64_t s = 0; s < 20; ++s) {
    CHECK(ur_product(random_smooth_field(kGrid, s)).product >= 0.25 - 1e-9);
  }
  CHECK_THROWS_AS(random_smooth_field(make_grid(2, 16, 10.0), 1), Error);
}
