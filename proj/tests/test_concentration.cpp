#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "sphcov/concentration.hpp"
#include "sphcov/errors.hpp"
#include "sphcov/montecarlo.hpp"
#include "sphcov/sphere.hpp"
#include "test_support.hpp"

using namespace sphcov;
using sphcov::testing::poly;

TEST_SUITE("concentration") {

TEST_CASE("exact coordinate tail") {
  // On S^2 the coordinate is uniform on [-1, 1].
  for (double r : {0.1, 0.5, 0.9}) CHECK(exact_coordinate_tail(3, r) == doctest::Approx(1.0 - r));
  // On S^1 it is arcsine distributed.
  CHECK(exact_coordinate_tail(2, 0.5) == doctest::Approx(1.0 - 2.0 * std::asin(0.5) / M_PI));
  CHECK(exact_coordinate_tail(10, 0.0) == 1.0);
  CHECK(exact_coordinate_tail(10, 1.0) == 0.0);
}

TEST_CASE("bounds") {
  CHECK(levy_bound(10, 0.0) == doctest::Approx(2.0));
  CHECK(mixing_bound(10, 0.0, 0.3) == std::numeric_limits<double>::infinity());
  CHECK(mixing_bound(10, 0.5, 0.3) == doctest::Approx(0.6 * std::exp(-1.0)));
}

TEST_CASE("wilson interval") {
  const Interval w = wilson_interval(30, 1000, 1.96);
  CHECK(w.lo < 0.03);
  CHECK(w.hi > 0.03);
  const Interval z = wilson_interval(0, 1000, 4.0);
  CHECK(z.lo == 0.0);
  CHECK(z.hi > 0.0);
  CHECK(wilson_interval(1000, 1000, 4.0).hi == doctest::Approx(1.0));
}

TEST_CASE("lipschitz estimate and scope") {
  CHECK(lipschitz_estimate(poly("x1", 5)) <= 1.0 + 1e-12);
  CHECK(lipschitz_estimate(poly("x1", 5)) > 0.99);
  CHECK_THROWS_AS(lipschitz_estimate(poly("x1", 5), 10), InputError);
  const std::vector<double> grid = {0.2};
  CHECK_THROWS_AS(deviation_experiment(poly("2*x1", 5), grid, 10'000, 1), InputError);
  CHECK_THROWS_AS(deviation_experiment(poly("x1", 2), grid, 10'000, 1), ScopeError);
}

TEST_CASE("deviation experiment on a small run") {
  const std::vector<double> grid = {0.1, 0.3, 0.6};
  const auto ex = deviation_experiment(poly("x1", 10), grid, 100'000, 4);
  CHECK(ex.pass);
  for (const auto& row : ex.rows) {
    CHECK(row.exact >= 0.0);
    CHECK(std::abs(row.empirical - row.exact) < 4.0 * std::sqrt(row.exact * (1 - row.exact) / 1e5) + 1e-5);
  }
  CHECK(ex.to_csv().rfind("n,r,empirical,bound17,bound18,pass\n", 0) == 0);
  const auto serial = deviation_experiment(poly("x1", 10), grid, 100'000, 4, Execution::serial);
  CHECK(serial.mean_abs_dev == ex.mean_abs_dev);
}

TEST_CASE("hessian energy against Monte Carlo") {
  CHECK(hessian_energy(poly("x1*x2", 6)) == doctest::Approx(2.0));
  // A linear function has f''_S = -<v, theta> P, so the energy is (n - 1)/n |v|^2.
  CHECK(hessian_energy(poly("x1 + 3", 6)) == doctest::Approx(5.0 / 6.0));
  const Polynomial f = poly("x1*x2*x3 + x1^2 - x2^2", 5);
  const Moments m = monte_carlo(200'000, 9, 1, [&](Rng& rng, std::span<double> out) {
    std::vector<double> x(5);
    draw_sphere(rng, x);
    const TangentTensor h = spherical_hessian(f, SpherePoint(x));
    out[0] = h.norm() * h.norm();
  });
  CHECK(std::abs(m.mean(0) - hessian_energy(f)) < 4.0 * m.standard_error(0));
}

TEST_CASE("exponential moments") {
  CHECK_THROWS_AS(exp_moment_check(poly("x1^2", 5), 1, 10'000, 1), InputError);
  const auto first = exp_moment_check(poly("x1*x2", 5), 1, 100'000, 1);
  CHECK(first.reports.at(0).pass);
  const auto second = exp_moment_check(poly("0.5*x1*x2", 8), 2, 100'000, 1);
  CHECK(second.hypotheses.operator_norm_ok);
  CHECK(second.hypotheses.b == doctest::Approx(0.5));
  for (const auto& r : second.reports) CHECK_MESSAGE(r.pass, r.identity_id);
  CHECK_THROWS_AS(exp_moment_check(poly("x1*x2", 4), 2, 10'000, 1), ScopeError);
}

}  // TEST_SUITE
