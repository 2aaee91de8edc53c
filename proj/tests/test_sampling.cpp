#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sphcov/montecarlo.hpp"
#include "sphcov/random.hpp"
#include "sphcov/sphere.hpp"
#include "test_support.hpp"

using namespace sphcov;
using sphcov::testing::poly;
using sphcov::testing::random_polynomial;

namespace {

Moments coordinate_moments(int n, std::size_t count, std::uint64_t seed, Execution exec) {
  return monte_carlo(
      count, seed, static_cast<std::size_t>(n),
      [n](Rng& rng, std::span<double> out) {
        std::vector<double> x(static_cast<std::size_t>(n));
        draw_sphere(rng, x);
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] * x[0];
      },
      exec);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("serial and parallel runs are bitwise identical") {
  const Moments a = coordinate_moments(5, 50'000, 11, Execution::serial);
  const Moments b = coordinate_moments(5, 50'000, 11, Execution::parallel);
  CHECK(a.count() == b.count());
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(same_bits(a.mean(i), b.mean(i)));
    CHECK(same_bits(a.variance(i), b.variance(i)));
  }
  const auto ps = sample_sphere(4, 10'000, 3, Execution::serial);
  const auto pp = sample_sphere(4, 10'000, 3, Execution::parallel);
  for (std::size_t i = 0; i < ps.size(); ++i) CHECK(ps[i].coords() == pp[i].coords());
}

TEST_CASE("a sample depends only on seed and index") {
  const auto shorter = sample_sphere(3, 5000, 9);
  const auto longer = sample_sphere(3, 20'000, 9);
  for (std::size_t i = 0; i < shorter.size(); ++i) CHECK(shorter[i].coords() == longer[i].coords());
  CHECK(split_seed(1, 0) != split_seed(1, 1));
  CHECK(split_seed(1, 0) != split_seed(2, 0));
}

TEST_CASE("merged moments equal a single pass") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> nd;
  Moments all(2), left(2), right(2);
  for (int i = 0; i < 1000; ++i) {
    const double v[2] = {nd(g), nd(g)};
    all.add(v);
    (i < 377 ? left : right).add(v);
  }
  left.merge(right);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(left.mean(i) == doctest::Approx(all.mean(i)).epsilon(1e-12));
    CHECK(left.covariance(i, 1) == doctest::Approx(all.covariance(i, 1)).epsilon(1e-12));
  }
  const double w[2] = {1.0, -1.0};
  const double var = all.variance(0) + all.variance(1) - 2.0 * all.covariance(0, 1);
  CHECK(all.combined_standard_error(w) == doctest::Approx(std::sqrt(var / 1000.0)));
}

TEST_CASE("uniform points have the right second moments") {
  for (int n : {2, 3, 6}) {
    const Moments m = coordinate_moments(n, 200'000, 21, Execution::parallel);
    CHECK(std::abs(m.mean(0) - 1.0 / n) < 4.0 * m.standard_error(0));
    for (std::size_t i = 1; i < static_cast<std::size_t>(n); ++i) {
      CHECK(std::abs(m.mean(i)) < 4.0 * m.standard_error(i) + 1e-12);
    }
  }
  for (const auto& p : sample_sphere(7, 1000, 1)) CHECK(dot(p.coords(), p.coords()) == doctest::Approx(1.0));
}

TEST_CASE("sphere points reject bad input") {
  CHECK_THROWS(SpherePoint({0.0, 0.0}));
  CHECK_THROWS(SpherePoint({std::nan(""), 1.0}));
  const SpherePoint p({3.0, 4.0});
  CHECK(p[0] == doctest::Approx(0.6));
}

TEST_CASE("tangential derivatives") {
  const auto pts = sample_sphere(5, 20, 4);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Polynomial f = random_polynomial(5, 3, s);
    for (const auto& p : pts) {
      const TangentTensor g = spherical_gradient(f, p);
      CHECK(std::abs(dot(g.values, p.coords())) < 1e-12);
      const TangentTensor h = spherical_hessian(f, p);
      CHECK(h.trace() == doctest::Approx(spherical_laplacian(f, p)).epsilon(1e-10));
      for (int i = 0; i < 5; ++i) {
        for (int k = 0; k < 5; ++k) CHECK(h(i, k) == doctest::Approx(h(k, i)).epsilon(1e-12));
      }
    }
  }
  // A degree-d harmonic is an eigenfunction with eigenvalue -d(n + d - 2).
  const Polynomial f = poly("x1*x2*x3", 4);
  for (const auto& p : sample_sphere(4, 10, 8)) {
    CHECK(spherical_laplacian(f, p) == doctest::Approx(-3.0 * 5.0 * f(p.coords())).epsilon(1e-10));
  }
}

TEST_CASE("inner product density integrates to one") {
  for (int n : {3, 4, 5, 10}) {
    const double mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [n](double a) { return inner_product_density(n, a); }, -1.0, 1.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  }
  // On S^2 the inner product is uniform on [-1, 1].
  CHECK(inner_product_density(3, 0.37) == doctest::Approx(0.5));
}

}  // TEST_SUITE
