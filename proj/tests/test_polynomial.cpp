#include <doctest.h>

#include <cmath>
#include <vector>

#include "sphcov/errors.hpp"
#include "sphcov/polynomial.hpp"
#include "test_support.hpp"

using namespace sphcov;
using sphcov::testing::poly;
using sphcov::testing::random_polynomial;

TEST_SUITE("polynomial") {

TEST_CASE("parse and print round trip") {
  const Polynomial p = poly("3*x1^2*x2 - 0.5*x3 + 2", 3);
  CHECK(Polynomial::parse(p.to_string(), 3) == p);
  CHECK(p.degree() == 3);
  CHECK(p.coefficient({2, 1, 0}) == doctest::Approx(3.0));
  CHECK(p.coefficient({0, 0, 0}) == doctest::Approx(2.0));
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(Polynomial::parse("x1 +", 2), InputError);
  CHECK_THROWS_AS(Polynomial::parse("x3", 2), InputError);
  CHECK_THROWS_AS(Polynomial::parse("x1^-1", 2), InputError);
}

TEST_CASE("derivatives and laplacian") {
  const Polynomial p = poly("x1^3*x2 + x2^2", 2);
  CHECK(p.derivative(0) == poly("3*x1^2*x2", 2));
  CHECK(p.derivative(1) == poly("x1^3 + 2*x2", 2));
  CHECK(p.laplacian() == poly("6*x1*x2 + 2", 2));
  for (int n = 1; n <= 6; ++n) {
    CHECK(Polynomial::norm_squared(n).laplacian() == Polynomial::constant(n, 2.0 * n));
  }
}

TEST_CASE("sphere and gaussian moments") {
  for (int n = 2; n <= 7; ++n) {
    CHECK(sphere_mean(poly("x1^2", n)) == doctest::Approx(1.0 / n));
    CHECK(sphere_mean(poly("x1^4", n)) == doctest::Approx(3.0 / (n * (n + 2.0))));
    CHECK(sphere_mean(poly("x1^2*x2^2", n)) == doctest::Approx(1.0 / (n * (n + 2.0))));
    CHECK(sphere_mean(poly("x1^3 + x1*x2", n)) == doctest::Approx(0.0));
    // On the sphere |x|^2 = 1.
    CHECK(sphere_mean(Polynomial::norm_squared(n) * Polynomial::norm_squared(n)) ==
          doctest::Approx(1.0));
  }
  CHECK(gaussian_mean(poly("x1^4", 1)) == doctest::Approx(3.0));
  CHECK(gaussian_mean(poly("x1^2*x2^6", 2)) == doctest::Approx(15.0));
}

TEST_CASE("arithmetic is a ring on random inputs") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Polynomial a = random_polynomial(3, 3, s);
    const Polynomial b = random_polynomial(3, 2, s + 100);
    const Polynomial c = random_polynomial(3, 2, s + 200);
    const std::vector<double> x = {0.3, -0.7, 1.1};
    CHECK((a * (b + c))(x) == doctest::Approx((a * b + a * c)(x)).epsilon(1e-12));
    CHECK((a - a).pruned(1e-14).is_zero());
  }
}

TEST_CASE("jet agrees with symbolic derivatives") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Polynomial f = random_polynomial(4, 4, s);
    const JetEvaluator jet(f);
    const std::vector<double> x = {0.2, -0.4, 0.5, 0.7};
    const Jet j = jet.evaluate(x.data(), true);
    CHECK(j.value == doctest::Approx(f(x)).epsilon(1e-12));
    for (int i = 0; i < 4; ++i) {
      CHECK(j.gradient[static_cast<std::size_t>(i)] ==
            doctest::Approx(f.derivative(i)(x)).epsilon(1e-12));
      for (int k = 0; k < 4; ++k) {
        CHECK(j.hessian[static_cast<std::size_t>(4 * i + k)] ==
              doctest::Approx(f.derivative(i).derivative(k)(x)).epsilon(1e-12));
      }
    }
    const CompiledPolynomial cf(f);
    CHECK(cf(x.data()) == doctest::Approx(f(x)).epsilon(1e-12));
  }
}

}  // TEST_SUITE
