#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "sphcov/errors.hpp"
#include "sphcov/report.hpp"
#include "sphcov/verify.hpp"
#include "test_support.hpp"

using namespace sphcov;
using sphcov::testing::poly;
using sphcov::testing::random_polynomial;

namespace {

CheckOptions quick(std::uint64_t seed = 1) {
  CheckOptions o;
  o.samples = 200'000;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("report serialization") {
  const auto r = equality_report("x", 3, 1.0, 1.1, 0.01, 1e-3, 100, 7, "note, with comma");
  CHECK_FALSE(r.pass);
  const auto back = VerificationReport::from_json(r.to_json());
  CHECK(back.to_json() == r.to_json());
  CHECK(r.mc_halfwidth == doctest::Approx(kZ95 * 0.01));
  CHECK(reports_to_csv({r}).find("\"note, with comma\"") != std::string::npos);
  // Inequalities allow slack of max(atol, 4 sigma) only.
  CHECK(inequality_report("y", 3, 1.03, 1.0, 0.01, 0.0, 1, 1, "").pass);
  CHECK_FALSE(inequality_report("y", 3, 1.05, 1.0, 0.01, 0.0, 1, 1, "").pass);
  auto inf = equality_report("z", 2, std::numeric_limits<double>::infinity(), 1.0, 0.0, 1e-3, 0, 0, "");
  CHECK(VerificationReport::from_json(inf.to_json()).lhs == std::numeric_limits<double>::infinity());
}

TEST_CASE("gaussian identities on small monomials") {
  for (int n : {1, 2}) {
    const Polynomial f = poly(n == 1 ? "x1^2" : "x1*x2 + x1^3", n);
    CHECK(check_gauss_first(f, f, quick()).pass);
    CHECK(check_gauss_second(f, f, quick()).pass);
  }
  const std::vector<double> t = {0.4, -0.3}, s = {0.8, 0.1};
  CHECK(check_gauss_fourier(t, s, quick()).pass);
}

TEST_CASE("first-order sphere identity") {
  const auto r = check_sphere_first(poly("x1", 3), poly("x1", 3), quick());
  CHECK(r.pass);
  CHECK(r.lhs == doctest::Approx(1.0 / 3.0));
  CHECK(check_sphere_first(poly("x1*x2", 4), poly("x1*x2 + x3", 4), quick(2)).pass);
}

TEST_CASE("second-order identity scope") {
  CHECK_THROWS_AS(check_sphere_second(poly("x1*x2", 4), poly("x1*x2", 4), quick()), ScopeError);
  CHECK_THROWS_AS(check_sphere_second(poly("x1*x2 + x3", 5), poly("x1*x2", 5), quick()), InputError);
  CHECK(check_sphere_second(poly("x1*x2", 5), poly("x1*x2", 5), quick()).pass);
}

TEST_CASE("same stream: bilinearity and constant invariance") {
  const Polynomial f = poly("x1*x2", 4), g = poly("x3^2", 4), h = poly("x1 + x2*x3", 4);
  const auto rf = check_sphere_first(f, h, quick(5));
  const auto rg = check_sphere_first(g, h, quick(5));
  const auto rfg = check_sphere_first(f + 2.0 * g, h, quick(5));
  CHECK(rfg.rhs == doctest::Approx(rf.rhs + 2.0 * rg.rhs).epsilon(1e-12));
  CHECK(rfg.lhs == doctest::Approx(rf.lhs + 2.0 * rg.lhs).epsilon(1e-12));
  const auto shifted = check_sphere_first(f + Polynomial::constant(4, 5.0), h, quick(5));
  CHECK(shifted.rhs == rf.rhs);
  CHECK(shifted.lhs == doctest::Approx(rf.lhs).epsilon(1e-14));
  // Symmetry of the mixing measure.
  CHECK(check_sphere_first(h, f, quick(5)).rhs == doctest::Approx(rf.rhs).epsilon(1e-2));
}

TEST_CASE("serial and parallel checks are bitwise identical") {
  CheckOptions a = quick(3), b = quick(3);
  a.exec = Execution::serial;
  b.exec = Execution::parallel;
  const auto ra = check_sphere_first(poly("x1*x2", 3), poly("x1*x2", 3), a);
  const auto rb = check_sphere_first(poly("x1*x2", 3), poly("x1*x2", 3), b);
  CHECK(std::memcmp(&ra.rhs, &rb.rhs, sizeof ra.rhs) == 0);
  CHECK(ra.to_json().dump() == rb.to_json().dump());
}

TEST_CASE("poincare and covariance bounds") {
  for (int n : {3, 6}) {
    CHECK(check_poincare(random_polynomial(n, 3, 7), quick()).pass);
    for (const auto& r : check_covariance_bounds(poly("x1*x2", n), poly("x1^2 - x2^2", n), 2.0, quick())) {
      CHECK_MESSAGE(r.pass, r.identity_id);
    }
  }
}

TEST_CASE("semigroup, circle and periodic chains") {
  for (const auto& r : check_semigroup_identity(random_polynomial(3, 3, 1), random_polynomial(3, 3, 2), quick())) {
    CHECK_MESSAGE(r.pass, r.identity_id);
  }
  for (const auto& r : check_circle(poly("x1^2", 2), poly("x1*x2", 2), quick())) CHECK_MESSAGE(r.pass, r.identity_id);
  for (const auto& r : check_periodic(poly("x2", 2), poly("x2 + x1^2", 2), 0.2, quick())) {
    CHECK_MESSAGE(r.pass, r.identity_id);
  }
}

TEST_CASE("registry") {
  CHECK(identity_ids().size() == 9);
  IdentityRequest req;
  req.id = "nope";
  CHECK_THROWS_AS(run_identity(req), InputError);
  req.id = "poincare";
  req.f = poly("x1^2", 3);
  req.options = quick();
  CHECK(run_identity(req).size() == 1);
}

}  // TEST_SUITE
