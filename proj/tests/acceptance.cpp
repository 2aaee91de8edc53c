// One line per acceptance criterion. Exit status is nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sphcov/concentration.hpp"
#include "sphcov/harmonics.hpp"
#include "sphcov/hoeffding.hpp"
#include "sphcov/mixing.hpp"
#include "sphcov/montecarlo.hpp"
#include "sphcov/random.hpp"
#include "sphcov/verify.hpp"
#include "test_support.hpp"

using namespace sphcov;
using sphcov::testing::poly;
using sphcov::testing::random_polynomial;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (secs > budget_s) o.require(false, "runtime " + format_double(secs) + " s over budget");
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s (%.1f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, title, secs,
              o.pass ? "" : ": ", o.detail.str().c_str());
  std::fflush(stdout);
}

CheckOptions mc(std::size_t samples, std::uint64_t seed) {
  CheckOptions o;
  o.samples = samples;
  o.seed = seed;
  return o;
}

std::string show(const VerificationReport& r) {
  return r.identity_id + " n=" + std::to_string(r.n) + " lhs=" + format_double(r.lhs) +
         " rhs=" + format_double(r.rhs) + " (" + r.notes + ")";
}

void c1(Outcome& o) {
  o.require(std::abs(psi_circle_exact(-1.0) - pi * pi / 8.0) <= 1e-12, "psi(-1)");
  o.require(std::abs(psi_circle_exact(0.0) - pi / 2.0) <= 1e-12, "psi(0)");
  o.require(std::abs(psi_circle_exact(1.0) - 3.0 * pi * pi / 8.0) <= 1e-12, "psi(1)");
  double worst = 0.0, worst_log = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double a = -1.0 + 0.02 * i;
    const double exact = psi_circle_exact(a);
    worst = std::max(worst, std::abs(psi_sphere(2, a, 1) - exact));
    if (std::abs(a) < 1.0) worst_log = std::max(worst_log, std::abs(psi2_log_integral(a) - exact));
  }
  o.require(worst <= 1e-6, "psi_sphere(2) deviation " + format_double(worst));
  o.require(worst_log <= 1e-6, "log-integral deviation " + format_double(worst_log));
}

void c2(Outcome& o) {
  for (int n = 3; n <= 10; ++n) {
    const MixingConstant c = mixing_constant(n, 1, 1e-8);
    o.require(c.within_bounds, "order 1 n=" + std::to_string(n) + " c=" + format_double(c.value));
  }
  for (int n = 5; n <= 10; ++n) {
    const MixingConstant c = mixing_constant(n, 2, 1e-8);
    o.require(c.within_bounds, "order 2 n=" + std::to_string(n) + " c=" + format_double(c.value) +
                                   " outside (" + format_double(c.lower) + ", " + format_double(c.upper) + ")");
  }
}

void c3(Outcome& o) {
  for (int n : {3, 4, 5}) {
    const std::string cubic = "x1^3 - " + format_double(3.0 / (n + 2.0)) + "*x1";
    std::vector<Polynomial> suite = {poly("x1", n), poly("x1*x2", n), poly("x1^2", n), poly(cubic, n),
                                     random_polynomial(n, 3, 1000 + static_cast<std::uint64_t>(n), 0.4)};
    for (std::size_t i = 0; i < suite.size(); ++i) {
      const auto r = check_sphere_first(suite[i], suite[i], mc(1'000'000, 10 + i));
      o.require(r.pass, show(r));
    }
    const auto r = check_sphere_first(poly("x1", n), poly("x1", n), mc(1'000'000, 99));
    const double sigma = r.mc_halfwidth / kZ95;
    o.require(std::abs(r.rhs - 1.0 / n) <= 4.0 * sigma, "x1 rhs against 1/n: " + show(r));
  }
}

void c4(Outcome& o) {
  for (int n : {5, 6, 8}) {
    const Polynomial f = poly("x1*x2", n);
    const auto r = check_sphere_second(f, f, mc(1'000'000, 4));
    o.require(r.pass, show(r));
    // Monte Carlo oracle for the left side.
    const CompiledPolynomial cf(f);
    const Moments m = monte_carlo(1'000'000, 17, 1, [&](Rng& rng, std::span<double> out) {
      thread_local std::vector<double> x;
      x.resize(static_cast<std::size_t>(n));
      draw_sphere(rng, x);
      const double v = cf(x.data());
      out[0] = v * v;
    });
    const double target = 1.0 / (n * (n + 2.0));
    o.require(std::abs(m.mean(0) - target) <= 4.0 * m.standard_error(0),
              "MC lhs " + format_double(m.mean(0)) + " vs " + format_double(target));
    o.require(std::abs(r.lhs - target) <= 1e-12, "exact lhs " + format_double(r.lhs));
  }
}

void c5(Outcome& o) {
  for (int n : {3, 4, 5}) {
    for (std::uint64_t k = 0; k < 20; ++k) {
      const Polynomial f = random_polynomial(n, 3, 500 * static_cast<std::uint64_t>(n) + 2 * k);
      const Polynomial g = random_polynomial(n, 3, 500 * static_cast<std::uint64_t>(n) + 2 * k + 1);
      for (const auto& r : check_semigroup_identity(f, g, mc(200'000, k))) o.require(r.pass, show(r));
    }
  }
}

void c6(Outcome& o) {
  for (int n : {1, 2, 3}) {
    std::vector<std::string> suite = {"x1", "x1^2", "x1^3"};
    if (n >= 2) suite.insert(suite.end(), {"x1*x2", "x1^2*x2"});
    if (n >= 3) suite.push_back("x1*x2*x3");
    for (std::size_t i = 0; i < suite.size(); ++i) {
      const Polynomial f = poly(suite[i], n);
      for (std::size_t k = i; k < suite.size(); ++k) {
        const Polynomial g = poly(suite[k], n);
        if (k == i || k == i + 1) {
          const auto r1 = check_gauss_first(f, g, mc(1'000'000, 31 + i));
          o.require(r1.pass, show(r1));
          const auto r2 = check_gauss_second(f, g, mc(1'000'000, 71 + i));
          o.require(r2.pass, show(r2));
        }
      }
    }
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 5; ++k) {
    const std::vector<double> t = {u(rng), u(rng)}, s = {u(rng), u(rng)};
    const auto r = check_gauss_fourier(t, s, mc(1'000'000, 300 + static_cast<std::uint64_t>(k)));
    o.require(r.pass, show(r));
  }
}

void c7(Outcome& o) {
  const std::vector<double> grid = {0.9, 0.99, 0.999, 0.9999};
  for (int n : {3, 4, 5, 6}) {
    double lo = 1e300, hi = 0.0;
    for (const auto& [a, v] : asymptotic_ratio(n, grid)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    o.require(lo > 0.0 && hi / lo <= 50.0, "n=" + std::to_string(n) + " ratio spread " + format_double(hi / lo));
  }
  std::vector<double> all = grid;
  for (int i = 0; i <= 100; ++i) all.push_back(-1.0 + 0.02 * i);
  for (double a : all) o.require(psi_sphere(2, a, 1) <= 2.0 * pi, "psi_2(" + format_double(a) + ") > 2 pi");
}

void c8(Outcome& o) {
  const auto uni = Distribution1D::uniform(0.0, 1.0);
  for (int i = 1; i < 20; ++i) {
    const double x = i / 20.0;
    o.require(std::abs(hoeffding_marginal(uni, x) - x * (1 - x) / 2) <= 1e-10, "uniform h closed form");
    o.require(std::abs(hoeffding_marginal_quadrature(uni, x) - x * (1 - x) / 2) <= 1e-10, "uniform h quadrature");
  }
  const double p = 0.3;
  const auto ber = Distribution1D::bernoulli(0.0, 1.0, p);
  for (int i = 1; i < 10; ++i) {
    for (int k = 1; k < 10; ++k) {
      o.require(std::abs(hoeffding_kernel(ber, i / 10.0, k / 10.0) - p * (1 - p)) <= 1e-15, "bernoulli kernel");
    }
  }
  const std::vector<std::string> us = {"x1", "x1^2", "x1^3 - x1", "x1^4", "0.5*x1^5 + x1^2"};
  for (const auto& d : {uni, Distribution1D::gaussian(0.0, 1.0)}) {
    for (const auto& u : us) {
      const auto r = stein_identity_check(d, poly(u, 1), 1e-8);
      o.require(r.pass, show(r));
    }
  }
  const auto gauss = Distribution1D::gaussian(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double x = -2.25 + 0.5 * i;
    o.require(std::abs(stein_kernel(gauss, x) - 1.0) <= 1e-8, "gaussian tau at " + format_double(x));
  }
}

void c9(Outcome& o) {
  const CircleTransferCheck t = circle_transfer_check(1000);
  o.require(t.grid_points == 1000 && t.max_deviation <= 1e-10, "transfer deviation " + format_double(t.max_deviation));
  o.require(std::abs(t.marginal_constant - 1.0 / 96.0) <= 1e-10, "marginal constant " + format_double(t.marginal_constant));
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"x1", "x1"}, {"x1*x2", "x2^3"}, {"x1^2", "x1^2 - x2"}, {"x1^3 + x2", "x1*x2^2"}, {"x2^4", "x1 + x1^2*x2"}};
  for (const auto& [f, g] : pairs) {
    const auto r = circle_hoeffding_representation(poly(f, 2), poly(g, 2), 1e-8);
    o.require(r.pass, show(r));
  }
  o.require(std::abs(circle_hoeffding_mass() - pi * pi / 3.0) <= 1e-8, "total mass");
  // The circle mixing measure assembled from K carries mass c_2.
  const double from_k = circle_total_mass(), c2 = mixing_constant(2, 1).value;
  o.require(std::abs(from_k - c2) <= 1e-8, "mass from K " + format_double(from_k) + " vs c_2 " + format_double(c2));
}

void c10(Outcome& o) {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(0.1 * i);
  for (int n : {10, 50}) {
    const auto ex = deviation_experiment(poly("x1", n), grid, 10'000'000, 1);
    for (const auto& row : ex.rows) {
      const double lower = wilson_interval(row.count, ex.samples, 4.0).lo;
      const std::string at = "n=" + std::to_string(n) + " r=" + format_double(row.r);
      o.require(lower <= row.bound_levy && lower <= row.bound_mixing, at + " empirical above a bound");
      o.require(row.exact >= 0.0 && row.exact <= row.bound_levy && row.exact <= row.bound_mixing,
                at + " exact tail above a bound");
    }
  }
  for (const auto& [text, n] : std::vector<std::pair<std::string, int>>{
           {"x1", 5}, {"x1*x2", 5}, {"0.5*x1 - x2*x3", 6}, {"x1^3 - 0.375*x1", 6}}) {
    for (const auto& r : exp_moment_check(poly(text, n), 1, 1'000'000, 5).reports) o.require(r.pass, show(r));
  }
  for (const auto& [text, n] : std::vector<std::pair<std::string, int>>{
           {"x1*x2", 5}, {"0.5*x1*x2", 8}, {"x1^2 - x2^2", 6}, {"0.3*x1*x2*x3", 7}}) {
    for (const auto& r : exp_moment_check(poly(text, n), 2, 1'000'000, 6).reports) o.require(r.pass, show(r));
  }
}

}  // namespace

int main() {
  criterion(1, "circle golden values", 5, c1);
  criterion(2, "mixing constant bounds", 10, c2);
  criterion(3, "first-order spherical identity", 120, c3);
  criterion(4, "second-order spherical identity", 120, c4);
  criterion(5, "semigroup consistency", 120, c5);
  criterion(6, "gaussian representations", 300, c6);
  criterion(7, "boundary asymptotics", 60, c7);
  criterion(8, "hoeffding suite", 60, c8);
  criterion(9, "periodic and circle uniqueness chain", 60, c9);
  criterion(10, "concentration", 180, c10);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
