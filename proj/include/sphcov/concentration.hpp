#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sphcov/montecarlo.hpp"
#include "sphcov/polynomial.hpp"
#include "sphcov/report.hpp"

namespace sphcov {

/// Largest |grad_S f| over `probes` uniform points: a lower estimate of the
/// Lipschitz seminorm. Requires probes >= 1000.
double lipschitz_estimate(const Polynomial& f, std::size_t probes = 10'000,
                          std::uint64_t seed = 0x5eed);

/// P(|theta_1| >= r) for theta uniform on S^{n-1}, by the regularized
/// incomplete beta function.
double exact_coordinate_tail(int n, double r);

/// 2 exp(-(n - 1) r^2 / 2).
double levy_bound(int n, double r);
/// (1/r) exp(-(n - 2) r^2 / 2) E|f - m|; +inf at r = 0.
double mixing_bound(int n, double r, double mean_abs_dev);

/// Wilson score interval for k successes in `trials` at normal quantile z.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval wilson_interval(std::uint64_t k, std::uint64_t trials, double z);

struct DeviationRow {
  double r = 0.0;
  std::uint64_t count = 0;  // samples with |f - m| >= r
  double empirical = 0.0;
  Interval wilson95;
  double bound_levy = 0.0;       // 2 e^{-(n-1) r^2/2}
  double bound_mixing = 0.0;     // (1/r) e^{-(n-2) r^2/2} E|f - m|
  double bound_poincare = 0.0;   // (1/(r sqrt(n-1))) e^{-(n-2) r^2/2}
  double exact = -1.0;           // exact tail when f is linear, else -1
  bool pass = false;
};

struct ConcentrationExperiment {
  int n = 0;
  std::string f;
  double lipschitz = 0.0;
  double mean = 0.0;           // exact sphere mean m
  double mean_abs_dev = 0.0;   // Monte Carlo E|f - m|
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<DeviationRow> rows;
  bool pass = false;

  std::string to_csv() const;
};

/// Empirical sigma{|f - m| >= r} on one sample stream for every r, against
/// the three bounds. A row passes when the 4-sigma Wilson lower limit of the
/// empirical tail lies below each bound and the exact tail (if any) does too.
/// Throws InputError when lipschitz_estimate(f) > 1 + 1e-6.
ConcentrationExperiment deviation_experiment(const Polynomial& f, std::span<const double> r_grid,
                                             std::size_t samples, std::uint64_t seed,
                                             Execution exec = Execution::parallel);

struct ExpMomentHypotheses {
  bool orthogonal_to_affine = false;  // a)
  double max_operator_norm = 0.0;     // b) largest ||f''_S|| over probes
  bool operator_norm_ok = false;
  double b = 0.0;                     // c) int ||f''_S||_HS^2, exact
};

struct ExpMomentResult {
  std::vector<VerificationReport> reports;
  ExpMomentHypotheses hypotheses;  // filled for order 2
};

/// Order 1: E e^f <= E exp(c_n |grad_S f|^2) for mean-zero f.
/// Order 2 (n >= 5, f orthogonal to affine functions):
/// E e^f <= E exp((2 ||f''_S||_HS^2 + 8 |grad_S f|^2) / ((n-2)(n-4))), and
/// E exp((n-1)|f| / (2(1+b))) <= 2 when the operator-norm hypothesis holds at
/// all probe points. Both sides use one sample stream.
ExpMomentResult exp_moment_check(const Polynomial& f, int order, std::size_t samples,
                                 std::uint64_t seed, Execution exec = Execution::parallel);

/// int ||f''_S||_HS^2 d sigma = sum_d l_d (l_d - (n - 2)) ||f_d||^2,
/// l_d = d(n + d - 2).
double hessian_energy(const Polynomial& f);

}  // namespace sphcov
