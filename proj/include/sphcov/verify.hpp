#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sphcov/montecarlo.hpp"
#include "sphcov/polynomial.hpp"
#include "sphcov/report.hpp"

namespace sphcov {

struct CheckOptions {
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 1;
  double atol = 1e-3;
  Execution exec = Execution::parallel;
};

/// c_n computed once per (n, order) and shared.
double cached_mixing_constant(int n, int order);

/// cov_gamma(u, v) (exact Gaussian moments) against
/// E <grad u(X), grad v(Y)> under pi_n (Monte Carlo).
VerificationReport check_gauss_first(const Polynomial& u, const Polynomial& v,
                                     const CheckOptions& opt = {});
/// cov_gamma(u, v) against <E grad u, E grad v> + (1/2) E tr(u''(X) v''(Y))
/// with (X, Y) drawn from 2 kappa_n.
VerificationReport check_gauss_second(const Polynomial& u, const Polynomial& v,
                                      const CheckOptions& opt = {});
/// Monte Carlo mean of cos(<t, X> + <s, Y>) under pi_n against
/// exp(-(|t|^2 + |s|^2)/2) (1 - exp(-<t, s>)) / <t, s>.
VerificationReport check_gauss_fourier(std::span<const double> t, std::span<const double> s,
                                       const CheckOptions& opt = {});

/// cov_sigma(f, g) against c_n E <grad_S f(x), grad_S g(y)> under mu_n.
VerificationReport check_sphere_first(const Polynomial& f, const Polynomial& g,
                                      const CheckOptions& opt = {});
/// Second-order form with the D operator; n >= 5 and f, g without linear
/// harmonic component (InputError otherwise).
VerificationReport check_sphere_second(const Polynomial& f, const Polynomial& g,
                                       const CheckOptions& opt = {});
/// Var f <= c_n int |grad_S f|^2; the notes carry the ratio against the
/// sharp constant 1/(n - 1).
VerificationReport check_poincare(const Polynomial& f, const CheckOptions& opt = {});
/// The L^p covariance bounds: first order always, the two second-order
/// bounds when f, g (resp. f) have no linear component, the first of them
/// only for n >= 5.
std::vector<VerificationReport> check_covariance_bounds(const Polynomial& f, const Polynomial& g,
                                                        double p, const CheckOptions& opt = {});
/// Spectral covariance against Monte Carlo and against the time integrals
/// of the first- and second-order semigroup identities. n >= 3.
std::vector<VerificationReport> check_semigroup_identity(const Polynomial& f, const Polynomial& g,
                                                         const CheckOptions& opt = {});
/// Circle chain: transfer to Q - 1/32, marginal constant 1/96, total mass
/// pi^2/3, and the Hoeffding representation for f, g in two variables.
std::vector<VerificationReport> check_circle(const Polynomial& f, const Polynomial& g,
                                             const CheckOptions& opt = {});
/// Periodic representation for u(x) = f(cos 2 pi x, sin 2 pi x) and the
/// same for g, at marginal constant c and at c = 1/24.
std::vector<VerificationReport> check_periodic(const Polynomial& f, const Polynomial& g, double c,
                                               const CheckOptions& opt = {});

struct IdentityRequest {
  std::string id;
  Polynomial f{2};
  Polynomial g{2};
  double p = 2.0;          // covbounds
  double c = 1.0 / 24.0;   // periodic
  CheckOptions options;
};

/// Registry ids: gauss1, gauss2, sphere1, sphere2, poincare, covbounds,
/// semigroup, circle, periodic.
const std::vector<std::string>& identity_ids();
std::vector<VerificationReport> run_identity(const IdentityRequest& request);

}  // namespace sphcov
