#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "sphcov/montecarlo.hpp"
#include "sphcov/polynomial.hpp"
#include "sphcov/sphere.hpp"

namespace sphcov {

/// Function on S^{n-1} as a finite sum of spherical harmonics f_d. Each
/// component is a homogeneous harmonic polynomial of degree d.
struct HarmonicExpansion {
  int n = 0;
  std::map<int, Polynomial> components;

  /// Sum of the components as an ambient polynomial.
  Polynomial to_polynomial() const;
  /// Component of degree d, or the zero polynomial.
  Polynomial component(int d) const;
  double operator()(std::span<const double> theta) const;

  /// {"n": n, "components": [{"degree": d, "polynomial": text}, ...]}
  std::string to_json() const;
  static HarmonicExpansion from_json(const std::string& text);
};

/// Eigenvalue magnitude d(n + d - 2) of -Delta_S on degree-d harmonics.
double laplace_eigenvalue(int n, int d);

/// Harmonic projection of a homogeneous polynomial of degree m:
/// sum_i (-1)^i |x|^{2i} Delta^i q / prod_{l<=i} 2l(n + 2m - 2 - 2l).
Polynomial harmonic_projection(const Polynomial& q, int m);

/// Splits f into spherical harmonics layer by layer. Coefficients below
/// 1e-14 times the largest input coefficient are dropped.
HarmonicExpansion harmonic_decompose(const Polynomial& f);

HarmonicExpansion apply_laplacian(const HarmonicExpansion& e);

/// P_t e; throws InputError for t < 0.
HarmonicExpansion heat_semigroup(const HarmonicExpansion& e, double t);

/// int f g d sigma.
double l2_inner(const Polynomial& f, const Polynomial& g);
/// int <grad_S f, grad_S g> d sigma, from the polynomial
/// <grad f, grad g> - (x . grad f)(x . grad g) restricted to the sphere.
double gradient_inner(const Polynomial& f, const Polynomial& g);

struct SemigroupCovariance {
  double spectral = 0.0;    // sum_{d>=1} <f_d, g_d>
  double integrated = 0.0;  // time integral evaluated numerically
  double quad_error = 0.0;  // error estimate reported by the integrator
};

/// cov(f, g) through the first-order semigroup representation. n >= 3.
SemigroupCovariance semigroup_covariance(const HarmonicExpansion& f, const HarmonicExpansion& g);

struct SecondOrderSemigroupCovariance {
  double spectral = 0.0;
  double laplacian_path = 0.0;    // int t <Delta P_t f, Delta g> dt
  double bilaplacian_path = 0.0;  // int t <P_t f, Delta^2 g> dt
};

/// cov(f, g) through the second-order semigroup representation. n >= 3.
SecondOrderSemigroupCovariance second_order_semigroup_covariance(const HarmonicExpansion& f,
                                                                 const HarmonicExpansion& g);

/// Heat kernel of P_t with respect to sigma, truncated at degree `max_degree`:
/// sum_d e^{-d(n+d-2)t} (1 + d/nu) C_d^nu(alpha), nu = (n-2)/2. n >= 3.
double heat_kernel(int n, double t, double alpha, int max_degree = 40);
/// Bound on the absolute value of the omitted terms of heat_kernel.
double heat_kernel_tail(int n, double t, int max_degree = 40);

struct BakryEmeryResult {
  double lhs = 0.0;        // |grad_S P_t f(theta)|
  double rhs = 0.0;        // e^{-(n-2)t} (P_t |grad_S f|)(theta), MC estimate
  double rhs_stderr = 0.0;
  double truncation = 0.0;  // bound on the effect of kernel truncation on rhs
  std::uint64_t samples = 0;
  bool pass = false;  // lhs <= rhs + 4 stderr + truncation
};

/// Pointwise check of |grad_S P_t f| <= e^{-(n-2)t} P_t |grad_S f| at theta.
BakryEmeryResult bakry_emery_check(const Polynomial& f, const SpherePoint& theta, double t,
                                   std::size_t samples, std::uint64_t seed,
                                   Execution exec = Execution::parallel);

}  // namespace sphcov
