#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sphcov/polynomial.hpp"
#include "sphcov/report.hpp"

namespace sphcov {

/// Probability law on the real line with finite second moment.
class Distribution1D {
 public:
  enum class Kind { uniform, bernoulli, gaussian, empirical, table };

  /// Uniform on (a, b).
  static Distribution1D uniform(double a, double b);
  /// Mass p at a and q = 1 - p at b, a < b.
  static Distribution1D bernoulli(double a, double b, double p);
  static Distribution1D gaussian(double mean, double variance);
  /// Right-continuous step CDF with mass 1/N at each sample.
  static Distribution1D empirical(std::vector<double> samples);
  /// CDF interpolated linearly between knots (x_i, F_i); F must rise from 0
  /// to 1. The law has a piecewise constant density.
  static Distribution1D table(std::vector<double> x, std::vector<double> F);
  /// Reads "x,F" lines (a header line and '#' comments are skipped).
  static Distribution1D table_from_file(const std::string& path);

  Kind kind() const { return kind_; }
  std::string name() const;
  bool absolutely_continuous() const;

  double cdf(double x) const;
  /// Density; throws InputError for laws without one.
  double density(double x) const;
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double mean_abs_deviation() const;
  std::complex<double> characteristic(double t) const;

  /// Interval carrying all mass; for the Gaussian, mean +- 12 sd.
  std::pair<double, double> support() const;
  /// Points where F or the density is not smooth, including the support ends.
  std::vector<double> breakpoints() const;

 private:
  Distribution1D() = default;
  void finish();

  Kind kind_ = Kind::uniform;
  double a_ = 0.0, b_ = 1.0, p_ = 0.5;
  std::vector<double> x_;  // sorted samples or table knots
  std::vector<double> F_;  // table knots only
  double mean_ = 0.0;
  double variance_ = 0.0;
};

/// H(x, y) = F(min(x, y)) (1 - F(max(x, y))).
double hoeffding_kernel(const Distribution1D& d, double x, double y);
/// h(x) = int_{(x, inf)} (y - a) dF(y), a the mean.
double hoeffding_marginal(const Distribution1D& d, double x);
/// tau(x) = h(x) / p(x); InputError where the density vanishes.
double stein_kernel(const Distribution1D& d, double x);
/// (f(t) f(s) - f(t + s)) / (t s) with f the characteristic function.
std::complex<double> hoeffding_fourier(const Distribution1D& d, double t, double s);

/// int int g(x, y) H(x, y) dx dy over the support. Cells between
/// breakpoints use Gauss-Legendre, and diagonal cells are split along x = y.
double hoeffding_integral(const Distribution1D& d, const std::function<double(double, double)>& g);
std::complex<double> hoeffding_integral_complex(
    const Distribution1D& d, const std::function<std::complex<double>(double, double)>& g);
/// int_A int_B H over rectangles A x B with A = [a0, a1], B = [b0, b1].
double hoeffding_mass(const Distribution1D& d, double a0, double a1, double b0, double b1);
/// int H(x, y) dy by quadrature; an independent path to hoeffding_marginal.
double hoeffding_marginal_quadrature(const Distribution1D& d, double x);
/// int g dF by quadrature, exact sums for discrete laws.
double expectation(const Distribution1D& d, const std::function<double(double)>& g);

/// cov(X, u(X)) against E tau(X) u'(X), both by quadrature, for a
/// univariate polynomial u (dimension 1).
VerificationReport stein_identity_check(const Distribution1D& d, const Polynomial& u,
                                        double atol = 1e-8);

/// Finite Fourier sum a0 + sum_k a_k cos(2 pi k x / T) + b_k sin(2 pi k x / T).
struct TrigPolynomial {
  double period = 1.0;
  double a0 = 0.0;
  std::vector<double> a;  // a[k - 1]
  std::vector<double> b;

  double operator()(double x) const;
  double derivative(double x) const;
  double mean() const { return a0; }
  /// Restriction of a polynomial in two variables to the circle,
  /// x -> f(cos(2 pi x / T), sin(2 pi x / T)), converted exactly by a
  /// discrete Fourier transform on enough nodes to avoid aliasing.
  static TrigPolynomial from_circle_polynomial(const Polynomial& f, double period);
};

/// Covariance under the uniform law on one period, from the coefficients.
double trig_covariance(const TrigPolynomial& u, const TrigPolynomial& v);

/// Q(h) = (1 - 4h(1 - h)) / 8 on [0, 1].
double periodic_q(double h);
/// K(h) = Q(h) - 1/32 = (4h - 1)(4h - 3) / 32.
double periodic_k(double h);

/// Q(|x - y| / T) + (c - 1/24) for 0 <= x, y < T.
double periodic_mixing_density(double c, double T, double x, double y);
/// int_0^T of the density in y, divided by T; equals c.
double periodic_marginal_constant(double c, double T, double x);
/// For a law mu on [0, 1) with a density: lambda_mu + (var - c) m x m
/// + c (mu x m + m x mu) - (Lambda x m + m x Lambda), as a density.
double reconstructed_mixing_density(const Distribution1D& mu, double c, double x, double y);

/// cov_m(u, v) against int int u'(x) v'(y) lambda(x, y) over one period
/// with the periodic mixing density of constant c.
VerificationReport periodic_covariance_check(const TrigPolynomial& u, const TrigPolynomial& v,
                                             double c, double atol = 1e-8);

/// (1/(2 pi)^2) cos(t - s) psi(cos(t - s)).
double circle_transfer(const std::function<double(double)>& psi, double t, double s);

struct CircleTransferCheck {
  double max_deviation = 0.0;    // against Q(h / 2 pi) - 1/32 on the grid
  double marginal_constant = 0.0;  // marginal density of lambda divided by 2 pi
  int grid_points = 0;
};
/// Runs circle_transfer with the exact circle density on an h grid in
/// (0, 2 pi) and integrates the marginal.
CircleTransferCheck circle_transfer_check(int grid_points = 1000);

/// F(t ^ s)(1 - F(t v s)) with F(t) = t / 2 pi on (0, 2 pi).
double circle_hoeffding_density(double t, double s);
/// int_0^{2 pi} of the density in s: t (2 pi - t) / (4 pi).
double circle_hoeffding_marginal(double t);
/// Total mass of the density, by quadrature.
double circle_hoeffding_mass();

/// cov over the circle of f, g (polynomials in two variables) against
/// int int u'(t) v'(s) F(t ^ s)(1 - F(t v s)) dt ds, u(t) = f(cos t, sin t).
VerificationReport circle_hoeffding_representation(const Polynomial& f, const Polynomial& g,
                                                   double atol = 1e-8);

}  // namespace sphcov
