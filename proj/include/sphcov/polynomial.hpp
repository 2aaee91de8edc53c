#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sphcov {

/// Exponent multi-index of a monomial; entry i is the power of x_{i+1}.
using Exponents = std::vector<int>;

/// Graded order: total degree first, then lexicographically descending
/// exponents, so that x1 sorts before x2 within a degree.
struct GradedOrder {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Sparse multivariate polynomial in n real variables with double
/// coefficients. Zero coefficients are never stored.
///
/// The text form is a sum of terms such as `3.5*x1^2*x3 - x2`, with 1-based
/// variable indices. `to_string()` writes the terms in graded order using the
/// shortest round-trip representation of each coefficient, so
/// `parse(p.to_string(), n) == p` holds exactly.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, double, GradedOrder>;

  explicit Polynomial(int dimension);

  static Polynomial constant(int dimension, double value);
  /// x_{index+1}; `index` is 0-based.
  static Polynomial variable(int dimension, int index);
  static Polynomial monomial(int dimension, Exponents exponents, double coefficient);
  /// |x|^2 = x1^2 + ... + xn^2.
  static Polynomial norm_squared(int dimension);
  /// <v, x>.
  static Polynomial linear(std::span<const double> v);

  /// Parses the text grammar. Throws InputError on malformed text or when a
  /// variable index exceeds `dimension`.
  static Polynomial parse(std::string_view text, int dimension);
  std::string to_string() const;

  int dimension() const { return dimension_; }
  bool is_zero() const { return terms_.empty(); }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  const TermMap& terms() const { return terms_; }
  double coefficient(const Exponents& exponents) const;
  double max_abs_coefficient() const;

  double operator()(std::span<const double> x) const;

  Polynomial derivative(int index) const;
  /// Euclidean Laplacian sum_i d^2/dx_i^2.
  Polynomial laplacian() const;
  Polynomial homogeneous_part(int degree) const;
  /// Drops terms with |coefficient| <= tol.
  Polynomial pruned(double tol) const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Polynomial& rhs);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
  friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
  friend Polynomial operator*(Polynomial lhs, const Polynomial& rhs) { return lhs *= rhs; }
  friend Polynomial operator*(Polynomial lhs, double s) { return lhs *= s; }
  friend Polynomial operator*(double s, Polynomial rhs) { return rhs *= s; }
  friend Polynomial operator-(Polynomial p) { return p *= -1.0; }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void add_term(const Exponents& e, double c);
  void check_same_dimension(const Polynomial& other) const;

  int dimension_;
  TermMap terms_;
};

/// Mean of p over the uniform probability measure on S^{n-1}, from the
/// closed-form monomial moments.
double sphere_mean(const Polynomial& p);

/// Mean of p(X) for X standard normal in R^n.
double gaussian_mean(const Polynomial& p);

/// Flattened polynomial for repeated evaluation in sampling loops.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);

  double operator()(const double* x) const;
  int dimension() const { return dimension_; }
  bool is_zero() const { return coefficients_.empty(); }

 private:
  int dimension_ = 0;
  std::vector<double> coefficients_;
  // Per term: offsets into factors_ of (variable, power) pairs.
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint16_t> factor_vars_;
  std::vector<std::uint16_t> factor_pows_;
};

/// Value, gradient and Hessian of a polynomial at a point.
struct Jet {
  double value = 0.0;
  std::vector<double> gradient;  // n
  std::vector<double> hessian;   // n*n, row-major
};

/// Pre-differentiated polynomial: holds f, its n first partials and the
/// n(n+1)/2 distinct second partials in compiled form.
class JetEvaluator {
 public:
  explicit JetEvaluator(const Polynomial& p);

  int dimension() const { return dimension_; }
  const Polynomial& polynomial() const { return source_; }

  double value(const double* x) const { return f_(x); }
  void gradient(const double* x, double* out) const;
  Jet evaluate(const double* x, bool with_hessian = true) const;

 private:
  int dimension_;
  Polynomial source_;
  CompiledPolynomial f_;
  std::vector<CompiledPolynomial> df_;
  std::vector<CompiledPolynomial> d2f_;  // upper triangle, row-major
};

}  // namespace sphcov
