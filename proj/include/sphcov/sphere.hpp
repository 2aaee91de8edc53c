#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sphcov/montecarlo.hpp"
#include "sphcov/polynomial.hpp"

namespace sphcov {

/// Point of S^{n-1}. Construction renormalises the input; only the zero
/// vector and non-finite input are rejected.
class SpherePoint {
 public:
  static constexpr double kNormTolerance = 1e-12;

  explicit SpherePoint(std::vector<double> coords);

  int dimension() const { return static_cast<int>(coords_.size()); }
  const std::vector<double>& coords() const { return coords_; }
  const double* data() const { return coords_.data(); }
  double operator[](std::size_t i) const { return coords_[i]; }

 private:
  std::vector<double> coords_;
};

/// Tangent tensor at a basepoint: a vector (order 1) or a symmetric n x n
/// matrix stored row-major (order 2).
struct TangentTensor {
  int order = 1;
  int n = 0;
  std::vector<double> values;

  double operator()(int i, int j) const { return values[static_cast<std::size_t>(i * n + j)]; }
  double norm() const;  // Euclidean or Hilbert-Schmidt
  double trace() const;
};

double dot(std::span<const double> a, std::span<const double> b);

/// Kernels on raw coordinates, used by both the public operations and the
/// sampling loops. `theta` must be a unit vector.
namespace kernels {
/// g = grad f - <grad f, theta> theta.
void spherical_gradient(const double* grad, const double* theta, int n, double* out);
/// P A P with A = hess - <grad, theta> I, P = I - theta theta^T.
void spherical_hessian(const double* grad, const double* hess, const double* theta, int n,
                       double* out);
/// f''_S - (g theta^T + theta g^T).
void d_operator(const double* grad, const double* hess, const double* theta, int n, double* out);
}  // namespace kernels

TangentTensor spherical_gradient(const Polynomial& f, const SpherePoint& theta);
TangentTensor spherical_hessian(const Polynomial& f, const SpherePoint& theta);
double spherical_laplacian(const Polynomial& f, const SpherePoint& theta);
TangentTensor d_operator(const Polynomial& f, const SpherePoint& theta);

std::vector<SpherePoint> sample_sphere(int n, std::size_t count, std::uint64_t seed,
                                       Execution exec = Execution::parallel);

/// Density of <theta, theta'> for independent uniform points on S^{n-1}.
double inner_product_density(int n, double alpha);

}  // namespace sphcov
