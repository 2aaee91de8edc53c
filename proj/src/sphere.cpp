#include "sphcov/sphere.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sphcov/errors.hpp"

namespace sphcov {

SpherePoint::SpherePoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw InputError("sphere point needs dimension >= 2");
  double norm2 = 0.0;
  for (double v : coords_) {
    if (!std::isfinite(v)) throw InputError("sphere point has non-finite coordinate");
    norm2 += v * v;
  }
  if (norm2 == 0.0) throw InputError("sphere point cannot be the zero vector");
  const double norm = std::sqrt(norm2);
  if (std::abs(norm - 1.0) > kNormTolerance) {
    for (double& v : coords_) v /= norm;
  }
}

double TangentTensor::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double TangentTensor::trace() const {
  if (order == 1) throw InputError("trace of an order-1 tensor");
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += (*this)(i, i);
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace kernels {

void spherical_gradient(const double* grad, const double* theta, int n, double* out) {
  double radial = 0.0;
  for (int i = 0; i < n; ++i) radial += grad[i] * theta[i];
  for (int i = 0; i < n; ++i) out[i] = grad[i] - radial * theta[i];
}

void spherical_hessian(const double* grad, const double* hess, const double* theta, int n,
                       double* out) {
  double radial = 0.0;
  for (int i = 0; i < n; ++i) radial += grad[i] * theta[i];
  // Hv = A theta, s = theta^T A theta.
  thread_local std::vector<double> av;
  av.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += hess[i * n + j] * theta[j];
    av[i] = acc - radial * theta[i];
  }
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += theta[i] * av[i];
  // P A P = A - av theta^T - theta av^T + s theta theta^T.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = hess[i * n + j] - (i == j ? radial : 0.0);
      out[i * n + j] = a - av[i] * theta[j] - theta[i] * av[j] + s * theta[i] * theta[j];
    }
  }
}

void d_operator(const double* grad, const double* hess, const double* theta, int n, double* out) {
  spherical_hessian(grad, hess, theta, n, out);
  thread_local std::vector<double> g;
  g.resize(static_cast<std::size_t>(n));
  spherical_gradient(grad, theta, n, g.data());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out[i * n + j] -= g[i] * theta[j] + theta[i] * g[j];
  }
}

}  // namespace kernels

namespace {

void check_dimension(const Polynomial& f, const SpherePoint& theta) {
  if (f.dimension() != theta.dimension()) {
    throw InputError("dimension mismatch: polynomial in " + std::to_string(f.dimension()) +
                     " variables, point in R^" + std::to_string(theta.dimension()));
  }
}

}  // namespace

TangentTensor spherical_gradient(const Polynomial& f, const SpherePoint& theta) {
  check_dimension(f, theta);
  const int n = f.dimension();
  const JetEvaluator jet(f);
  const Jet j = jet.evaluate(theta.data(), false);
  TangentTensor t{1, n, std::vector<double>(static_cast<std::size_t>(n))};
  kernels::spherical_gradient(j.gradient.data(), theta.data(), n, t.values.data());
  return t;
}

TangentTensor spherical_hessian(const Polynomial& f, const SpherePoint& theta) {
  check_dimension(f, theta);
  const int n = f.dimension();
  const JetEvaluator jet(f);
  const Jet j = jet.evaluate(theta.data(), true);
  TangentTensor t{2, n, std::vector<double>(static_cast<std::size_t>(n * n))};
  kernels::spherical_hessian(j.gradient.data(), j.hessian.data(), theta.data(), n,
                             t.values.data());
  return t;
}

double spherical_laplacian(const Polynomial& f, const SpherePoint& theta) {
  check_dimension(f, theta);
  const int n = f.dimension();
  const JetEvaluator jet(f);
  const Jet j = jet.evaluate(theta.data(), true);
  const double* t = theta.data();
  double lap = 0.0, radial = 0.0, second = 0.0;
  for (int i = 0; i < n; ++i) {
    lap += j.hessian[i * n + i];
    radial += j.gradient[i] * t[i];
    for (int k = 0; k < n; ++k) second += t[i] * j.hessian[i * n + k] * t[k];
  }
  return lap - (n - 1) * radial - second;
}

TangentTensor d_operator(const Polynomial& f, const SpherePoint& theta) {
  check_dimension(f, theta);
  const int n = f.dimension();
  const JetEvaluator jet(f);
  const Jet j = jet.evaluate(theta.data(), true);
  TangentTensor t{2, n, std::vector<double>(static_cast<std::size_t>(n * n))};
  kernels::d_operator(j.gradient.data(), j.hessian.data(), theta.data(), n, t.values.data());
  return t;
}

std::vector<SpherePoint> sample_sphere(int n, std::size_t count, std::uint64_t seed,
                                       Execution exec) {
  if (n < 2) throw InputError("sample_sphere requires n >= 2");
  if (count < 1) throw InputError("sample_sphere requires count >= 1");
  auto raw = generate<std::vector<double>>(
      count, seed,
      [n](Rng& rng) {
        std::vector<double> x(static_cast<std::size_t>(n));
        draw_sphere(rng, x);
        return x;
      },
      exec);
  std::vector<SpherePoint> out;
  out.reserve(count);
  for (auto& x : raw) out.emplace_back(std::move(x));
  return out;
}

double inner_product_density(int n, double alpha) {
  if (n < 2) throw InputError("inner_product_density requires n >= 2");
  if (!(std::abs(alpha) <= 1.0)) throw InputError("inner_product_density requires |alpha| <= 1");
  const double log_norm =
      std::lgamma(0.5 * n) - 0.5 * std::log(std::numbers::pi) - std::lgamma(0.5 * (n - 1));
  if (n == 3) return std::exp(log_norm);
  const double base = 1.0 - alpha * alpha;
  if (base == 0.0) return n == 2 ? std::numeric_limits<double>::infinity() : 0.0;
  return std::exp(log_norm + 0.5 * (n - 3) * std::log(base));
}

}  // namespace sphcov
