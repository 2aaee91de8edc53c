#include "sphcov/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <json.hpp>

#include "sphcov/errors.hpp"

namespace sphcov {

namespace {

void require_same_dimension(const HarmonicExpansion& f, const HarmonicExpansion& g) {
  if (f.n != g.n) throw InputError("expansions live on spheres of different dimension");
}

void require_semigroup_scope(int n) {
  if (n < 3) {
    throw ScopeError(
        "semigroup covariance identity requires n >= 3; it does not hold on the circle");
  }
}

Polynomial power_of_norm(int n, int i) {
  Polynomial r = Polynomial::constant(n, 1.0);
  const Polynomial r2 = Polynomial::norm_squared(n);
  for (int k = 0; k < i; ++k) r *= r2;
  return r;
}

template <class F>
double integrate_half_line(F&& f, double* error = nullptr) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0, l1 = 0.0;
  const double v = integrator.integrate(f, 1e-13, &err, &l1);
  if (error) *error = err;
  return v;
}

}  // namespace

Polynomial HarmonicExpansion::to_polynomial() const {
  Polynomial sum(n);
  for (const auto& [d, p] : components) sum += p;
  return sum;
}

Polynomial HarmonicExpansion::component(int d) const {
  const auto it = components.find(d);
  return it == components.end() ? Polynomial(n) : it->second;
}

double HarmonicExpansion::operator()(std::span<const double> theta) const {
  double s = 0.0;
  for (const auto& [d, p] : components) s += p(theta);
  return s;
}

std::string HarmonicExpansion::to_json() const {
  nlohmann::ordered_json doc;
  doc["n"] = n;
  doc["components"] = nlohmann::ordered_json::array();
  for (const auto& [d, p] : components) {
    doc["components"].push_back({{"degree", d}, {"polynomial", p.to_string()}});
  }
  return doc.dump(2);
}

HarmonicExpansion HarmonicExpansion::from_json(const std::string& text) {
  HarmonicExpansion e;
  try {
    const auto doc = nlohmann::json::parse(text);
    e.n = doc.at("n").get<int>();
    for (const auto& c : doc.at("components")) {
      const int d = c.at("degree").get<int>();
      Polynomial p = Polynomial::parse(c.at("polynomial").get<std::string>(), e.n);
      if (!p.is_zero()) e.components.insert_or_assign(d, std::move(p));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("invalid expansion document: ") + ex.what());
  }
  return e;
}

double laplace_eigenvalue(int n, int d) { return static_cast<double>(d) * (n + d - 2); }

Polynomial harmonic_projection(const Polynomial& q, int m) {
  const int n = q.dimension();
  Polynomial result = q;
  Polynomial lap = q;
  double denom = 1.0;
  for (int i = 1;; ++i) {
    lap = lap.laplacian();
    if (lap.is_zero()) break;
    denom *= 2.0 * i * (n + 2 * m - 2 - 2 * i);
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    result += (sign / denom) * (power_of_norm(n, i) * lap);
  }
  return result;
}

HarmonicExpansion harmonic_decompose(const Polynomial& f) {
  const int n = f.dimension();
  HarmonicExpansion e;
  e.n = n;
  if (f.is_zero()) return e;
  std::map<int, Polynomial> acc;
  for (int k = 0; k <= f.degree(); ++k) {
    Polynomial q = f.homogeneous_part(k);
    for (int j = 0; 2 * j <= k && !q.is_zero(); ++j) {
      const int m = k - 2 * j;
      // Delta^j (|x|^{2j} h_m) = prod_{l<=j} 2l(2l + n - 2 + 2m) h_m.
      double denom = 1.0;
      for (int l = 1; l <= j; ++l) denom *= 2.0 * l * (2 * l + n - 2 + 2 * m);
      Polynomial h = harmonic_projection(q, m) * (1.0 / denom);
      auto [it, inserted] = acc.try_emplace(m, n);
      it->second += h;
      q = q.laplacian();
    }
  }
  const double tol = 1e-14 * f.max_abs_coefficient();
  for (auto& [d, p] : acc) {
    Polynomial clean = p.pruned(tol);
    if (!clean.is_zero()) e.components.emplace(d, std::move(clean));
  }
  return e;
}

HarmonicExpansion apply_laplacian(const HarmonicExpansion& e) {
  HarmonicExpansion out;
  out.n = e.n;
  for (const auto& [d, p] : e.components) {
    if (d == 0) continue;
    out.components.emplace(d, p * (-laplace_eigenvalue(e.n, d)));
  }
  return out;
}

HarmonicExpansion heat_semigroup(const HarmonicExpansion& e, double t) {
  if (!(t >= 0.0)) throw InputError("heat semigroup time must be >= 0");
  HarmonicExpansion out;
  out.n = e.n;
  for (const auto& [d, p] : e.components) {
    Polynomial scaled = p * std::exp(-laplace_eigenvalue(e.n, d) * t);
    if (!scaled.is_zero()) out.components.emplace(d, std::move(scaled));
  }
  return out;
}

double l2_inner(const Polynomial& f, const Polynomial& g) { return sphere_mean(f * g); }

double gradient_inner(const Polynomial& f, const Polynomial& g) {
  const int n = f.dimension();
  Polynomial dot_grad(n), radial_f(n), radial_g(n);
  for (int i = 0; i < n; ++i) {
    const Polynomial fi = f.derivative(i);
    const Polynomial gi = g.derivative(i);
    const Polynomial xi = Polynomial::variable(n, i);
    dot_grad += fi * gi;
    radial_f += xi * fi;
    radial_g += xi * gi;
  }
  return sphere_mean(dot_grad - radial_f * radial_g);
}

namespace {

struct GramEntry {
  double lambda_f;
  double lambda_g;
  double value;
};

template <class Inner>
std::vector<GramEntry> gram(const HarmonicExpansion& f, const HarmonicExpansion& g, Inner inner,
                            bool skip_constant_f) {
  std::vector<GramEntry> out;
  for (const auto& [d, fd] : f.components) {
    if (skip_constant_f && d == 0) continue;
    for (const auto& [e, ge] : g.components) {
      const double v = inner(fd, ge);
      if (v != 0.0) out.push_back({laplace_eigenvalue(f.n, d), laplace_eigenvalue(g.n, e), v});
    }
  }
  return out;
}

double spectral_covariance(const HarmonicExpansion& f, const HarmonicExpansion& g) {
  double s = 0.0;
  for (const auto& [d, fd] : f.components) {
    if (d == 0) continue;
    const auto it = g.components.find(d);
    if (it != g.components.end()) s += l2_inner(fd, it->second);
  }
  return s;
}

}  // namespace

SemigroupCovariance semigroup_covariance(const HarmonicExpansion& f, const HarmonicExpansion& g) {
  require_same_dimension(f, g);
  require_semigroup_scope(f.n);
  SemigroupCovariance r;
  r.spectral = spectral_covariance(f, g);
  const auto a = gram(f, g, gradient_inner, false);
  if (a.empty()) return r;
  r.integrated = integrate_half_line(
      [&](double t) {
        double s = 0.0;
        for (const auto& x : a) s += std::exp(-x.lambda_g * t) * x.value;
        return s;
      },
      &r.quad_error);
  return r;
}

SecondOrderSemigroupCovariance second_order_semigroup_covariance(const HarmonicExpansion& f,
                                                                 const HarmonicExpansion& g) {
  require_same_dimension(f, g);
  require_semigroup_scope(f.n);
  SecondOrderSemigroupCovariance r;
  r.spectral = spectral_covariance(f, g);
  const auto gm = gram(f, g, l2_inner, true);
  if (gm.empty()) return r;
  r.laplacian_path = integrate_half_line([&](double t) {
    double s = 0.0;
    for (const auto& x : gm) s += x.lambda_f * std::exp(-x.lambda_f * t) * x.lambda_g * x.value;
    return t * s;
  });
  r.bilaplacian_path = integrate_half_line([&](double t) {
    double s = 0.0;
    for (const auto& x : gm) s += std::exp(-x.lambda_f * t) * x.lambda_g * x.lambda_g * x.value;
    return t * s;
  });
  return r;
}

double heat_kernel(int n, double t, double alpha, int max_degree) {
  if (n < 3) throw ScopeError("heat kernel via Gegenbauer polynomials requires n >= 3");
  const double nu = 0.5 * (n - 2);
  // C_d^nu by the three-term recurrence.
  double c_prev = 1.0;
  double c = 2.0 * nu * alpha;
  double sum = 1.0;
  if (max_degree >= 1) sum += std::exp(-laplace_eigenvalue(n, 1) * t) * (1.0 + 1.0 / nu) * c;
  for (int d = 2; d <= max_degree; ++d) {
    const double next = (2.0 * alpha * (d + nu - 1.0) * c - (d + 2.0 * nu - 2.0) * c_prev) / d;
    c_prev = c;
    c = next;
    sum += std::exp(-laplace_eigenvalue(n, d) * t) * (1.0 + d / nu) * c;
  }
  return sum;
}

double heat_kernel_tail(int n, double t, int max_degree) {
  if (n < 3) throw ScopeError("heat kernel via Gegenbauer polynomials requires n >= 3");
  const double nu = 0.5 * (n - 2);
  if (!(t > 0.0)) return std::numeric_limits<double>::infinity();
  double tail = 0.0;
  for (int d = max_degree + 1; d < max_degree + 100000; ++d) {
    const double dim = (1.0 + d / nu) * boost::math::binomial_coefficient<double>(
                                            static_cast<unsigned>(d + n - 3),
                                            static_cast<unsigned>(d));
    const double term = std::exp(std::log(dim) - laplace_eigenvalue(n, d) * t);
    tail += term;
    if (term < 1e-18 * std::max(tail, 1e-300)) break;
  }
  return tail;
}

BakryEmeryResult bakry_emery_check(const Polynomial& f, const SpherePoint& theta, double t,
                                   std::size_t samples, std::uint64_t seed, Execution exec) {
  const int n = f.dimension();
  if (theta.dimension() != n) throw InputError("dimension mismatch in bakry_emery_check");
  if (n < 3) throw ScopeError("Bakry-Emery check uses the heat kernel, which requires n >= 3");
  const HarmonicExpansion pt = heat_semigroup(harmonic_decompose(f), t);
  BakryEmeryResult r;
  r.lhs = spherical_gradient(pt.to_polynomial(), theta).norm();

  const JetEvaluator jet(f);
  const double* th = theta.data();
  const Moments m = monte_carlo(
      samples, seed, 2,
      [&](Rng& rng, std::span<double> out) {
        thread_local std::vector<double> y, grad, g;
        y.resize(static_cast<std::size_t>(n));
        grad.resize(static_cast<std::size_t>(n));
        g.resize(static_cast<std::size_t>(n));
        draw_sphere(rng, y);
        jet.gradient(y.data(), grad.data());
        kernels::spherical_gradient(grad.data(), y.data(), n, g.data());
        const double norm = std::sqrt(dot(g, g));
        out[0] = heat_kernel(n, t, dot(y, std::span<const double>(th, static_cast<std::size_t>(n)))) * norm;
        out[1] = norm;
      },
      exec);
  const double decay = std::exp(-(n - 2) * t);
  // sup |grad_S f| bounded by the sum of |coefficient| * degree over terms.
  double lip = 0.0;
  for (const auto& [e, c] : f.terms()) {
    int deg = 0;
    for (int p : e) deg += p;
    lip += std::abs(c) * deg;
  }
  r.rhs = decay * m.mean(0);
  r.rhs_stderr = decay * m.standard_error(0);
  r.truncation = decay * heat_kernel_tail(n, t) * lip;
  r.samples = m.count();
  r.pass = r.lhs <= r.rhs + 4.0 * r.rhs_stderr + r.truncation;
  return r;
}

}  // namespace sphcov
