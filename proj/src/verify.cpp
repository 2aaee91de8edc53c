#include "sphcov/verify.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "sphcov/errors.hpp"
#include "sphcov/harmonics.hpp"
#include "sphcov/hoeffding.hpp"
#include "sphcov/mixing.hpp"
#include "sphcov/sphere.hpp"

namespace sphcov {

namespace {

constexpr double kPi = std::numbers::pi;

void require_same_dimension(const Polynomial& f, const Polynomial& g) {
  if (f.dimension() != g.dimension()) throw InputError("f and g have different dimensions");
}

void require_samples(const CheckOptions& opt) {
  if (opt.samples < 1) throw InputError("samples must be >= 1");
}

double exact_covariance_sphere(const Polynomial& f, const Polynomial& g) {
  return sphere_mean(f * g) - sphere_mean(f) * sphere_mean(g);
}

double exact_covariance_gauss(const Polynomial& u, const Polynomial& v) {
  return gaussian_mean(u * v) - gaussian_mean(u) * gaussian_mean(v);
}

std::string pair_note(const Polynomial& f, const Polynomial& g) {
  return "f=" + f.to_string() + " g=" + g.to_string();
}

double hs_inner(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void require_no_linear_component(const Polynomial& f, const char* name) {
  if (f.is_zero()) return;
  const Polynomial lin = harmonic_decompose(f).component(1);
  if (!lin.is_zero() && lin.max_abs_coefficient() > 1e-10 * std::max(1.0, f.max_abs_coefficient())) {
    throw InputError(std::string(name) + " has a nonzero linear harmonic component");
  }
}

// Per-sample spherical derivatives of a polynomial at a unit vector.
struct SphericalJet {
  explicit SphericalJet(const Polynomial& p) : jet(p), n(p.dimension()) {}

  void gradient(const double* theta, double* out) const {
    thread_local std::vector<double> grad;
    grad.resize(static_cast<std::size_t>(n));
    jet.gradient(theta, grad.data());
    kernels::spherical_gradient(grad.data(), theta, n, out);
  }
  void hessian(const double* theta, double* out) const {
    const Jet j = jet.evaluate(theta, true);
    kernels::spherical_hessian(j.gradient.data(), j.hessian.data(), theta, n, out);
  }
  void d_operator(const double* theta, double* out) const {
    const Jet j = jet.evaluate(theta, true);
    kernels::d_operator(j.gradient.data(), j.hessian.data(), theta, n, out);
  }

  JetEvaluator jet;
  int n;
};

}  // namespace

double cached_mixing_constant(int n, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, double> cache;
  {
    std::lock_guard lock(mutex);
    const auto it = cache.find({n, order});
    if (it != cache.end()) return it->second;
  }
  const double c = mixing_constant(n, order).value;
  std::lock_guard lock(mutex);
  cache.emplace(std::pair{n, order}, c);
  return c;
}

VerificationReport check_gauss_first(const Polynomial& u, const Polynomial& v,
                                     const CheckOptions& opt) {
  require_same_dimension(u, v);
  require_samples(opt);
  const int n = u.dimension();
  const JetEvaluator ju(u), jv(v);
  const Moments m = monte_carlo(
      opt.samples, opt.seed, 1,
      [&](Rng& rng, std::span<double> out) {
        thread_local std::vector<double> x, y, gu, gv;
        for (auto* w : {&x, &y, &gu, &gv}) w->resize(static_cast<std::size_t>(n));
        draw_pi_pair(rng, x, y);
        ju.gradient(x.data(), gu.data());
        jv.gradient(y.data(), gv.data());
        out[0] = dot(gu, gv);
      },
      opt.exec);
  return equality_report("gauss1", n, exact_covariance_gauss(u, v), m.mean(0), m.standard_error(0),
                         opt.atol, m.count(), opt.seed, pair_note(u, v));
}

VerificationReport check_gauss_second(const Polynomial& u, const Polynomial& v,
                                      const CheckOptions& opt) {
  require_same_dimension(u, v);
  require_samples(opt);
  const int n = u.dimension();
  double mean_grad = 0.0;
  for (int i = 0; i < n; ++i) mean_grad += gaussian_mean(u.derivative(i)) * gaussian_mean(v.derivative(i));
  const JetEvaluator ju(u), jv(v);
  const Moments m = monte_carlo(
      opt.samples, opt.seed, 1,
      [&](Rng& rng, std::span<double> out) {
        thread_local std::vector<double> x, y;
        x.resize(static_cast<std::size_t>(n));
        y.resize(static_cast<std::size_t>(n));
        draw_kappa_pair(rng, x, y);
        out[0] = hs_inner(ju.evaluate(x.data()).hessian, jv.evaluate(y.data()).hessian);
      },
      opt.exec);
  return equality_report("gauss2", n, exact_covariance_gauss(u, v), mean_grad + 0.5 * m.mean(0),
                         0.5 * m.standard_error(0), opt.atol, m.count(), opt.seed, pair_note(u, v));
}

VerificationReport check_gauss_fourier(std::span<const double> t, std::span<const double> s,
                                       const CheckOptions& opt) {
  if (t.size() != s.size() || t.empty()) throw InputError("frequencies must have equal length >= 1");
  require_samples(opt);
  const int n = static_cast<int>(t.size());
  const double ts = dot(t, s);
  const double ratio = std::abs(ts) < 1e-12 ? 1.0 - 0.5 * ts : -std::expm1(-ts) / ts;
  const double exact = std::exp(-0.5 * (dot(t, t) + dot(s, s))) * ratio;
  const Moments m = monte_carlo(
      opt.samples, opt.seed, 1,
      [&](Rng& rng, std::span<double> out) {
        thread_local std::vector<double> x, y;
        x.resize(static_cast<std::size_t>(n));
        y.resize(static_cast<std::size_t>(n));
        draw_pi_pair(rng, x, y);
        out[0] = std::cos(dot(t, x) + dot(s, y));
      },
      opt.exec);
  std::ostringstream notes;
  notes << "<t,s>=" << ts;
  return equality_report("gauss_fourier", n, m.mean(0), exact, m.standard_error(0), 0.0, m.count(),
                         opt.seed, notes.str());
}

VerificationReport check_sphere_first(const Polynomial& f, const Polynomial& g,
                                      const CheckOptions& opt) {
  require_same_dimension(f, g);
  require_samples(opt);
  const int n = f.dimension();
  if (n < 2) throw ScopeError("spherical identity requires n >= 2");
  const double c = cached_mixing_constant(n, 1);
  const auto sampler = MuSampler::get(n, 1);
  const SphericalJet sf(f), sg(g);
  const Moments m = monte_carlo(
      opt.samples, opt.seed, 1,
      [&](Rng& rng, std::span<double> out) {
        thread_local std::vector<double> x, y, gf, gg;
        for (auto* w : {&x, &y, &gf, &gg}) w->resize(static_cast<std::size_t>(n));
        sampler->draw(rng, x, y);
        sf.gradient(x.data(), gf.data());
        sg.gradient(y.data(), gg.data());
        out[0] = dot(gf, gg);
      },
      opt.exec);
  std::ostringstream notes;
  notes << pair_note(f, g) << " c_n=" << format_double(c);
  return equality_report("sphere1", n, exact_covariance_sphere(f, g), c * m.mean(0),
                         c * m.standard_error(0), opt.atol, m.count(), opt.seed, notes.str());
}

VerificationReport check_sphere_second(const Polynomial& f, const Polynomial& g,
                                       const CheckOptions& opt) {
  require_same_dimension(f, g);
  require_samples(opt);
  const int n = f.dimension();
  if (n < 5) throw ScopeError("second-order identity requires n >= 5, Thm 13.1");
  require_no_linear_component(f, "f");
  require_no_linear_component(g, "g");
  const double c = cached_mixing_constant(n, 2);
  const auto sampler = MuSampler::get(n, 2);
  const SphericalJet sf(f), sg(g);
  const std::size_t nn = static_cast<std::size_t>(n * n);
  const Moments m = monte_carlo(
      opt.samples, opt.seed, 1,
      [&](Rng& rng, std::span<double> out) {
        thread_local std::vector<double> x, y, df, dg;
        x.resize(static_cast<std::size_t>(n));
        y.resize(static_cast<std::size_t>(n));
        df.resize(nn);
        dg.resize(nn);
        sampler->draw(rng, x, y);
        sf.d_operator(x.data(), df.data());
        sg.d_operator(y.data(), dg.data());
        out[0] = hs_inner(df, dg);
      },
      opt.exec);
  std::ostringstream notes;
  notes << pair_note(f, g) << " c_n=" << format_double(c);
  return equality_report("sphere2", n, exact_covariance_sphere(f, g), c * m.mean(0),
                         c * m.standard_error(0), opt.atol, m.count(), opt.seed, notes.str());
}

VerificationReport check_poincare(const Polynomial& f, const CheckOptions& opt) {
  const int n = f.dimension();
  if (n < 2) throw ScopeError("Poincare inequality on the sphere requires n >= 2");
  const double c = cached_mixing_constant(n, 1);
  const double var = exact_covariance_sphere(f, f);
  const double energy = gradient_inner(f, f);
  std::ostringstream notes;
  notes << "f=" << f.to_string() << " c_n=" << format_double(c);
  if (energy > 0.0) {
    notes << " ratio=" << format_double(var / energy)
          << " sharp=" << format_double(1.0 / (n - 1));
  }
  // Both sides are exact moments; the slack only absorbs rounding.
  const double slack = 1e-12 * std::max(1.0, std::abs(c * energy));
  return inequality_report("poincare", n, var, c * energy, 0.0, slack, 0, opt.seed, notes.str());
}

namespace {

// L^p norm from the Monte Carlo mean m of |X|^p, with a delta-method
// standard error.
std::pair<double, double> lp_norm(double mean, double se, double p) {
  if (mean <= 0.0) return {0.0, 0.0};
  const double norm = std::pow(mean, 1.0 / p);
  return {norm, norm * se / (p * mean)};
}

}  // namespace

std::vector<VerificationReport> check_covariance_bounds(const Polynomial& f, const Polynomial& g,
                                                        double p, const CheckOptions& opt) {
  require_same_dimension(f, g);
  require_samples(opt);
  if (!(p > 1.0) || !std::isfinite(p)) throw InputError("covbounds needs 1 < p < inf");
  const double q = p / (p - 1.0);
  const int n = f.dimension();
  if (n < 3) throw ScopeError("covariance bounds use c_n < 1/(n - 2), which requires n >= 3");
  const double c = cached_mixing_constant(n, 1);
  const double cov = exact_covariance_sphere(f, g);
  const SphericalJet sf(f), sg(g);
  const std::size_t nn = static_cast<std::size_t>(n * n);
  // Columns: |grad f|^p, |grad g|^q, ||f''||^p, ||g''||^q, ||f''||^2.
  const Moments m = monte_carlo(
      opt.samples, opt.seed, 5,
      [&](Rng& rng, std::span<double> out) {
        thread_local std::vector<double> x, gf, gg, hf, hg;
        x.resize(static_cast<std::size_t>(n));
        gf.resize(static_cast<std::size_t>(n));
        gg.resize(static_cast<std::size_t>(n));
        hf.resize(nn);
        hg.resize(nn);
        draw_sphere(rng, x);
        sf.gradient(x.data(), gf.data());
        sg.gradient(x.data(), gg.data());
        sf.hessian(x.data(), hf.data());
        sg.hessian(x.data(), hg.data());
        const double nf = std::sqrt(dot(gf, gf)), ng = std::sqrt(dot(gg, gg));
        const double hf2 = hs_inner(hf, hf), hg2 = hs_inner(hg, hg);
        out[0] = std::pow(nf, p);
        out[1] = std::pow(ng, q);
        out[2] = std::pow(hf2, 0.5 * p);
        out[3] = std::pow(hg2, 0.5 * q);
        out[4] = hf2;
      },
      opt.exec);
  const auto [gfp, gfp_se] = lp_norm(m.mean(0), m.standard_error(0), p);
  const auto [ggq, ggq_se] = lp_norm(m.mean(1), m.standard_error(1), q);
  const auto [hfp, hfp_se] = lp_norm(m.mean(2), m.standard_error(2), p);
  const auto [hgq, hgq_se] = lp_norm(m.mean(3), m.standard_error(3), q);

  std::vector<VerificationReport> out;
  std::ostringstream base;
  base << pair_note(f, g) << " p=" << format_double(p);
  {
    const double rhs = c * gfp * ggq;
    const double se = c * std::hypot(gfp_se * ggq, gfp * ggq_se);
    out.push_back(inequality_report("covbounds_first_order", n, std::abs(cov), rhs, se, 1e-12,
                                    m.count(), opt.seed, base.str()));
  }
  bool linear_free = true;
  try {
    require_no_linear_component(f, "f");
    require_no_linear_component(g, "g");
  } catch (const InputError&) {
    linear_free = false;
  }
  if (linear_free && n >= 5) {
    const double a = hfp + 2.0 * gfp, b = hgq + 2.0 * ggq;
    const double k = 1.0 / ((n - 2.0) * (n - 4.0));
    const double rhs = k * a * b;
    const double se = k * std::hypot(std::hypot(hfp_se, 2.0 * gfp_se) * b,
                                     a * std::hypot(hgq_se, 2.0 * ggq_se));
    out.push_back(inequality_report("covbounds_second_order", n, std::abs(cov), rhs, se, 1e-12,
                                    m.count(), opt.seed, base.str()));
  } else {
    out.front().notes += linear_free ? "; second-order bound needs n >= 5"
                                     : "; second-order bounds need f, g without linear component";
  }
  if (linear_free) {
    const double k = 1.0 / (2.0 * n * (n + 2.0));
    out.push_back(inequality_report("covbounds_hessian_variance", n, exact_covariance_sphere(f, f),
                                    k * m.mean(4), k * m.standard_error(4), 1e-12, m.count(),
                                    opt.seed, "f=" + f.to_string()));
  }
  return out;
}

std::vector<VerificationReport> check_semigroup_identity(const Polynomial& f, const Polynomial& g,
                                                         const CheckOptions& opt) {
  require_same_dimension(f, g);
  require_samples(opt);
  const int n = f.dimension();
  const HarmonicExpansion ef = harmonic_decompose(f), eg = harmonic_decompose(g);
  const SemigroupCovariance first = semigroup_covariance(ef, eg);
  const SecondOrderSemigroupCovariance second = second_order_semigroup_covariance(ef, eg);

  // Monte Carlo covariance with the exact means subtracted.
  const double mf = sphere_mean(f), mg = sphere_mean(g);
  const CompiledPolynomial cf(f), cg(g);
  const Moments m = monte_carlo(
      opt.samples, opt.seed, 1,
      [&](Rng& rng, std::span<double> out) {
        thread_local std::vector<double> x;
        x.resize(static_cast<std::size_t>(n));
        draw_sphere(rng, x);
        out[0] = (cf(x.data()) - mf) * (cg(x.data()) - mg);
      },
      opt.exec);
  const std::string notes = pair_note(f, g);
  const double tight = 1e-10;
  return {
      equality_report("semigroup_monte_carlo", n, first.spectral, m.mean(0), m.standard_error(0),
                      opt.atol, m.count(), opt.seed, notes),
      equality_report("semigroup_first_order_integral", n, first.spectral, first.integrated, 0.0,
                      tight, 0, opt.seed, notes),
      equality_report("semigroup_laplacian_path", n, first.spectral, second.laplacian_path, 0.0,
                      tight, 0, opt.seed, notes),
      equality_report("semigroup_bilaplacian_path", n, first.spectral, second.bilaplacian_path,
                      0.0, tight, 0, opt.seed, notes),
  };
}

std::vector<VerificationReport> check_circle(const Polynomial& f, const Polynomial& g,
                                             const CheckOptions& opt) {
  require_same_dimension(f, g);
  if (f.dimension() != 2) throw ScopeError("circle checks need n = 2");
  const double tight = 1e-10;
  const CircleTransferCheck t = circle_transfer_check(1000);
  std::vector<VerificationReport> out;
  out.push_back(equality_report("circle_transfer", 2, t.max_deviation, 0.0, 0.0, tight, 0, opt.seed,
                                "max deviation from Q(h/2pi) - 1/32 on 1000 points"));
  out.push_back(equality_report("circle_marginal_constant", 2, t.marginal_constant, 1.0 / 96.0, 0.0,
                                tight, 0, opt.seed, "marginal density of lambda over 2 pi"));
  out.push_back(equality_report("circle_total_mass", 2, circle_hoeffding_mass(), kPi * kPi / 3.0,
                                0.0, 1e-8, 0, opt.seed, "Hoeffding measure of the uniform law on (0, 2 pi)"));
  out.push_back(circle_hoeffding_representation(f, g, 1e-8));
  out.back().seed = opt.seed;
  return out;
}

std::vector<VerificationReport> check_periodic(const Polynomial& f, const Polynomial& g, double c,
                                               const CheckOptions& opt) {
  require_same_dimension(f, g);
  if (f.dimension() != 2) throw ScopeError("periodic checks take polynomials in x1, x2");
  const TrigPolynomial u = TrigPolynomial::from_circle_polynomial(f, 1.0);
  const TrigPolynomial v = TrigPolynomial::from_circle_polynomial(g, 1.0);
  std::vector<VerificationReport> out;
  out.push_back(periodic_covariance_check(u, v, c, 1e-8));
  if (c != 1.0 / 24.0) out.push_back(periodic_covariance_check(u, v, 1.0 / 24.0, 1e-8));
  for (auto& r : out) {
    r.seed = opt.seed;
    r.notes += " " + pair_note(f, g);
  }
  return out;
}

const std::vector<std::string>& identity_ids() {
  static const std::vector<std::string> ids = {"gauss1",    "gauss2",    "sphere1",
                                               "sphere2",   "poincare",  "covbounds",
                                               "semigroup", "circle",    "periodic"};
  return ids;
}

std::vector<VerificationReport> run_identity(const IdentityRequest& r) {
  const auto& o = r.options;
  if (r.id == "gauss1") return {check_gauss_first(r.f, r.g, o)};
  if (r.id == "gauss2") return {check_gauss_second(r.f, r.g, o)};
  if (r.id == "sphere1") return {check_sphere_first(r.f, r.g, o)};
  if (r.id == "sphere2") return {check_sphere_second(r.f, r.g, o)};
  if (r.id == "poincare") return {check_poincare(r.f, o)};
  if (r.id == "covbounds") return check_covariance_bounds(r.f, r.g, r.p, o);
  if (r.id == "semigroup") return check_semigroup_identity(r.f, r.g, o);
  if (r.id == "circle") return check_circle(r.f, r.g, o);
  if (r.id == "periodic") return check_periodic(r.f, r.g, r.c, o);
  throw InputError("unknown identity '" + r.id + "'");
}

}  // namespace sphcov
