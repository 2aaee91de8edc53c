#include "sphcov/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "sphcov/errors.hpp"

namespace sphcov {

namespace {

constexpr double kPi = std::numbers::pi;

using boost::math::tgamma_delta_ratio;

// One integrator per nesting level: an integrator may grow its abscissa
// tables during a call, so nested integrals must not share one.
boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule(int level) {
  thread_local boost::math::quadrature::tanh_sinh<double> rules[3] = {
      boost::math::quadrature::tanh_sinh<double>(18),
      boost::math::quadrature::tanh_sinh<double>(18),
      boost::math::quadrature::tanh_sinh<double>(18)};
  return rules[level];
}

// For a tanh-sinh node x on (0, 1) with complement xc, returns 1 - x.
inline double one_minus(double x, double xc) { return x > 0.5 ? xc : 1.0 - x; }

void check_alpha(double alpha) {
  if (!(std::abs(alpha) <= 1.0)) throw InputError("alpha must satisfy |alpha| <= 1");
}

void check_scope(int n, int order) {
  if (order == 1) {
    if (n < 2) throw ScopeError("first-order spherical mixing density requires n >= 2");
  } else if (order == 2) {
    if (n < 5) throw ScopeError("second-order identity requires n >= 5, Thm 13.1");
  } else {
    throw InputError("order must be 1 or 2");
  }
}

// log of 1 / (2^{n-2} Gamma(n/2)^2).
double log_prefactor(int n) { return -(n - 2) * std::numbers::ln2 - 2.0 * std::lgamma(0.5 * n); }

// Radial power m in the double integral.
int radial_power(int n, int order) { return order == 1 ? n - 2 : n - 3; }

template <class Weight>
DensityValue gauss_density(int n, std::span<const double> x, std::span<const double> y,
                           Weight weight, bool diverges_on_diagonal) {
  if (n < 1) throw InputError("Gaussian mixing density requires n >= 1");
  if (x.size() != static_cast<std::size_t>(n) || y.size() != static_cast<std::size_t>(n)) {
    throw InputError("point dimension does not match n");
  }
  double diff2 = 0.0, xy = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InputError("non-finite coordinate");
    diff2 += (x[i] - y[i]) * (x[i] - y[i]);
    xy += x[i] * y[i];
  }
  if (diff2 == 0.0 && diverges_on_diagonal) {
    return {std::numeric_limits<double>::quiet_NaN(), true};
  }
  const double log_norm = -n * std::log(2.0 * kPi);
  // |x|^2 + |y|^2 - 2t<x,y> = |x - y|^2 + 2(1 - t)<x,y>.
  auto integrand = [&](double t, double tc) {
    const double u = one_minus(t, tc);
    const double s2 = u * (1.0 + t);
    const double q = diff2 + 2.0 * u * xy;
    const double e = log_norm - 0.5 * n * std::log(s2) - q / (2.0 * s2);
    return weight(u) * std::exp(e);
  };
  const double v = tanh_sinh_rule(0).integrate(integrand, 0.0, 1.0, 1e-12);
  return {v, false};
}

}  // namespace

DensityValue gauss_density_p(int n, std::span<const double> x, std::span<const double> y) {
  return gauss_density(n, x, y, [](double) { return 1.0; }, n >= 2);
}

DensityValue gauss_density_q(int n, std::span<const double> x, std::span<const double> y) {
  return gauss_density(n, x, y, [](double u) { return u; }, n >= 4);
}

namespace {

// Coefficients a_k of psi(alpha) = sum_k a_k alpha^k. They do not depend on
// alpha and are grown on demand; readers hold an immutable snapshot.
class SeriesCoefficients {
 public:
  SeriesCoefficients(int n, int order) : n_(n), order_(order) {
    m_ = radial_power(n, order);
    b_ = order == 1 ? 0.5 * n : 0.5 * (n - 2);
    // a_0 = C M^2_m B_0 (order 1) or C M^2_m (B_0 - B_1) (order 2), where
    // B_k = int_0^1 t^k (1-t^2)^{b-1} dt = B((k+1)/2, b)/2.
    rho_ = beta_ratio(0);
    double log_b0 = std::log(0.5) + std::lgamma(0.5) + std::lgamma(b_) - std::lgamma(0.5 + b_);
    if (order == 2) log_b0 += std::log1p(-rho_);
    const double log_m0 = (m_ - 1) * std::numbers::ln2 + 2.0 * std::lgamma(0.5 * (m_ + 1));
    auto first = std::make_shared<std::vector<double>>();
    first->push_back(std::exp(log_prefactor(n) + log_m0 + log_b0));
    data_ = std::move(first);
  }

  std::shared_ptr<const std::vector<double>> at_least(std::size_t count) {
    std::lock_guard lock(mutex_);
    if (data_->size() < count) {
      auto grown = std::make_shared<std::vector<double>>(*data_);
      const std::size_t target = std::max(count, 2 * grown->size());
      grown->reserve(target);
      while (grown->size() < target) {
        const int k = static_cast<int>(grown->size()) - 1;
        const double rho_next = beta_ratio(k + 1);
        // B_{k+1}/B_k, or W_{k+1}/W_k = rho_k (1 - rho_{k+1}) / (1 - rho_k) for
        // W_k = B_k - B_{k+1}.
        const double weight_ratio = order_ == 1 ? rho_ : rho_ * (1.0 - rho_next) / (1.0 - rho_);
        rho_ = rho_next;
        // M^2_{p+1}/M^2_p = 2 Gamma((p+2)/2)^2 / Gamma((p+1)/2)^2.
        const double r = tgamma_delta_ratio(0.5 * (m_ + k + 1), 0.5);
        grown->push_back(grown->back() * weight_ratio * 2.0 / (r * r) / (k + 1.0));
      }
      data_ = std::move(grown);
    }
    return data_;
  }

  static SeriesCoefficients& get(int n, int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<SeriesCoefficients>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{n, order}];
    if (!slot) slot = std::make_unique<SeriesCoefficients>(n, order);
    return *slot;
  }

 private:
  double beta_ratio(int k) const {  // B_{k+1} / B_k
    const double a = 0.5 * (k + 1);
    return tgamma_delta_ratio(a + b_, 0.5) / tgamma_delta_ratio(a, 0.5);
  }

  int n_, order_, m_;
  double b_, rho_;
  std::mutex mutex_;
  std::shared_ptr<const std::vector<double>> data_;
};

constexpr std::size_t kMaxSeriesTerms = std::size_t{1} << 23;

}  // namespace

PsiResult psi_series(int n, double alpha, int order) {
  check_scope(n, order);
  if (!(std::abs(alpha) < 1.0)) throw InputError("series backend requires |alpha| < 1");
  auto& source = SeriesCoefficients::get(n, order);
  auto coeff = source.at_least(1024);
  PsiResult r;
  double sum = (*coeff)[0];
  double power = 1.0;
  if (alpha == 0.0) {
    r.value = sum;
    r.terms = 1;
    return r;
  }
  // Stop once the term ratio q is below 1 and the geometric majorant of the
  // tail, |next| / (1 - q) with q = max(ratio, |alpha|), is negligible. The
  // term ratios tend to |alpha| monotonically.
  for (std::size_t k = 0; k + 1 < kMaxSeriesTerms; ++k) {
    if (k + 1 >= coeff->size()) coeff = source.at_least(k + 2);
    const double term = (*coeff)[k] * power;
    power *= alpha;
    const double next = (*coeff)[k + 1] * power;
    const double q = std::max(std::abs(next / term), std::abs(alpha));
    r.terms = k + 1;
    if (q < 1.0) {
      const double tail = std::abs(next) / (1.0 - q);
      if (k >= 8 && tail <= 1e-13 * std::abs(sum)) {
        r.value = sum;
        r.error = tail;
        return r;
      }
    }
    sum += next;
  }
  throw ScopeError("psi series did not converge; |alpha| too close to 1 for the series backend");
}

PsiResult psi_quadrature(int n, double alpha, int order) {
  check_scope(n, order);
  check_alpha(alpha);
  const int m = radial_power(n, order);
  if (alpha == 1.0 && m >= 1) {
    // Non-integrable corner singularity: psi diverges at alpha = 1 for n >= 3.
    return {std::numeric_limits<double>::infinity(), 0.0, 0};
  }
  const double log_c = log_prefactor(n) + std::lgamma(m + 1.0);
  auto& outer_rule = tanh_sinh_rule(1);
  auto& inner_rule = tanh_sinh_rule(2);
  // int_0^1 w^m (1 - beta w)^{-(m+1)} (1 - w^2)^{-1/2} dw, given 1 - beta.
  auto inner = [&](double one_minus_beta) {
    auto f = [&](double w, double wc) {
      const double u = one_minus(w, wc);
      const double denom = u + w * one_minus_beta;  // 1 - beta w
      const double v = std::pow(w / denom, m) / (denom * std::sqrt(u * (1.0 + w)));
      // Overflow only happens at nodes whose weight underflows to zero.
      return std::isfinite(v) ? v : 0.0;
    };
    return inner_rule.integrate(f, 0.0, 1.0, 1e-12);
  };
  auto outer = [&](double t, double tc) {
    const double u = one_minus(t, tc);
    const double s2 = u * (1.0 + t);
    double weight = order == 1 ? std::pow(s2, 0.5 * m) : u * std::pow(s2, 0.5 * (n - 4));
    // 1 - t alpha = (1 - t) alpha + (1 - alpha)
    const double v = weight * inner(u * alpha + (1.0 - alpha));
    return std::isfinite(v) ? v : 0.0;
  };
  PsiResult r;
  double err = 0.0;
  const double v = outer_rule.integrate(outer, 0.0, 1.0, 1e-10, &err);
  const double c = std::exp(log_c);
  r.value = c * v;
  r.error = c * err;
  return r;
}

double psi_sphere(int n, double alpha, int order, PsiBackend backend) {
  check_scope(n, order);
  check_alpha(alpha);
  if (backend == PsiBackend::automatic) {
    backend = std::abs(alpha) <= 0.95 ? PsiBackend::series : PsiBackend::quadrature;
  }
  return backend == PsiBackend::series ? psi_series(n, alpha, order).value
                                       : psi_quadrature(n, alpha, order).value;
}

namespace {

// Evaluator for integrals and tables over the whole range. Past 0.999 the
// series needs tens of thousands of coefficients per (n, order), and the
// quadrature is cheaper.
double psi_tabulation(int n, double alpha, int order) {
  if (std::abs(alpha) <= 0.999) return psi_series(n, alpha, order).value;
  return psi_quadrature(n, alpha, order).value;
}

}  // namespace

double psi_circle_exact(double alpha) {
  check_alpha(alpha);
  const double ratio = alpha == 0.0 ? 1.0 : std::asin(alpha) / alpha;
  return 0.25 * kPi * ratio * (3.0 - 2.0 * std::acos(alpha) / kPi);
}

double psi_circle_from_kernel(double alpha) {
  check_alpha(alpha);
  const double h = std::acos(alpha) / (2.0 * kPi);
  const double k = (4.0 * h - 1.0) * (4.0 * h - 3.0) / 32.0;
  return 4.0 * kPi * kPi * k / alpha;
}

double psi2_log_integral(double alpha) {
  check_alpha(alpha);
  boost::math::quadrature::exp_sinh<double> rule;
  if (alpha == 0.0) {
    return rule.integrate([](double z) { return 1.0 / ((2.0 + z) * std::sqrt(1.0 + z)); }, 1e-13);
  }
  auto f = [alpha](double z) {
    // log(1 + z/2) - log(1 + (1-alpha) z/2) = log1p(alpha z/2 / (1 + (1-alpha) z/2))
    const double d = std::log1p(0.5 * alpha * z / (1.0 + 0.5 * (1.0 - alpha) * z));
    return d / (z * std::sqrt(1.0 + z));
  };
  return rule.integrate(f, 1e-13) / alpha;
}

double circle_total_mass() {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [](double h) {
    const double k = (4.0 * h - 1.0) * (4.0 * h - 3.0) / 32.0;
    return k * (1.0 - h) / std::cos(2.0 * kPi * h);
  };
  double total = 0.0;
  for (auto [a, b] : {std::pair{0.0, 0.25}, std::pair{0.25, 0.75}, std::pair{0.75, 1.0}}) {
    total += gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14);
  }
  return 2.0 * 4.0 * kPi * kPi * total;
}

namespace {

// int g(alpha, psi(alpha)) w_n(alpha) d alpha in the variable phi = acos(alpha),
// where the integrand is psi(cos phi) sin^{n-2}(phi). The middle range uses
// adaptive Gauss-Kronrod on the series. The two end caps use fixed
// Gauss-Legendre rules of two orders; the cap at phi = 0, where psi is
// singular for n >= 3, goes through phi = phi_c v^2.
template <class G>
double integrate_against_mu(int n, int order, G g, double tolerance, double* error) {
  using boost::math::quadrature::gauss;
  const double log_norm = std::lgamma(0.5 * n) - 0.5 * std::log(kPi) - std::lgamma(0.5 * (n - 1));
  auto h = [&](double phi) {
    const double alpha = std::cos(phi);
    if (alpha == 1.0 && n >= 3) return 0.0;  // psi is infinite, the weight is zero
    const double jac = n == 2 ? 1.0 : std::pow(std::sin(phi), n - 2);
    return g(alpha, psi_tabulation(n, alpha, order)) * jac;
  };
  const double phi_c = std::acos(0.99);
  double err = 0.0;
  const double middle = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      h, phi_c, kPi - phi_c, 15, 0.1 * tolerance, &err);
  auto left = [&](double v) { return 2.0 * phi_c * v * h(phi_c * v * v); };
  const double left_hi = gauss<double, 20>::integrate(left, 0.0, 1.0);
  const double left_lo = gauss<double, 10>::integrate(left, 0.0, 1.0);
  const double right_hi = gauss<double, 20>::integrate(h, kPi - phi_c, kPi);
  const double right_lo = gauss<double, 10>::integrate(h, kPi - phi_c, kPi);
  const double norm = std::exp(log_norm);
  if (error) {
    *error = norm * (err + std::abs(left_hi - left_lo) + std::abs(right_hi - right_lo));
  }
  return norm * (middle + left_hi + right_hi);
}

}  // namespace

MixingConstant mixing_constant(int n, int order, double tolerance) {
  check_scope(n, order);
  MixingConstant c;
  c.n = n;
  c.order = order;
  c.value = integrate_against_mu(
      n, order, [](double, double psi) { return psi; }, tolerance, &c.error);
  if (order == 1) {
    c.lower = 1.0 / (n - 1);
    c.upper = n == 2 ? kPi : 1.0 / (n - 2);
  } else {
    c.lower = 1.0 / (n * (n + 2.0));
    c.upper = 1.0 / ((n - 2.0) * (n - 4.0));
  }
  c.within_bounds = c.lower < c.value && c.value < c.upper;
  return c;
}

double mu_second_moment(int n, int order, double tolerance) {
  check_scope(n, order);
  const double m2 = integrate_against_mu(
      n, order, [](double a, double psi) { return a * a * psi; }, tolerance, nullptr);
  return m2 / mixing_constant(n, order, tolerance).value;
}

double asymptotic_profile(int n, double alpha) {
  if (n < 3) throw ScopeError("boundary asymptotics are stated for n >= 3");
  if (!(alpha < 1.0)) throw InputError("asymptotic profile requires alpha < 1");
  if (n == 3) return std::log(1.0 / (1.0 - alpha));
  return std::pow(1.0 - alpha, -0.5 * (n - 3));
}

std::vector<std::pair<double, double>> asymptotic_ratio(int n, std::span<const double> alpha_grid) {
  if (n < 3) throw ScopeError("boundary asymptotics are stated for n >= 3");
  std::vector<std::pair<double, double>> out;
  for (double a : alpha_grid) {
    if (!(a >= 0.9 && a < 1.0)) throw InputError("asymptotic grid must lie in [0.9, 1)");
    out.emplace_back(a, psi_sphere(n, a, 1) / asymptotic_profile(n, a));
  }
  return out;
}

void draw_pi_pair(Rng& rng, std::span<double> x, std::span<double> y) {
  const double t = draw_uniform(rng);
  const double s = std::sqrt((1.0 - t) * (1.0 + t));
  draw_normal(rng, x);
  draw_normal(rng, y);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = t * x[i] + s * y[i];
}

double draw_kappa_pair(Rng& rng, std::span<double> x, std::span<double> y) {
  const double t = 1.0 - std::sqrt(1.0 - draw_uniform(rng));
  const double s = std::sqrt((1.0 - t) * (1.0 + t));
  draw_normal(rng, x);
  draw_normal(rng, y);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = t * x[i] + s * y[i];
  return t;
}

std::vector<VectorPair> sample_pi_n(int n, std::size_t count, std::uint64_t seed,
                                    Execution exec) {
  if (n < 1) throw InputError("sample_pi_n requires n >= 1");
  return generate<VectorPair>(
      count, seed,
      [n](Rng& rng) {
        VectorPair p{std::vector<double>(n), std::vector<double>(n)};
        draw_pi_pair(rng, p.x, p.y);
        return p;
      },
      exec);
}

std::vector<WeightedPair> sample_kappa_n(int n, std::size_t count, std::uint64_t seed,
                                         Execution exec) {
  if (n < 1) throw InputError("sample_kappa_n requires n >= 1");
  return generate<WeightedPair>(
      count, seed,
      [n](Rng& rng) {
        WeightedPair p{std::vector<double>(n), std::vector<double>(n), 0.0, 0.5};
        p.t = draw_kappa_pair(rng, p.x, p.y);
        return p;
      },
      exec);
}

MuSampler::MuSampler(int n, int order) : n_(n), order_(order) {
  check_scope(n, order);
  phi_.resize(kCells + 1);
  cdf_.assign(kCells + 1, 0.0);
  for (int i = 0; i <= kCells; ++i) phi_[i] = kPi * i / kCells;
  auto density = [&](double phi) {
    const double jac = n == 2 ? 1.0 : std::pow(std::sin(phi), n - 2);
    return psi_tabulation(n, std::cos(phi), order) * jac;
  };
  using Rule = boost::math::quadrature::gauss<double, 5>;
  for (int i = 0; i < kCells; ++i) {
    cdf_[i + 1] = cdf_[i] + Rule::integrate(density, phi_[i], phi_[i + 1]);
  }
  const double total = cdf_[kCells];
  for (double& c : cdf_) c /= total;
  cdf_[kCells] = 1.0;
}

double MuSampler::cdf(double alpha) const {
  check_alpha(alpha);
  const double phi = std::acos(alpha);
  auto it = std::upper_bound(phi_.begin(), phi_.end(), phi);
  if (it == phi_.end()) return 0.0;
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - phi_.begin() - 1, 0));
  const double frac = (phi - phi_[i]) / (phi_[i + 1] - phi_[i]);
  const double f_phi = cdf_[i] + frac * (cdf_[i + 1] - cdf_[i]);
  return 1.0 - f_phi;
}

double MuSampler::draw_alpha(Rng& rng) const {
  const double u = draw_uniform(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto i = static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(it - cdf_.begin() - 1, 0, kCells - 1));
  const double width = cdf_[i + 1] - cdf_[i];
  const double frac = width > 0.0 ? (u - cdf_[i]) / width : 0.5;
  return std::cos(phi_[i] + frac * (phi_[i + 1] - phi_[i]));
}

double MuSampler::draw(Rng& rng, std::span<double> x, std::span<double> y) const {
  const double alpha = draw_alpha(rng);
  draw_sphere(rng, x);
  // u: normalised projection of a Gaussian vector onto x-perp.
  double norm2 = 0.0;
  do {
    draw_normal(rng, y);
    double proj = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) proj += y[i] * x[i];
    norm2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      y[i] -= proj * x[i];
      norm2 += y[i] * y[i];
    }
  } while (norm2 < 1e-24);
  const double scale = std::sqrt(std::max(0.0, (1.0 - alpha) * (1.0 + alpha)) / norm2);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = alpha * x[i] + scale * y[i];
  return alpha;
}

std::shared_ptr<const MuSampler> MuSampler::get(int n, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MuSampler>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, order}];
  if (!slot) slot = std::make_shared<const MuSampler>(n, order);
  return slot;
}

std::vector<std::pair<SpherePoint, SpherePoint>> sample_mu_n(int n, std::size_t count,
                                                             std::uint64_t seed, int order,
                                                             Execution exec) {
  const auto sampler = MuSampler::get(n, order);
  auto raw = generate<VectorPair>(
      count, seed,
      [&](Rng& rng) {
        VectorPair p{std::vector<double>(n), std::vector<double>(n)};
        sampler->draw(rng, p.x, p.y);
        return p;
      },
      exec);
  std::vector<std::pair<SpherePoint, SpherePoint>> out;
  out.reserve(count);
  for (auto& p : raw) out.emplace_back(SpherePoint(std::move(p.x)), SpherePoint(std::move(p.y)));
  return out;
}

}  // namespace sphcov
