#include "sphcov/hoeffding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "sphcov/errors.hpp"
#include "sphcov/mixing.hpp"

namespace sphcov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
using Rule = boost::math::quadrature::gauss<double, 20>;

// Panels per interval between breakpoints for laws with a density.
constexpr int kSubpanels = 8;

std::vector<double> refine(const std::vector<double>& breaks, int parts) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    for (int k = 0; k < parts; ++k) {
      out.push_back(breaks[i] + (breaks[i + 1] - breaks[i]) * k / parts);
    }
  }
  out.push_back(breaks.back());
  return out;
}

// int int g(x, y) over [e0, eM]^2 on the panel grid `edges`. Panels on the
// diagonal are split along x = y, where the kernels have a kink.
template <class T, class G>
T integrate_cells(const std::vector<double>& edges, G&& g) {
  T total{};
  const std::size_t m = edges.size() - 1;
  for (std::size_t i = 0; i < m; ++i) {
    const double x0 = edges[i], x1 = edges[i + 1];
    total += Rule::integrate(
        [&](double x) {
          T row{};
          for (std::size_t j = 0; j < m; ++j) {
            const double y0 = edges[j], y1 = edges[j + 1];
            auto inner = [&](double y) { return g(x, y); };
            if (i == j) {
              row += Rule::integrate(inner, y0, x) + Rule::integrate(inner, x, y1);
            } else {
              row += Rule::integrate(inner, y0, y1);
            }
          }
          return row;
        },
        x0, x1);
  }
  return total;
}

std::vector<double> panel_edges(const Distribution1D& d) {
  const auto breaks = d.breakpoints();
  return refine(breaks, d.absolutely_continuous() ? kSubpanels : 1);
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(kTwoPi); }

}  // namespace

Distribution1D Distribution1D::uniform(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw InputError("uniform requires a < b");
  Distribution1D d;
  d.kind_ = Kind::uniform;
  d.a_ = a;
  d.b_ = b;
  d.finish();
  return d;
}

Distribution1D Distribution1D::bernoulli(double a, double b, double p) {
  if (!(a < b)) throw InputError("bernoulli requires a < b");
  if (!(p > 0.0 && p < 1.0)) throw InputError("bernoulli requires 0 < p < 1");
  Distribution1D d;
  d.kind_ = Kind::bernoulli;
  d.a_ = a;
  d.b_ = b;
  d.p_ = p;
  d.finish();
  return d;
}

Distribution1D Distribution1D::gaussian(double mean, double variance) {
  if (!(variance > 0.0) || !std::isfinite(mean)) throw InputError("gaussian requires variance > 0");
  Distribution1D d;
  d.kind_ = Kind::gaussian;
  d.a_ = mean;
  d.b_ = variance;
  d.finish();
  return d;
}

Distribution1D Distribution1D::empirical(std::vector<double> samples) {
  if (samples.size() < 2) throw InputError("empirical law needs at least two samples");
  for (double v : samples) {
    if (!std::isfinite(v)) throw InputError("empirical law has a non-finite sample");
  }
  std::sort(samples.begin(), samples.end());
  if (samples.front() == samples.back()) throw InputError("empirical law is degenerate");
  Distribution1D d;
  d.kind_ = Kind::empirical;
  d.x_ = std::move(samples);
  d.finish();
  return d;
}

Distribution1D Distribution1D::table(std::vector<double> x, std::vector<double> F) {
  if (x.size() != F.size() || x.size() < 2) throw InputError("table needs matching knots, >= 2");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(F[i])) throw InputError("table has non-finite knots");
    if (i > 0 && !(x[i] > x[i - 1])) throw InputError("table knots must increase strictly");
    if (i > 0 && F[i] < F[i - 1]) throw InputError("table CDF must be nondecreasing");
  }
  if (std::abs(F.front()) > 1e-12 || std::abs(F.back() - 1.0) > 1e-12) {
    throw InputError("table CDF must run from 0 to 1");
  }
  F.front() = 0.0;
  F.back() = 1.0;
  Distribution1D d;
  d.kind_ = Kind::table;
  d.x_ = std::move(x);
  d.F_ = std::move(F);
  d.finish();
  return d;
}

Distribution1D Distribution1D::table_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open table file " + path);
  std::vector<double> x, F;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    if (!(ls >> a >> b)) {
      if (x.empty()) continue;  // header
      throw InputError("malformed table line: " + line);
    }
    x.push_back(a);
    F.push_back(b);
  }
  return table(std::move(x), std::move(F));
}

void Distribution1D::finish() {
  switch (kind_) {
    case Kind::uniform:
      mean_ = 0.5 * (a_ + b_);
      variance_ = (b_ - a_) * (b_ - a_) / 12.0;
      break;
    case Kind::bernoulli: {
      const double q = 1.0 - p_;
      mean_ = p_ * a_ + q * b_;
      variance_ = p_ * q * (b_ - a_) * (b_ - a_);
      break;
    }
    case Kind::gaussian:
      mean_ = a_;
      variance_ = b_;
      break;
    case Kind::empirical: {
      double s = 0.0;
      for (double v : x_) s += v;
      mean_ = s / x_.size();
      double s2 = 0.0;
      for (double v : x_) s2 += (v - mean_) * (v - mean_);
      variance_ = s2 / x_.size();
      break;
    }
    case Kind::table: {
      // Uniform pieces: mass w on [x0, x1].
      double m = 0.0, m2 = 0.0;
      for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
        const double w = F_[i + 1] - F_[i];
        const double x0 = x_[i], x1 = x_[i + 1];
        m += w * 0.5 * (x0 + x1);
        m2 += w * (x0 * x0 + x0 * x1 + x1 * x1) / 3.0;
      }
      mean_ = m;
      variance_ = m2 - m * m;
      break;
    }
  }
}

std::string Distribution1D::name() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::uniform: os << "uniform(" << a_ << "," << b_ << ")"; break;
    case Kind::bernoulli: os << "bernoulli(" << a_ << "," << b_ << "," << p_ << ")"; break;
    case Kind::gaussian: os << "gaussian(" << a_ << "," << b_ << ")"; break;
    case Kind::empirical: os << "empirical(" << x_.size() << ")"; break;
    case Kind::table: os << "table(" << x_.size() << ")"; break;
  }
  return os.str();
}

bool Distribution1D::absolutely_continuous() const {
  return kind_ == Kind::uniform || kind_ == Kind::gaussian || kind_ == Kind::table;
}

double Distribution1D::cdf(double x) const {
  switch (kind_) {
    case Kind::uniform:
      return std::clamp((x - a_) / (b_ - a_), 0.0, 1.0);
    case Kind::bernoulli:
      return x < a_ ? 0.0 : (x < b_ ? p_ : 1.0);
    case Kind::gaussian:
      return 0.5 * std::erfc(-(x - a_) / std::sqrt(2.0 * b_));
    case Kind::empirical: {
      const auto it = std::upper_bound(x_.begin(), x_.end(), x);
      return static_cast<double>(it - x_.begin()) / x_.size();
    }
    case Kind::table: {
      if (x <= x_.front()) return 0.0;
      if (x >= x_.back()) return 1.0;
      const auto i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
      return F_[i] + (F_[i + 1] - F_[i]) * (x - x_[i]) / (x_[i + 1] - x_[i]);
    }
  }
  return 0.0;
}

double Distribution1D::density(double x) const {
  switch (kind_) {
    case Kind::uniform:
      return (x > a_ && x < b_) ? 1.0 / (b_ - a_) : 0.0;
    case Kind::gaussian:
      return normal_pdf((x - a_) / std::sqrt(b_)) / std::sqrt(b_);
    case Kind::table: {
      if (x <= x_.front() || x >= x_.back()) return 0.0;
      const auto i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
      return (F_[i + 1] - F_[i]) / (x_[i + 1] - x_[i]);
    }
    default:
      throw InputError(name() + " has no density");
  }
}

double Distribution1D::mean_abs_deviation() const {
  return expectation(*this, [m = mean_](double x) { return std::abs(x - m); });
}

std::complex<double> Distribution1D::characteristic(double t) const {
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  auto segment = [&](double x0, double x1) -> C {
    // Mean of e^{itx} over the uniform law on [x0, x1].
    const double h = 0.5 * t * (x1 - x0);
    const double sinc = std::abs(h) < 1e-8 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
    return std::exp(i * (0.5 * t * (x0 + x1))) * sinc;
  };
  switch (kind_) {
    case Kind::uniform:
      return segment(a_, b_);
    case Kind::bernoulli:
      return p_ * std::exp(i * (t * a_)) + (1.0 - p_) * std::exp(i * (t * b_));
    case Kind::gaussian:
      return std::exp(i * (t * a_) - 0.5 * b_ * t * t);
    case Kind::empirical: {
      C s = 0.0;
      for (double v : x_) s += std::exp(i * (t * v));
      return s / static_cast<double>(x_.size());
    }
    case Kind::table: {
      C s = 0.0;
      for (std::size_t k = 0; k + 1 < x_.size(); ++k) s += (F_[k + 1] - F_[k]) * segment(x_[k], x_[k + 1]);
      return s;
    }
  }
  return 0.0;
}

std::pair<double, double> Distribution1D::support() const {
  switch (kind_) {
    case Kind::uniform:
    case Kind::bernoulli:
      return {a_, b_};
    case Kind::gaussian: {
      const double sd = std::sqrt(b_);
      return {a_ - 12.0 * sd, a_ + 12.0 * sd};
    }
    default:
      return {x_.front(), x_.back()};
  }
}

std::vector<double> Distribution1D::breakpoints() const {
  std::vector<double> out;
  switch (kind_) {
    case Kind::uniform:
    case Kind::bernoulli:
      out = {a_, b_};
      break;
    case Kind::gaussian: {
      const double sd = std::sqrt(b_);
      for (int k = -12; k <= 12; k += 2) out.push_back(a_ + k * sd);
      break;
    }
    case Kind::empirical:
      out = x_;
      out.erase(std::unique(out.begin(), out.end()), out.end());
      break;
    case Kind::table:
      out = x_;
      break;
  }
  if (absolutely_continuous() && mean_ > out.front() && mean_ < out.back()) {
    out.push_back(mean_);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return out;
}

double hoeffding_kernel(const Distribution1D& d, double x, double y) {
  return d.cdf(std::min(x, y)) * (1.0 - d.cdf(std::max(x, y)));
}

double hoeffding_marginal(const Distribution1D& d, double x) {
  const double m = d.mean();
  switch (d.kind()) {
    case Distribution1D::Kind::uniform: {
      const auto [a, b] = d.support();
      if (x <= a || x >= b) return 0.0;
      return ((b - m) * (b - m) - (x - m) * (x - m)) / (2.0 * (b - a));
    }
    case Distribution1D::Kind::bernoulli: {
      const auto [a, b] = d.support();
      if (x < a || x >= b) return 0.0;
      return (b - m) * (1.0 - d.cdf(a));
    }
    case Distribution1D::Kind::gaussian:
      return d.variance() * d.density(x);
    default:
      break;
  }
  // Sums over atoms or uniform pieces of int_{(x, inf)} (y - m) dF(y).
  const auto breaks = d.breakpoints();
  if (d.kind() == Distribution1D::Kind::empirical) {
    double s = 0.0, prev = 0.0;
    for (double v : breaks) {
      const double F = d.cdf(v);
      if (v > x) s += (v - m) * (F - prev);
      prev = F;
    }
    return s;
  }
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double x0 = std::max(breaks[i], x), x1 = breaks[i + 1];
    if (x0 >= x1) continue;
    const double rho = d.density(0.5 * (breaks[i] + x1));
    s += rho * 0.5 * ((x1 - m) * (x1 - m) - (x0 - m) * (x0 - m));
  }
  return s;
}

double stein_kernel(const Distribution1D& d, double x) {
  const double p = d.density(x);
  if (!(p > 0.0)) throw InputError("Stein kernel undefined where the density vanishes");
  return hoeffding_marginal(d, x) / p;
}

std::complex<double> hoeffding_fourier(const Distribution1D& d, double t, double s) {
  if (t == 0.0 || s == 0.0) throw InputError("hoeffding_fourier requires t, s != 0");
  return (d.characteristic(t) * d.characteristic(s) - d.characteristic(t + s)) / (t * s);
}

double hoeffding_integral(const Distribution1D& d, const std::function<double(double, double)>& g) {
  return integrate_cells<double>(panel_edges(d), [&](double x, double y) {
    return g(x, y) * hoeffding_kernel(d, x, y);
  });
}

std::complex<double> hoeffding_integral_complex(
    const Distribution1D& d, const std::function<std::complex<double>(double, double)>& g) {
  return integrate_cells<std::complex<double>>(panel_edges(d), [&](double x, double y) {
    return g(x, y) * hoeffding_kernel(d, x, y);
  });
}

double hoeffding_mass(const Distribution1D& d, double a0, double a1, double b0, double b1) {
  // Box edges join the panel grid so each cell lies inside or outside.
  auto edges = panel_edges(d);
  for (double e : {a0, a1, b0, b1}) {
    if (e > edges.front() && e < edges.back()) edges.push_back(e);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return integrate_cells<double>(edges, [&](double x, double y) {
    const bool inside = x >= a0 && x <= a1 && y >= b0 && y <= b1;
    return inside ? hoeffding_kernel(d, x, y) : 0.0;
  });
}

double hoeffding_marginal_quadrature(const Distribution1D& d, double x) {
  auto edges = panel_edges(d);
  edges.push_back(x);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
    s += Rule::integrate([&](double y) { return hoeffding_kernel(d, x, y); }, edges[j], edges[j + 1]);
  }
  return s;
}

double expectation(const Distribution1D& d, const std::function<double(double)>& g) {
  if (d.kind() == Distribution1D::Kind::bernoulli) {
    const auto [a, b] = d.support();
    const double p = d.cdf(a);
    return p * g(a) + (1.0 - p) * g(b);
  }
  if (d.kind() == Distribution1D::Kind::empirical) {
    // Atoms are the distinct sample values; F jumps by their mass.
    double s = 0.0, prev = 0.0;
    for (double v : d.breakpoints()) {
      const double F = d.cdf(v);
      s += (F - prev) * g(v);
      prev = F;
    }
    return s;
  }
  const auto edges = panel_edges(d);
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
    s += Rule::integrate([&](double x) { return g(x) * d.density(x); }, edges[j], edges[j + 1]);
  }
  return s;
}

VerificationReport stein_identity_check(const Distribution1D& d, const Polynomial& u, double atol) {
  if (u.dimension() != 1) throw InputError("stein_identity_check needs a univariate polynomial");
  if (!d.absolutely_continuous()) throw InputError("Stein kernel needs a law with a density");
  const Polynomial du = u.derivative(0);
  const double m = d.mean();
  const double lhs = expectation(d, [&](double x) { return (x - m) * u(std::span<const double>(&x, 1)); });
  const double rhs = expectation(d, [&](double x) {
    return d.density(x) > 0.0 ? stein_kernel(d, x) * du(std::span<const double>(&x, 1)) : 0.0;
  });
  return equality_report("stein", 1, lhs, rhs, 0.0, atol, 0, 0, d.name() + " u=" + u.to_string());
}

double TrigPolynomial::operator()(double x) const {
  double s = a0;
  const double w = kTwoPi / period;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double arg = w * static_cast<double>(k + 1) * x;
    s += a[k] * std::cos(arg) + b[k] * std::sin(arg);
  }
  return s;
}

double TrigPolynomial::derivative(double x) const {
  double s = 0.0;
  const double w = kTwoPi / period;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double f = w * static_cast<double>(k + 1);
    s += f * (-a[k] * std::sin(f * x) + b[k] * std::cos(f * x));
  }
  return s;
}

TrigPolynomial TrigPolynomial::from_circle_polynomial(const Polynomial& f, double period) {
  if (f.dimension() != 2) throw InputError("circle functions are polynomials in x1, x2");
  if (!(period > 0.0)) throw InputError("period must be positive");
  const int d = std::max(f.degree(), 0);
  const int nodes = 2 * d + 2;
  std::vector<double> v(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) {
    const double th = kTwoPi * j / nodes;
    const double p[2] = {std::cos(th), std::sin(th)};
    v[static_cast<std::size_t>(j)] = f(p);
  }
  TrigPolynomial t;
  t.period = period;
  for (double x : v) t.a0 += x;
  t.a0 /= nodes;
  for (int k = 1; k <= d; ++k) {
    double ca = 0.0, cb = 0.0;
    for (int j = 0; j < nodes; ++j) {
      const double th = kTwoPi * k * j / nodes;
      ca += v[static_cast<std::size_t>(j)] * std::cos(th);
      cb += v[static_cast<std::size_t>(j)] * std::sin(th);
    }
    t.a.push_back(2.0 * ca / nodes);
    t.b.push_back(2.0 * cb / nodes);
  }
  return t;
}

double trig_covariance(const TrigPolynomial& u, const TrigPolynomial& v) {
  if (u.period != v.period) throw InputError("trig polynomials have different periods");
  double s = 0.0;
  for (std::size_t k = 0; k < std::min(u.a.size(), v.a.size()); ++k) {
    s += 0.5 * (u.a[k] * v.a[k] + u.b[k] * v.b[k]);
  }
  return s;
}

double periodic_q(double h) { return 0.125 * (1.0 - 4.0 * h * (1.0 - h)); }

double periodic_k(double h) { return (4.0 * h - 1.0) * (4.0 * h - 3.0) / 32.0; }

double periodic_mixing_density(double c, double T, double x, double y) {
  if (!(T > 0.0)) throw InputError("period must be positive");
  if (!(x >= 0.0 && x < T && y >= 0.0 && y < T)) throw InputError("periodic density needs 0 <= x, y < T");
  return periodic_q(std::abs(x - y) / T) + (c - 1.0 / 24.0);
}

double periodic_marginal_constant(double c, double T, double x) {
  if (!(x >= 0.0 && x < T)) throw InputError("periodic density needs 0 <= x < T");
  auto g = [&](double y) { return periodic_mixing_density(c, T, x, std::min(y, std::nextafter(T, 0.0))); };
  return (Rule::integrate(g, 0.0, x) + Rule::integrate(g, x, T)) / T;
}

double reconstructed_mixing_density(const Distribution1D& mu, double c, double x, double y) {
  const auto [lo, hi] = mu.support();
  if (lo < 0.0 || hi > 1.0) throw InputError("reconstruction needs a law on [0, 1)");
  return hoeffding_kernel(mu, x, y) + (mu.variance() - c) + c * (mu.density(x) + mu.density(y)) -
         (hoeffding_marginal(mu, x) + hoeffding_marginal(mu, y));
}

VerificationReport periodic_covariance_check(const TrigPolynomial& u, const TrigPolynomial& v,
                                             double c, double atol) {
  if (u.period != v.period) throw InputError("trig polynomials have different periods");
  const double T = u.period;
  std::vector<double> edges;
  const int panels = 16;
  for (int k = 0; k <= panels; ++k) edges.push_back(T * k / panels);
  const double rhs = integrate_cells<double>(edges, [&](double x, double y) {
    return u.derivative(x) * v.derivative(y) * (periodic_q(std::abs(x - y) / T) + (c - 1.0 / 24.0));
  });
  std::ostringstream notes;
  notes << "c=" << c << " T=" << T;
  return equality_report("periodic", 1, trig_covariance(u, v), rhs, 0.0, atol, 0, 0, notes.str());
}

double circle_transfer(const std::function<double(double)>& psi, double t, double s) {
  const double a = std::cos(t - s);
  return a * psi(a) / (kTwoPi * kTwoPi);
}

CircleTransferCheck circle_transfer_check(int grid_points) {
  if (grid_points < 1) throw InputError("grid_points must be >= 1");
  CircleTransferCheck r;
  r.grid_points = grid_points;
  const std::function<double(double)> psi = [](double a) { return psi_circle_exact(std::clamp(a, -1.0, 1.0)); };
  for (int k = 0; k < grid_points; ++k) {
    const double h = kTwoPi * (k + 0.5) / grid_points;
    const double dev = std::abs(circle_transfer(psi, h, 0.0) - periodic_k(h / kTwoPi));
    r.max_deviation = std::max(r.max_deviation, dev);
  }
  const double t = 1.0;
  std::vector<double> edges;
  for (int k = 0; k <= 16; ++k) edges.push_back(kTwoPi * k / 16);
  edges.push_back(t);
  std::sort(edges.begin(), edges.end());
  double m = 0.0;
  for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
    m += Rule::integrate([&](double s) { return circle_transfer(psi, t, s); }, edges[j], edges[j + 1]);
  }
  r.marginal_constant = m / kTwoPi;
  return r;
}

double circle_hoeffding_density(double t, double s) {
  const double lo = std::min(t, s) / kTwoPi, hi = std::max(t, s) / kTwoPi;
  return lo * (1.0 - hi);
}

double circle_hoeffding_marginal(double t) { return t * (kTwoPi - t) / (4.0 * kPi); }

namespace {

std::vector<double> circle_edges() {
  std::vector<double> edges;
  for (int k = 0; k <= 16; ++k) edges.push_back(kTwoPi * k / 16);
  return edges;
}

}  // namespace

double circle_hoeffding_mass() {
  return integrate_cells<double>(circle_edges(), circle_hoeffding_density);
}

VerificationReport circle_hoeffding_representation(const Polynomial& f, const Polynomial& g,
                                                   double atol) {
  if (f.dimension() != 2 || g.dimension() != 2) {
    throw InputError("circle representation needs polynomials in x1, x2");
  }
  const TrigPolynomial u = TrigPolynomial::from_circle_polynomial(f, kTwoPi);
  const TrigPolynomial v = TrigPolynomial::from_circle_polynomial(g, kTwoPi);
  const double lhs = sphere_mean(f * g) - sphere_mean(f) * sphere_mean(g);
  // u'(t) v'(s) stands in for <grad_S f(x), grad_S g(y)> / <x, y>.
  const double rhs = integrate_cells<double>(circle_edges(), [&](double t, double s) {
    return u.derivative(t) * v.derivative(s) * circle_hoeffding_density(t, s);
  });
  return equality_report("circle", 2, lhs, rhs, 0.0, atol, 0, 0,
                         "f=" + f.to_string() + " g=" + g.to_string());
}

}  // namespace sphcov
