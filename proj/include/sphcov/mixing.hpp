#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "sphcov/montecarlo.hpp"
#include "sphcov/sphere.hpp"

namespace sphcov {

/// Value of a mixing density that may be infinite at isolated points.
struct DensityValue {
  double value = 0.0;
  bool unbounded = false;
};

/// Density of pi_n (first-order Gaussian mixing measure) at (x, y).
DensityValue gauss_density_p(int n, std::span<const double> x, std::span<const double> y);
/// Density of kappa_n (second-order Gaussian mixing measure), with weight (1 - t).
DensityValue gauss_density_q(int n, std::span<const double> x, std::span<const double> y);

enum class PsiBackend { automatic, series, quadrature };

struct PsiResult {
  double value = 0.0;
  double error = 0.0;  // series tail bound or quadrature error estimate
  std::size_t terms = 0;
};

/// Power series for psi_n (order 1) or psi_n^{(2)} (order 2) at |alpha| < 1.
PsiResult psi_series(int n, double alpha, int order);
/// Quadrature of the defining double integral after the radial variables
/// have been integrated out in closed form.
PsiResult psi_quadrature(int n, double alpha, int order);

/// psi_n (order 1, n >= 2) or psi_n^{(2)} (order 2, n >= 5) at alpha in
/// [-1, 1]. `automatic` selects the series for |alpha| <= 0.95.
double psi_sphere(int n, double alpha, int order, PsiBackend backend = PsiBackend::automatic);

/// Exact inner-product density of the unique mixing measure on the circle:
/// (pi/4) (asin(alpha)/alpha) (3 - 2 acos(alpha)/pi).
double psi_circle_exact(double alpha);
/// The same density as (2 pi)^2 K(h / 2 pi) / cos h, h = acos(alpha),
/// K(h) = (4h - 1)(4h - 3)/32. Undefined at alpha = 0.
double psi_circle_from_kernel(double alpha);
/// One-dimensional integral representation of psi_2:
/// (1/alpha) int_0^inf [log(1 + z/2) - log(1 + (1-alpha) z/2)] dz / (z sqrt(1+z)).
double psi2_log_integral(double alpha);

/// 2 (2 pi)^2 int_0^1 K(h) (1 - h) / cos(2 pi h) dh: total mass of the
/// circle mixing measure.
double circle_total_mass();

struct MixingConstant {
  int order = 1;
  int n = 0;
  double value = 0.0;
  double error = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool within_bounds = false;  // lower < value < upper
};

/// c_n = int psi(alpha) w_n(alpha) d alpha, with its known bounds.
/// For n = 2 the bounds are 1 < c < pi.
MixingConstant mixing_constant(int n, int order, double tolerance = 1e-10);

/// Second moment int alpha^2 psi w_n d alpha / c_n of <x, y> under mu_n.
double mu_second_moment(int n, int order, double tolerance = 1e-10);

/// Boundary profile used in the asymptotic comparison:
/// log(1/(1 - alpha)) for n = 3, (1 - alpha)^{-(n-3)/2} for n >= 4.
double asymptotic_profile(int n, double alpha);
/// Pairs (alpha, psi_n(alpha) / profile(alpha)); alpha in [0.9, 1).
std::vector<std::pair<double, double>> asymptotic_ratio(int n, std::span<const double> alpha_grid);

struct VectorPair {
  std::vector<double> x;
  std::vector<double> y;
};

struct WeightedPair {
  std::vector<double> x;
  std::vector<double> y;
  double t = 0.0;
  double weight = 0.5;  // each pair carries mass 1/2 of kappa_n
};

/// (X, tX + sqrt(1 - t^2) Z) with t uniform on (0, 1); writes into x and y.
void draw_pi_pair(Rng& rng, std::span<double> x, std::span<double> y);
/// As draw_pi_pair with t of density 2(1 - t); returns t.
double draw_kappa_pair(Rng& rng, std::span<double> x, std::span<double> y);

std::vector<VectorPair> sample_pi_n(int n, std::size_t count, std::uint64_t seed,
                                    Execution exec = Execution::parallel);
std::vector<WeightedPair> sample_kappa_n(int n, std::size_t count, std::uint64_t seed,
                                         Execution exec = Execution::parallel);

/// Sampler for mu_n = nu_n / c_n on S^{n-1} x S^{n-1}. The law of
/// <x, y> is tabulated once as a CDF in phi = acos(alpha) on 2048 cells.
class MuSampler {
 public:
  static constexpr int kCells = 2048;

  MuSampler(int n, int order);

  int n() const { return n_; }
  int order() const { return order_; }
  /// Tabulated CDF of alpha = <x, y>.
  double cdf(double alpha) const;
  double draw_alpha(Rng& rng) const;
  /// Writes x uniform and y = alpha x + sqrt(1 - alpha^2) u, u uniform on
  /// the unit sphere of x-perp. Returns alpha.
  double draw(Rng& rng, std::span<double> x, std::span<double> y) const;

  /// Shared instance per (n, order).
  static std::shared_ptr<const MuSampler> get(int n, int order);

 private:
  int n_;
  int order_;
  std::vector<double> phi_;  // knots, phi_[0] = 0, phi_[kCells] = pi
  std::vector<double> cdf_;  // P(phi' <= phi_[i]); alpha = cos(phi') decreasing
};

std::vector<std::pair<SpherePoint, SpherePoint>> sample_mu_n(int n, std::size_t count,
                                                             std::uint64_t seed, int order,
                                                             Execution exec = Execution::parallel);

}  // namespace sphcov
