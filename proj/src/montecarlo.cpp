#include "sphcov/montecarlo.hpp"

namespace sphcov {

Moments::Moments(std::size_t width)
    : width_(width), mean_(width, 0.0), comoment_(width * width, 0.0), delta_(width, 0.0) {}

void Moments::add(std::span<const double> values) {
  ++count_;
  const double inv = 1.0 / static_cast<double>(count_);
  for (std::size_t i = 0; i < width_; ++i) {
    delta_[i] = values[i] - mean_[i];
    mean_[i] += delta_[i] * inv;
  }
  for (std::size_t i = 0; i < width_; ++i) {
    const double post = values[i] - mean_[i];
    for (std::size_t j = 0; j < width_; ++j) comoment_[i * width_ + j] += delta_[j] * post;
  }
}

void Moments::merge(const Moments& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  for (std::size_t i = 0; i < width_; ++i) delta_[i] = other.mean_[i] - mean_[i];
  for (std::size_t i = 0; i < width_; ++i) {
    for (std::size_t j = 0; j < width_; ++j) {
      comoment_[i * width_ + j] +=
          other.comoment_[i * width_ + j] + delta_[i] * delta_[j] * na * nb / n;
    }
  }
  for (std::size_t i = 0; i < width_; ++i) mean_[i] += delta_[i] * nb / n;
  count_ += other.count_;
}

double Moments::covariance(std::size_t i, std::size_t j) const {
  if (count_ < 2) return 0.0;
  return comoment_[i * width_ + j] / static_cast<double>(count_ - 1);
}

double Moments::standard_error(std::size_t i) const {
  if (count_ < 2) return 0.0;
  return std::sqrt(variance(i) / static_cast<double>(count_));
}

double Moments::combined_mean(std::span<const double> weights) const {
  double m = 0.0;
  for (std::size_t i = 0; i < width_; ++i) m += weights[i] * mean_[i];
  return m;
}

double Moments::combined_standard_error(std::span<const double> weights) const {
  if (count_ < 2) return 0.0;
  double v = 0.0;
  for (std::size_t i = 0; i < width_; ++i) {
    for (std::size_t j = 0; j < width_; ++j) v += weights[i] * weights[j] * covariance(i, j);
  }
  return std::sqrt(std::max(v, 0.0) / static_cast<double>(count_));
}

}  // namespace sphcov
