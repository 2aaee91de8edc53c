#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sphcov/random.hpp"

namespace sphcov {

/// How chunked sampling loops are executed. Both policies visit the same
/// chunks with the same engines and merge per-chunk results in chunk order,
/// so their outputs are bitwise identical.
enum class Execution { serial, parallel };

/// Running means and co-moments of a fixed number of jointly sampled
/// quantities (Welford update, Chan merge).
class Moments {
 public:
  explicit Moments(std::size_t width = 0);

  void add(std::span<const double> values);
  void merge(const Moments& other);

  std::size_t width() const { return width_; }
  std::uint64_t count() const { return count_; }
  double mean(std::size_t i) const { return mean_[i]; }
  double covariance(std::size_t i, std::size_t j) const;
  double variance(std::size_t i) const { return covariance(i, i); }
  /// Standard error of the sample mean of component i.
  double standard_error(std::size_t i) const;
  /// Mean and standard error of sum_i w_i X_i.
  double combined_mean(std::span<const double> weights) const;
  double combined_standard_error(std::span<const double> weights) const;

 private:
  std::size_t width_;
  std::uint64_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> comoment_;  // width x width
  std::vector<double> delta_;
};

namespace detail {

inline std::size_t chunk_count(std::size_t count) { return (count + kChunkSize - 1) / kChunkSize; }

template <class ChunkFn>
void run_chunks(std::size_t chunks, Execution exec, ChunkFn&& fn) {
  const auto total = static_cast<std::int64_t>(chunks);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < total; ++c) fn(static_cast<std::size_t>(c));
  } else {
    for (std::int64_t c = 0; c < total; ++c) fn(static_cast<std::size_t>(c));
  }
}

}  // namespace detail

/// Monte Carlo estimate of the means of `width` quantities produced jointly
/// by `kernel(Rng&, std::span<double> out)` on each of `count` draws.
/// The kernel must be safe to call concurrently.
template <class Kernel>
Moments monte_carlo(std::size_t count, std::uint64_t seed, std::size_t width, Kernel&& kernel,
                    Execution exec = Execution::parallel) {
  const std::size_t chunks = detail::chunk_count(count);
  std::vector<Moments> partial(chunks, Moments(width));
  detail::run_chunks(chunks, exec, [&](std::size_t c) {
    Rng rng = chunk_engine(seed, c);
    std::vector<double> out(width);
    const std::size_t end = std::min(count, (c + 1) * kChunkSize);
    Moments& m = partial[c];
    for (std::size_t i = c * kChunkSize; i < end; ++i) {
      kernel(rng, std::span<double>(out));
      m.add(out);
    }
  });
  Moments total(width);
  for (const auto& m : partial) total.merge(m);
  return total;
}

/// Draws `count` values with `draw(Rng&) -> T` using the chunked stream.
template <class T, class Draw>
std::vector<T> generate(std::size_t count, std::uint64_t seed, Draw&& draw,
                        Execution exec = Execution::parallel) {
  const std::size_t chunks = detail::chunk_count(count);
  std::vector<T> out(count);
  detail::run_chunks(chunks, exec, [&](std::size_t c) {
    Rng rng = chunk_engine(seed, c);
    const std::size_t end = std::min(count, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) out[i] = draw(rng);
  });
  return out;
}

}  // namespace sphcov
