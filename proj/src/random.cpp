#include "sphcov/random.hpp"

#include <cmath>

namespace sphcov {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng chunk_engine(std::uint64_t seed, std::uint64_t chunk) { return Rng(split_seed(seed, chunk)); }

void draw_normal(Rng& rng, std::span<double> out) {
  // Marsaglia polar method; written out so that the stream does not depend on
  // the standard library's normal_distribution implementation.
  std::size_t i = 0;
  while (i < out.size()) {
    double u, v, s;
    do {
      u = 2.0 * draw_uniform(rng) - 1.0;
      v = 2.0 * draw_uniform(rng) - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    out[i++] = u * m;
    if (i < out.size()) out[i++] = v * m;
  }
}

void draw_sphere(Rng& rng, std::span<double> out) {
  double norm2 = 0.0;
  do {
    draw_normal(rng, out);
    norm2 = 0.0;
    for (double v : out) norm2 += v * v;
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : out) v *= inv;
}

double draw_uniform(Rng& rng) {
  // 53 random bits mapped to (0, 1).
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace sphcov
