#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace sphcov {

using Rng = std::mt19937_64;

/// Samples are produced in fixed-size chunks; chunk c of a run seeded with s
/// draws from its own engine seeded with split_seed(s, c). A sample's value
/// therefore depends only on (seed, index), never on the thread layout.
inline constexpr std::size_t kChunkSize = 4096;

/// SplitMix64 finaliser applied to (seed, stream).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

/// Engine for chunk `chunk` of a run seeded with `seed`.
Rng chunk_engine(std::uint64_t seed, std::uint64_t chunk);

/// Fills `out` with i.i.d. standard normal values.
void draw_normal(Rng& rng, std::span<double> out);

/// Uniform point on S^{n-1}, n = out.size(), as a normalised Gaussian vector.
/// A zero-norm draw is rejected and redrawn.
void draw_sphere(Rng& rng, std::span<double> out);

/// Uniform on (0, 1), never returning exactly 0.
double draw_uniform(Rng& rng);

}  // namespace sphcov
