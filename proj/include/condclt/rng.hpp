#pragma once

#include <cstdint>
#include <random>

namespace condclt {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Independent stream for replicate `index` under `master_seed`. Depends only
/// on the pair, so results do not depend on which worker runs the replicate.
Rng stream_for(std::uint64_t master_seed, std::uint64_t index);

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

}  // namespace condclt
