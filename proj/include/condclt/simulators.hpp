#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "condclt/rng.hpp"

namespace condclt {

inline constexpr int kDefaultMaxCount = 40;

/// z[j] = number of boxes holding exactly j balls for j <= K; boxes with
/// more than K balls go to the tail bucket.
struct OccupancyProfile {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::vector<std::int64_t> z;
  std::int64_t z_tail = 0;
  std::int64_t tail_balls = 0;

  int K() const { return static_cast<int>(z.size()) - 1; }
  bool conserved() const;
};

/// counts[k] = N_k, the number of vertices of degree k, for k <= K.
struct DegreeCounts {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::vector<std::int64_t> counts;
  std::int64_t tail = 0;
  std::int64_t tail_degree_sum = 0;

  int K() const { return static_cast<int>(counts.size()) - 1; }
  bool conserved() const;
};

/// Gaps between n uniform points on the circle of circumference 1. Points are
/// multiples of 2^-53, so every gap is exact and the gaps sum to exactly 1.
struct SpacingsSample {
  std::int64_t n = 0;
  std::vector<double> s;
};

OccupancyProfile sample_allocation(std::int64_t n, std::int64_t m, Rng& rng,
                                   int K = kDefaultMaxCount);

struct PoissonizedAllocation {
  OccupancyProfile profile;
  std::int64_t M = 0;
};

/// Per-box counts i.i.d. Po(lambda); M is their total.
PoissonizedAllocation sample_poissonized_allocation(std::int64_t n, double lambda, Rng& rng,
                                                    int K = kDefaultMaxCount);

DegreeCounts sample_gnp(std::int64_t n, double p, Rng& rng, int K = kDefaultMaxCount);

DegreeCounts sample_gnm(std::int64_t n, std::int64_t m, Rng& rng, int K = kDefaultMaxCount);

using Edge = std::pair<std::int64_t, std::int64_t>;

/// Vertices are 0-based. Rejects self-loops and repeated edges.
DegreeCounts degree_counts_from_edges(std::int64_t n, std::span<const Edge> edges,
                                      int K = kDefaultMaxCount);

/// Maps a pair index in [0, C(n,2)) to the pair (u, v), u < v, ordered by v
/// and then u.
Edge edge_from_index(std::uint64_t index);

SpacingsSample sample_spacings(std::int64_t n, Rng& rng);

/// Number of spacings strictly greater than a / n.
std::int64_t exceedance_count(const SpacingsSample& sample, double a);

/// Appends one replicate row as little-endian 64-bit integers.
void write_dump_row(std::ostream& out, std::span<const std::int64_t> row);

/// Reads a whole dump back as rows of `width` values.
std::vector<std::vector<std::int64_t>> read_dump(std::istream& in, std::size_t width);

}  // namespace condclt
