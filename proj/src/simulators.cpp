#include "condclt/simulators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "condclt/errors.hpp"

namespace condclt {
namespace {

std::uint64_t pair_count(std::int64_t n) {
  const auto u = static_cast<std::uint64_t>(n);
  return u * (u - 1) / 2;
}

void check_max_count(int K) {
  require(K >= 0, ErrorCode::InvalidParameter, "count truncation K must be non-negative");
}

template <typename Int>
DegreeCounts tally_degrees(std::int64_t n, std::int64_t m, const std::vector<Int>& deg, int K) {
  DegreeCounts out;
  out.n = n;
  out.m = m;
  out.counts.assign(K + 1, 0);
  for (Int d : deg) {
    if (static_cast<std::int64_t>(d) <= K) {
      ++out.counts[d];
    } else {
      ++out.tail;
      out.tail_degree_sum += d;
    }
  }
  return out;
}

template <typename Int>
OccupancyProfile tally_boxes(std::int64_t n, std::int64_t m, const std::vector<Int>& box, int K) {
  OccupancyProfile out;
  out.n = n;
  out.m = m;
  out.z.assign(K + 1, 0);
  for (Int c : box) {
    if (static_cast<std::int64_t>(c) <= K) {
      ++out.z[c];
    } else {
      ++out.z_tail;
      out.tail_balls += c;
    }
  }
  return out;
}

}  // namespace

bool OccupancyProfile::conserved() const {
  std::int64_t boxes = z_tail;
  std::int64_t balls = tail_balls;
  for (std::size_t j = 0; j < z.size(); ++j) {
    boxes += z[j];
    balls += static_cast<std::int64_t>(j) * z[j];
  }
  return boxes == n && balls == m;
}

bool DegreeCounts::conserved() const {
  std::int64_t vertices = tail;
  std::int64_t degrees = tail_degree_sum;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    vertices += counts[k];
    degrees += static_cast<std::int64_t>(k) * counts[k];
  }
  return vertices == n && degrees == 2 * m;
}

OccupancyProfile sample_allocation(std::int64_t n, std::int64_t m, Rng& rng, int K) {
  require(n >= 1, ErrorCode::InvalidParameter, "need at least one box");
  require(m >= 0, ErrorCode::InvalidParameter, "ball count must be non-negative");
  check_max_count(K);
  std::vector<std::uint32_t> box(static_cast<std::size_t>(n), 0);
  const auto bound = static_cast<std::uint64_t>(n);
  for (std::int64_t b = 0; b < m; ++b) ++box[uniform_below(rng, bound)];
  return tally_boxes(n, m, box, K);
}

PoissonizedAllocation sample_poissonized_allocation(std::int64_t n, double lambda, Rng& rng,
                                                    int K) {
  require(n >= 1, ErrorCode::InvalidParameter, "need at least one box");
  if (!(lambda > 0.0)) fail(ErrorCode::InvalidLambda, "lambda must be positive");
  check_max_count(K);
  std::poisson_distribution<std::int64_t> po(lambda);
  std::vector<std::int64_t> box(static_cast<std::size_t>(n));
  std::int64_t total = 0;
  for (auto& c : box) {
    c = po(rng);
    total += c;
  }
  return {tally_boxes(n, total, box, K), total};
}

Edge edge_from_index(std::uint64_t index) {
  // v = largest integer with v (v - 1) / 2 <= index
  auto v = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(index))) / 2.0);
  while (v * (v - 1) / 2 > index) --v;
  while ((v + 1) * v / 2 <= index) ++v;
  const std::uint64_t u = index - v * (v - 1) / 2;
  return {static_cast<std::int64_t>(u), static_cast<std::int64_t>(v)};
}

DegreeCounts sample_gnp(std::int64_t n, double p, Rng& rng, int K) {
  require(n >= 1, ErrorCode::InvalidParameter, "need at least one vertex");
  require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidParameter, "p must lie in [0, 1]");
  check_max_count(K);
  std::vector<std::uint32_t> deg(static_cast<std::size_t>(n), 0);
  const std::uint64_t total = pair_count(n);
  std::int64_t m = 0;
  auto add = [&](std::uint64_t idx) {
    const auto [u, v] = edge_from_index(idx);
    ++deg[u];
    ++deg[v];
    ++m;
  };
  if (p >= 1.0) {
    for (std::uint64_t idx = 0; idx < total; ++idx) add(idx);
  } else if (p > 0.0) {
    // Geometric gaps between successive present edges.
    const double log_q = std::log1p(-p);
    std::uint64_t idx = 0;
    while (true) {
      const double u = 1.0 - uniform01(rng);  // (0, 1]
      const double gap = std::floor(std::log(u) / log_q);
      if (gap >= static_cast<double>(total - idx)) break;
      idx += static_cast<std::uint64_t>(gap);
      add(idx);
      ++idx;
      if (idx >= total) break;
    }
  }
  return tally_degrees(n, m, deg, K);
}

DegreeCounts sample_gnm(std::int64_t n, std::int64_t m, Rng& rng, int K) {
  require(n >= 1, ErrorCode::InvalidParameter, "need at least one vertex");
  require(m >= 0, ErrorCode::InvalidParameter, "edge count must be non-negative");
  check_max_count(K);
  const std::uint64_t total = pair_count(n);
  if (static_cast<std::uint64_t>(m) > total) {
    std::ostringstream os;
    os << "m = " << m << " exceeds C(n,2) = " << total;
    fail(ErrorCode::TooManyEdges, os.str());
  }
  std::vector<std::uint32_t> deg(static_cast<std::size_t>(n), 0);
  auto add = [&](std::uint64_t idx) {
    const auto [u, v] = edge_from_index(idx);
    ++deg[u];
    ++deg[v];
  };
  const auto mu = static_cast<std::uint64_t>(m);
  if (4 * mu <= total) {
    // Sparse: rejection against the set of chosen indices.
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(2 * mu);
    while (chosen.size() < mu) {
      const std::uint64_t idx = uniform_below(rng, total);
      if (chosen.insert(idx).second) add(idx);
    }
  } else {
    // Dense: partial Fisher-Yates over all pair indices.
    std::vector<std::uint64_t> idx(total);
    std::iota(idx.begin(), idx.end(), std::uint64_t{0});
    for (std::uint64_t i = 0; i < mu; ++i) {
      const std::uint64_t j = i + uniform_below(rng, total - i);
      std::swap(idx[i], idx[j]);
      add(idx[i]);
    }
  }
  return tally_degrees(n, m, deg, K);
}

DegreeCounts degree_counts_from_edges(std::int64_t n, std::span<const Edge> edges, int K) {
  require(n >= 1, ErrorCode::InvalidParameter, "need at least one vertex");
  check_max_count(K);
  std::vector<std::int64_t> deg(static_cast<std::size_t>(n), 0);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size() * 2);
  for (const auto& [a, b] : edges) {
    require(a >= 0 && a < n && b >= 0 && b < n, ErrorCode::InvalidParameter,
            "edge endpoint out of range");
    if (a == b) fail(ErrorCode::SelfLoop, "self-loop at vertex " + std::to_string(a));
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    if (!seen.insert(hi * (hi - 1) / 2 + lo).second) {
      fail(ErrorCode::DuplicateEdge,
           "duplicate edge {" + std::to_string(lo) + "," + std::to_string(hi) + "}");
    }
    ++deg[a];
    ++deg[b];
  }
  return tally_degrees(n, static_cast<std::int64_t>(edges.size()), deg, K);
}

SpacingsSample sample_spacings(std::int64_t n, Rng& rng) {
  require(n >= 1, ErrorCode::InvalidParameter, "need at least one point");
  const auto count = static_cast<std::size_t>(n);
  constexpr double kUnit = 0x1.0p-53;
  std::vector<std::uint64_t> pts(count);
  std::vector<std::uint64_t> sorted(count);
  std::vector<std::uint32_t> start(count + 1);
  while (true) {
    for (auto& x : pts) x = rng() >> 11;
    // Counting sort into n equal buckets, then insertion sort per bucket.
    std::fill(start.begin(), start.end(), 0);
    auto bucket = [&](std::uint64_t x) {
      return static_cast<std::size_t>((static_cast<unsigned __int128>(x) * count) >> 53);
    };
    for (auto x : pts) ++start[bucket(x) + 1];
    for (std::size_t b = 0; b < count; ++b) start[b + 1] += start[b];
    std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
    for (auto x : pts) sorted[fill[bucket(x)]++] = x;
    for (std::size_t b = 0; b < count; ++b) {
      std::sort(sorted.begin() + start[b], sorted.begin() + start[b + 1]);
    }
    // Ties are an artifact of the 2^-53 grid; redraw so every gap is positive.
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;

    SpacingsSample out;
    out.n = n;
    out.s.resize(count);
    for (std::size_t i = 0; i + 1 < count; ++i) {
      out.s[i] = static_cast<double>(sorted[i + 1] - sorted[i]) * kUnit;
    }
    const std::uint64_t wrap = (std::uint64_t{1} << 53) - sorted.back() + sorted.front();
    out.s[count - 1] = static_cast<double>(wrap) * kUnit;
    return out;
  }
}

std::int64_t exceedance_count(const SpacingsSample& sample, double a) {
  if (!(a > 0.0)) fail(ErrorCode::InvalidA, "a must be positive");
  const double threshold = a / static_cast<double>(sample.n);
  return std::count_if(sample.s.begin(), sample.s.end(),
                       [threshold](double x) { return x > threshold; });
}

void write_dump_row(std::ostream& out, std::span<const std::int64_t> row) {
  for (std::int64_t v : row) {
    auto u = static_cast<std::uint64_t>(v);
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((u >> (8 * b)) & 0xff);
    out.write(bytes, 8);
  }
  if (!out) fail(ErrorCode::Io, "failed writing dump row");
}

std::vector<std::vector<std::int64_t>> read_dump(std::istream& in, std::size_t width) {
  require(width > 0, ErrorCode::InvalidParameter, "dump width must be positive");
  std::vector<std::vector<std::int64_t>> rows;
  std::vector<std::int64_t> row;
  char bytes[8];
  while (in.read(bytes, 8)) {
    std::uint64_t u = 0;
    for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[b])) << (8 * b);
    row.push_back(static_cast<std::int64_t>(u));
    if (row.size() == width) {
      rows.push_back(std::move(row));
      row.clear();
    }
  }
  if (!row.empty() || in.gcount() != 0) fail(ErrorCode::Io, "truncated dump");
  return rows;
}

}  // namespace condclt
