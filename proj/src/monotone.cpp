#include "condclt/monotone.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "condclt/errors.hpp"

namespace condclt {
namespace {

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

BigInt ipow(int base, int exp) {
  BigInt r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Sorted union of two supports.
template <typename T>
std::vector<T> merged_support(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

void FiniteDistribution::validate() const {
  require(!support.empty() && support.size() == probs.size(), ErrorCode::InvalidParameter,
          "support and probabilities must be non-empty and of equal length");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    require(probs[i] >= 0.0, ErrorCode::InvalidParameter, "negative probability");
    if (i > 0) {
      require(support[i] > support[i - 1], ErrorCode::InvalidParameter,
              "support must be strictly increasing");
    }
    sum += probs[i];
  }
  require(std::abs(sum - 1.0) <= 1e-12, ErrorCode::InvalidParameter,
          "probabilities do not sum to 1");
}

double FiniteDistribution::cdf(double x) const {
  double c = 0.0;
  for (std::size_t i = 0; i < support.size() && support[i] <= x; ++i) c += probs[i];
  return c;
}

FiniteDistribution ExactLaw::to_distribution() const {
  FiniteDistribution d;
  d.support.reserve(support.size());
  d.probs.reserve(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    d.support.push_back(static_cast<double>(support[i]));
    d.probs.push_back(static_cast<double>(Rational(weight[i], total)));
  }
  return d;
}

Rational ExactLaw::probability(std::int64_t x) const {
  const auto it = std::lower_bound(support.begin(), support.end(), x);
  if (it == support.end() || *it != x) return 0;
  return Rational(weight[it - support.begin()], total);
}

Rational ExactLaw::mean() const {
  BigInt s = 0;
  for (std::size_t i = 0; i < support.size(); ++i) s += weight[i] * support[i];
  return Rational(s, total);
}

Rational ExactLaw::variance() const {
  BigInt s2 = 0;
  for (std::size_t i = 0; i < support.size(); ++i) s2 += weight[i] * support[i] * support[i];
  const Rational mu = mean();
  return Rational(s2, total) - mu * mu;
}

ExactLaw make_exact_law(std::vector<std::pair<std::int64_t, BigInt>> atoms) {
  std::map<std::int64_t, BigInt> merged;
  for (auto& [x, w] : atoms) {
    if (w != 0) merged[x] += w;
  }
  require(!merged.empty(), ErrorCode::InvalidParameter, "law has no mass");
  ExactLaw law;
  law.total = 0;
  for (auto& [x, w] : merged) {
    law.support.push_back(x);
    law.weight.push_back(w);
    law.total += w;
  }
  return law;
}

BigInt surjections(int m, int b) {
  BigInt s = 0;
  for (int i = 0; i <= b; ++i) {
    const BigInt term = binomial(b, i) * ipow(b - i, m);
    if (i % 2 == 0) {
      s += term;
    } else {
      s -= term;
    }
  }
  return s;
}

ExactLaw exact_empty_box_counts(int n, int m) {
  if (n < 1 || n > 8 || m < 0 || m > 12) {
    std::ostringstream os;
    os << "(n, m) = (" << n << ", " << m << ") outside 1 <= n <= 8, 0 <= m <= 12";
    fail(ErrorCode::OutOfDeskRange, os.str());
  }
  std::vector<std::pair<std::int64_t, BigInt>> atoms;
  for (int z = 0; z <= n; ++z) {
    // choose the z empty boxes, then map the balls onto the rest surjectively
    atoms.emplace_back(z, binomial(n, z) * surjections(m, n - z));
  }
  ExactLaw law = make_exact_law(std::move(atoms));
  if (law.total != ipow(n, m)) fail(ErrorCode::InvalidCovariance, "surjection counts do not total n^m");
  return law;
}

FiniteDistribution exact_empty_box_law(int n, int m) {
  return exact_empty_box_counts(n, m).to_distribution();
}

void for_each_occupancy(int n, int m,
                        const std::function<void(std::span<const int>, const BigInt&)>& visit) {
  require(n >= 1 && m >= 0, ErrorCode::InvalidParameter, "need n >= 1 and m >= 0");
  std::vector<int> c(n, 0);
  const BigInt mfact = factorial(m);
  std::vector<BigInt> fact(m + 1);
  for (int i = 0; i <= m; ++i) fact[i] = factorial(i);

  // Depth-first over compositions of m into n parts.
  std::function<void(int, int)> rec = [&](int box, int left) {
    if (box == n - 1) {
      c[box] = left;
      BigInt denom = 1;
      for (int v : c) denom *= fact[v];
      visit(c, mfact / denom);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      c[box] = k;
      rec(box + 1, left - k);
    }
  };
  rec(0, m);
}

ExactLaw occupancy_statistic_law(int n, int m,
                                 const std::function<std::int64_t(std::span<const int>)>& stat) {
  std::vector<std::pair<std::int64_t, BigInt>> atoms;
  for_each_occupancy(n, m, [&](std::span<const int> c, const BigInt& w) {
    atoms.emplace_back(stat(c), w);
  });
  return make_exact_law(std::move(atoms));
}

void for_each_graph(int n, int m, const std::function<void(std::span<const int>)>& visit) {
  require(n >= 1 && n <= 7, ErrorCode::OutOfDeskRange, "graph enumeration needs 1 <= n <= 7");
  const int pairs = n * (n - 1) / 2;
  require(m >= 0 && m <= pairs, ErrorCode::TooManyEdges, "m outside [0, C(n,2)]");
  std::vector<std::pair<int, int>> ends;
  for (int v = 1; v < n; ++v) {
    for (int u = 0; u < v; ++u) ends.emplace_back(u, v);
  }
  std::vector<int> deg(n);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << pairs); ++mask) {
    if (std::popcount(mask) != m) continue;
    std::fill(deg.begin(), deg.end(), 0);
    for (int e = 0; e < pairs; ++e) {
      if (mask >> e & 1U) {
        ++deg[ends[e].first];
        ++deg[ends[e].second];
      }
    }
    visit(deg);
  }
}

ExactLaw graph_statistic_law(int n, int m,
                             const std::function<std::int64_t(std::span<const int>)>& stat) {
  std::vector<std::pair<std::int64_t, BigInt>> atoms;
  for_each_graph(n, m, [&](std::span<const int> deg) { atoms.emplace_back(stat(deg), 1); });
  return make_exact_law(std::move(atoms));
}

DominanceResult check_stochastic_dominance(const FiniteDistribution& d1,
                                           const FiniteDistribution& d2) {
  d1.validate();
  d2.validate();
  for (double x : merged_support(d1.support, d2.support)) {
    if (d1.cdf(x) < d2.cdf(x) - kDominanceTol) return {false, x};
  }
  return {};
}

DominanceResult check_stochastic_dominance(const ExactLaw& d1, const ExactLaw& d2) {
  BigInt c1 = 0;
  BigInt c2 = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  for (std::int64_t x : merged_support(d1.support, d2.support)) {
    while (i < d1.support.size() && d1.support[i] <= x) c1 += d1.weight[i++];
    while (j < d2.support.size() && d2.support[j] <= x) c2 += d2.weight[j++];
    if (c1 * d2.total < c2 * d1.total) return {false, static_cast<double>(x)};
  }
  return {};
}

std::vector<CouplingAtom> quantile_coupling(const FiniteDistribution& d1,
                                            const FiniteDistribution& d2) {
  const DominanceResult dom = check_stochastic_dominance(d1, d2);
  if (!dom.holds) {
    std::ostringstream os;
    os << "first law is not dominated by the second (CDF order fails at x = " << *dom.witness
       << ")";
    fail(ErrorCode::NotComparable, os.str());
  }
  std::vector<CouplingAtom> atoms;
  std::size_t i = 0;
  std::size_t j = 0;
  double c1 = d1.probs[0];
  double c2 = d2.probs[0];
  double prev = 0.0;
  const std::size_t n1 = d1.support.size();
  const std::size_t n2 = d2.support.size();
  while (i < n1 && j < n2) {
    const bool last1 = i + 1 == n1;
    const bool last2 = j + 1 == n2;
    // Cumulative levels within 1e-12 are treated as one breakpoint.
    const bool tie = std::abs(c1 - c2) <= kDominanceTol || (last1 && last2);
    const double level = last1 && last2 ? 1.0 : (tie ? std::max(c1, c2) : std::min(c1, c2));
    if (level > prev) atoms.push_back({d1.support[i], d2.support[j], level - prev});
    prev = std::max(prev, level);
    if (last1 && last2) break;
    const bool step1 = !last1 && (tie || c1 < c2);
    const bool step2 = !last2 && (tie || c2 < c1);
    if (step1) c1 += d1.probs[++i];
    if (step2) c2 += d2.probs[++j];
    if (!step1 && !step2) break;
  }
  return atoms;
}

std::vector<ExactCouplingAtom> quantile_coupling(const ExactLaw& d1, const ExactLaw& d2) {
  const DominanceResult dom = check_stochastic_dominance(d1, d2);
  if (!dom.holds) {
    std::ostringstream os;
    os << "first law is not dominated by the second (CDF order fails at x = " << *dom.witness
       << ")";
    fail(ErrorCode::NotComparable, os.str());
  }
  std::vector<ExactCouplingAtom> atoms;
  std::size_t i = 0;
  std::size_t j = 0;
  Rational c1(d1.weight[0], d1.total);
  Rational c2(d2.weight[0], d2.total);
  Rational prev = 0;
  while (true) {
    const Rational level = c1 < c2 ? c1 : c2;
    if (level > prev) atoms.push_back({d1.support[i], d2.support[j], level - prev});
    prev = level;
    if (level == 1) break;
    if (c1 == level) {
      ++i;
      c1 += Rational(d1.weight[i], d1.total);
    }
    if (c2 == level) {
      ++j;
      c2 += Rational(d2.weight[j], d2.total);
    }
  }
  return atoms;
}

FiniteDistribution negated(const FiniteDistribution& d) {
  FiniteDistribution out;
  out.support.assign(d.support.rbegin(), d.support.rend());
  for (double& x : out.support) x = -x;
  out.probs.assign(d.probs.rbegin(), d.probs.rend());
  return out;
}

}  // namespace condclt
