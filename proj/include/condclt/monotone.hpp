#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace condclt {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Finite law on the reals: strictly increasing support, probabilities
/// summing to 1 within 1e-12.
struct FiniteDistribution {
  std::vector<double> support;
  std::vector<double> probs;

  /// Throws InvalidParameter if the invariants fail.
  void validate() const;
  double cdf(double x) const;
};

/// Integer-valued law with exact integer weights; probabilities are
/// weight / total.
struct ExactLaw {
  std::vector<std::int64_t> support;
  std::vector<BigInt> weight;
  BigInt total;

  FiniteDistribution to_distribution() const;
  Rational probability(std::int64_t x) const;
  /// Exact mean and variance as rationals.
  Rational mean() const;
  Rational variance() const;
};

/// Builds an ExactLaw from (value, weight) pairs, merging equal values.
ExactLaw make_exact_law(std::vector<std::pair<std::int64_t, BigInt>> atoms);

/// Number of surjections from an m-set onto a b-set.
BigInt surjections(int m, int b);

/// Law of the number of empty boxes after m balls into n boxes
/// (1 <= n <= 8, 0 <= m <= 12), by inclusion-exclusion.
ExactLaw exact_empty_box_counts(int n, int m);
FiniteDistribution exact_empty_box_law(int n, int m);

/// Visits every occupancy vector (c_1..c_n) with sum m together with its
/// multinomial weight m! / prod c_i!. Weights total n^m.
void for_each_occupancy(int n, int m,
                        const std::function<void(std::span<const int>, const BigInt&)>& visit);

/// Exact law of a statistic of the box counts under m uniform balls in n boxes.
ExactLaw occupancy_statistic_law(int n, int m,
                                 const std::function<std::int64_t(std::span<const int>)>& stat);

/// Visits the degree sequence of every labelled graph on n vertices with
/// exactly m edges (n <= 7).
void for_each_graph(int n, int m, const std::function<void(std::span<const int>)>& visit);

/// Exact law of a statistic of the degree sequence in G(n, m).
ExactLaw graph_statistic_law(int n, int m,
                             const std::function<std::int64_t(std::span<const int>)>& stat);

struct DominanceResult {
  bool holds = true;
  std::optional<double> witness;  // support point where the CDF order breaks
};

inline constexpr double kDominanceTol = 1e-12;

/// d1 <= d2 in the usual stochastic order: CDF1(x) >= CDF2(x) - 1e-12 on the
/// union of supports.
DominanceResult check_stochastic_dominance(const FiniteDistribution& d1,
                                           const FiniteDistribution& d2);

/// Same order, decided exactly (tolerance 0).
DominanceResult check_stochastic_dominance(const ExactLaw& d1, const ExactLaw& d2);

struct CouplingAtom {
  double x1;
  double x2;
  double prob;
};

struct ExactCouplingAtom {
  std::int64_t x1;
  std::int64_t x2;
  Rational prob;
};

/// Inverse-CDF coupling of d1 <= d2; every atom has x1 <= x2.
/// Throws NotComparable when d1 is not dominated by d2.
std::vector<CouplingAtom> quantile_coupling(const FiniteDistribution& d1,
                                            const FiniteDistribution& d2);
std::vector<ExactCouplingAtom> quantile_coupling(const ExactLaw& d1, const ExactLaw& d2);

/// Law of -X.
FiniteDistribution negated(const FiniteDistribution& d);

/// (z0, z0 + z1, ..., z0 + ... + zJ).
template <typename T>
std::vector<T> cumulative_transform(std::span<const T> z) {
  std::vector<T> out(z.size());
  T acc{};
  for (std::size_t i = 0; i < z.size(); ++i) {
    acc += z[i];
    out[i] = acc;
  }
  return out;
}

/// Inverse of cumulative_transform.
template <typename T>
std::vector<T> difference_transform(std::span<const T> s) {
  std::vector<T> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = i == 0 ? s[0] : s[i] - s[i - 1];
  return out;
}

}  // namespace condclt
