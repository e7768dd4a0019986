#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string_view>
#include <vector>

namespace condclt {

enum class Model { Alloc, Gnp, Gnm };

std::string_view to_string(Model model);

/// Poisson rate plus the truncation index used for infinite families.
struct PoissonParams {
  double lambda;
  int K;
};

inline constexpr double kTailMassGate = 1e-12;

/// P(Po(lambda) = k); log-space evaluation beyond k = 30.
double poisson_pmf(double lambda, std::int64_t k);

/// P(Po(lambda) > K), summed directly over the tail.
double poisson_tail(double lambda, int K);

/// Smallest K with P(Po(lambda) > K) < tol.
int truncation_for(double lambda, double tol = kTailMassGate);

/// Builds PoissonParams and checks the tail-mass gate at K.
PoissonParams make_poisson_params(double lambda, int K);

/// Limit covariance of the occupancy profile, fixed ball count:
/// delta_ij pi(i) - pi(i) pi(j) (1 + (i - lambda)(j - lambda) / lambda).
double alloc_cov(double lambda, int i, int j);

/// Limit covariance of degree counts in G(n, p).
double gnp_degree_cov(double lambda, int j, int k);

/// Limit covariance of degree counts in G(n, m); identical to alloc_cov.
double gnm_degree_cov(double lambda, int j, int k);

/// Covariance entry for the given model.
double model_cov(Model model, double lambda, int j, int k);

/// n C(n-1, k) p^k (1 - p)^(n-1-k), the exact mean number of degree-k
/// vertices in G(n, p).
double expected_degree_count_exact(std::int64_t n, double p, std::int64_t k);

/// e^-l - e^-2l - l e^-2l, cross-checked against residual_variance.
double weiss_variance(double lambda);

struct SpacingsConstants {
  double sx2;
  double sxy;
  double sy2;
  double residual;
};

SpacingsConstants spacings_limit_constants(double a);

struct TheoryCovariance {
  Model model;
  double lambda;
  Eigen::MatrixXd matrix;  // (K+1) x (K+1)
};

/// Entries 0..K of the limit covariance matrix. No tail gate: a small K is
/// a legitimate marginal of the infinite family.
TheoryCovariance theory_covariance(Model model, double lambda, int K);

/// Variance of sum_k a_k U_k (a_k indexed 0..K). Throws TruncationError when
/// the estimated contribution of the omitted k > K exceeds 1e-9 under a
/// geometric growth model fitted to the coefficients.
double lincomb_variance(double lambda, const std::vector<double>& coeffs, Model model);

struct EdgeStatMoments {
  Eigen::VectorXd cov_with_v;  // Cov(U_k, V), k = 0..K
  double var_v;
};

/// Moments of V = (1/2) sum_k k U_k in G(n, p), truncated at K.
EdgeStatMoments edge_stat_moments(double lambda, int K);

}  // namespace condclt
