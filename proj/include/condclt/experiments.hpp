#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "condclt/mc_engine.hpp"
#include "condclt/report.hpp"

namespace condclt {

struct Gates {
  double z_gate = 4.0;
  double ks_gate = 0.05;
};

struct TheoryMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Limit mean (zero) and covariance of the standardized statistic, evaluated
/// at the finite-n lambda_n.
TheoryMoments limit_moments(const ExperimentParams& params);

/// Theory comparison plus, when `ks_checks`, one sup-distance check per
/// coordinate against N(0, theory variance).
VerificationReport mc_verification(const ExperimentResult& result, const TheoryMoments& theory,
                                   const Gates& gates, bool ks_checks);

/// Runs the sampler and verifies it against limit_moments. Sup-distance
/// checks are included for allocations and spacings.
VerificationReport run_mc_report(const ExperimentParams& params, std::int64_t reps,
                                 std::uint64_t seed, int threads, const Gates& gates);

/// Largest entrywise gap between the G(n,p) covariance conditioned on the
/// edge statistic and the G(n,m) covariance.
double transfer_max_deviation(double lambda, int K);

/// Largest entrywise gap between gnp - gnm and (2 / lambda) g g^T.
double rank_one_gap_deviation(double lambda, int K);

/// Largest gap between conditioning the allocation system directly and
/// through the cumulative-sum transform (J + 1 coordinates).
double cumulative_transform_deviation(double lambda, int J);

/// Analytic identities; no sampling.
VerificationReport transfer_report(double lambda, int K);

struct MonotoneSuiteResult {
  int empty_box_pairs = 0;
  int empty_box_violations = 0;
  int cumulative_occupancy_pairs = 0;
  int cumulative_occupancy_violations = 0;
  int cumulative_degree_pairs = 0;
  int cumulative_degree_violations = 0;
  int couplings = 0;
  int coupling_failures = 0;
};

/// Exact stochastic-monotonicity checks: empty-box laws for n <= n_max,
/// m <= m_max; cumulative occupancy counts (boxes with <= j balls, j <= 4)
/// for the same range; cumulative degree counts for n = 4, every m and j;
/// an order-respecting exact quantile coupling for every consecutive pair.
MonotoneSuiteResult run_monotone_suite(int n_max, int m_max);
VerificationReport monotone_report(int n_max, int m_max);

/// Octant scan, witness and direction checks for the canonical pair
/// X = (U + V, U - V), Y = (U + W, U - W).
VerificationReport cwold_report(double h, double T);

}  // namespace condclt
