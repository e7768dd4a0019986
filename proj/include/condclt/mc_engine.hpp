#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "condclt/moments.hpp"
#include "condclt/report.hpp"
#include "condclt/rng.hpp"

namespace condclt {

/// Scaling sequences for a_n^{-1}(X_n - b_n) and c_n^{-1}(Y_n - d_n). The
/// implemented experiments condition at y_n = d_n, hence xi = 0.
struct StandardizationSpec {
  double a_n = 1.0;
  Eigen::VectorXd b_n;
  double c_n = 1.0;
  double d_n = 0.0;
  double y_n = 0.0;
  double xi = 0.0;

  void validate() const;
};

/// (x - b_n) / a_n componentwise.
Eigen::VectorXd standardize(std::span<const double> x, const StandardizationSpec& spec);

/// m balls into n boxes; statistic (Z^(0), ..., Z^(max_j)).
struct AllocParams {
  std::int64_t n;
  std::int64_t m;
  int max_j;
};

/// G(n, p); statistic (N_0, ..., N_max_k).
struct GnpParams {
  std::int64_t n;
  double p;
  int max_k;
};

/// G(n, m); statistic (N_0, ..., N_max_k).
struct GnmParams {
  std::int64_t n;
  std::int64_t m;
  int max_k;
};

/// n points on the circle; statistic N_a.
struct SpacingsParams {
  std::int64_t n;
  double a;
};

using ExperimentParams = std::variant<AllocParams, GnpParams, GnmParams, SpacingsParams>;

std::string experiment_name(const ExperimentParams& params);
int statistic_dim(const ExperimentParams& params);
void validate(const ExperimentParams& params);

/// Draws one replicate of the raw count statistic into `out`.
void sample_statistic(const ExperimentParams& params, Rng& rng, std::span<std::int64_t> out);

/// a_n = c_n = sqrt(n), b_n = n pi_{lambda_n}(k) with lambda_n = m/n
/// (allocations), 2m/n (G(n,m)) or n p (G(n,p)); b_n = n e^{-a} for spacings.
StandardizationSpec default_standardization(const ExperimentParams& params);

/// lambda_n used for centering; for spacings returns a.
double finite_n_lambda(const ExperimentParams& params);

inline constexpr int kBatchCount = 20;

struct ExperimentResult {
  ExperimentParams params;
  std::uint64_t seed = 0;
  std::int64_t reps = 0;
  int dim = 0;
  std::vector<std::int64_t> counts;   // reps x dim, row-major
  std::vector<double> standardized;   // reps x dim, row-major
  MomentAccumulator acc;
  std::vector<MomentAccumulator> batches;  // kBatchCount equal index ranges

  std::vector<double> column(int i) const;
};

/// Runs `reps` independent replicates. Replicate r uses stream_for(seed, r);
/// accumulation happens in index order after all workers finish, so the
/// result does not depend on `threads` (0 = CONDCLT_THREADS or hardware).
ExperimentResult run_experiment(const ExperimentParams& params, std::int64_t reps,
                                std::uint64_t seed, int threads = 0,
                                const std::optional<StandardizationSpec>& standardization = {});

/// Accumulates rows of a reps x dim matrix in index order.
MomentAccumulator accumulate_rows(std::span<const double> rows, int dim, std::int64_t begin,
                                  std::int64_t end);

/// Worker count from CONDCLT_THREADS, else hardware concurrency.
int default_thread_count();

/// Mean entries (SE sqrt(var / R)) and upper-triangle covariance entries
/// (batch-means SE over kBatchCount batches). pass iff max |z| <= z_gate.
VerificationReport compare_to_theory(const ExperimentResult& result,
                                     const Eigen::VectorXd& theory_mean,
                                     const Eigen::MatrixXd& theory_cov, double z_gate = 4.0);

/// Kolmogorov-Smirnov sup distance between the empirical CDF of `samples`
/// and N(mu, sigma2). Needs >= 1000 samples.
double normality_distance(std::span<const double> samples, double mu, double sigma2);

/// Moment comparisons up to `max_order` (1: means, 2: also variances with
/// fourth-moment SE and covariances with batch SE).
std::vector<Comparison> moment_convergence_check(const ExperimentResult& result,
                                                 const Eigen::VectorXd& theory_mean,
                                                 const Eigen::MatrixXd& theory_cov,
                                                 int max_order = 2);

/// z-score with the convention that a zero SE and an exact match give 0.
double z_score(double estimate, double theory, double se);

}  // namespace condclt
