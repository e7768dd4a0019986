#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

namespace condclt {

/// Running count, mean and co-moment matrix, plus per-coordinate third and
/// fourth central power sums. Updates and merges follow Welford / Chan /
/// Pebay, so merging partial accumulators matches sequential accumulation.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(int dim = 0);

  void add(std::span<const double> x);
  void merge(const MomentAccumulator& other);

  int dim() const { return static_cast<int>(mean_.size()); }
  std::int64_t count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  /// Sum of outer products of deviations from the mean.
  const Eigen::MatrixXd& comoment() const { return comoment_; }
  const Eigen::VectorXd& third_diag() const { return m3_; }
  const Eigen::VectorXd& fourth_diag() const { return m4_; }

  /// comoment / (count - 1).
  Eigen::MatrixXd covariance() const;
  /// Standard error of the sample variance of coordinate i, from the fourth
  /// central moment: sqrt((m4 - m2^2) / count).
  double variance_stderr(int i) const;

 private:
  void mirror_upper();

  std::int64_t count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd comoment_;
  Eigen::VectorXd m3_;
  Eigen::VectorXd m4_;
};

}  // namespace condclt
