#pragma once

#include <Eigen/Dense>

namespace condclt {

/// Joint normal law of (X, Y) with X in R^q and Y in R^r. The first q
/// coordinates of `mean` and `cov` belong to X, the last r to Y.
class JointGaussian {
 public:
  /// Validates symmetry (1e-12 relative) and positive semidefiniteness
  /// (smallest eigenvalue >= -1e-10 * trace). Throws InvalidCovariance or
  /// DimensionMismatch.
  JointGaussian(int q, int r, Eigen::VectorXd mean, Eigen::MatrixXd cov);

  int q() const { return q_; }
  int r() const { return r_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }

  Eigen::VectorXd mean_x() const { return mean_.head(q_); }
  Eigen::VectorXd mean_y() const { return mean_.tail(r_); }
  Eigen::MatrixXd cov_xx() const { return cov_.topLeftCorner(q_, q_); }
  Eigen::MatrixXd cov_xy() const { return cov_.topRightCorner(q_, r_); }
  Eigen::MatrixXd cov_yy() const { return cov_.bottomRightCorner(r_, r_); }

  /// Condition number of Var(Y) in the 2-norm; +inf when not positive definite.
  double y_condition_number() const;

 private:
  int q_;
  int r_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

/// Law of X given Y = y: mean, covariance and regression matrix A (q x r).
struct ConditionalGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd gamma;
};

inline constexpr double kMaxConditionNumber = 1e12;

/// X | Y = y  ~  X + A (y - Y),  A = Cov(X,Y) Var(Y)^{-1}.
ConditionalGaussian condition_on_vector(const JointGaussian& jg, const Eigen::VectorXd& y);

/// Scalar-Y specialization with gamma_i = Cov(X_i, Y) / Var(Y).
ConditionalGaussian condition_on_scalar(const JointGaussian& jg, double xi);

/// sx2 - sxy^2 / sy2, i.e. (1 - rho^2) sx2.
double residual_variance(double sx2, double sy2, double sxy);

/// Conditions the system (T X, Y) on Y = xi and maps the result back with
/// T^{-1}. Matches direct conditioning for any invertible T.
ConditionalGaussian conjugate_by_transform(const Eigen::MatrixXd& T, const JointGaussian& jg,
                                           double xi);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& sym);

}  // namespace condclt
