#include "condclt/gauss_cond.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "condclt/errors.hpp"

namespace condclt {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdFloor = 1e-10;

void check_symmetric(const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    std::ostringstream os;
    os << "covariance not symmetric (max asymmetry " << asym << ")";
    fail(ErrorCode::InvalidCovariance, os.str());
  }
}

void check_psd(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return;
  const double floor = -kPsdFloor * std::max(m.trace(), 0.0);
  const double lo = min_eigenvalue(m);
  if (lo < floor) {
    std::ostringstream os;
    os << "covariance not positive semidefinite (smallest eigenvalue " << lo << ")";
    fail(ErrorCode::InvalidCovariance, os.str());
  }
}

// Symmetrize, verify PSD and clamp rounding-level negative eigenvalues to 0.
Eigen::MatrixXd clean_covariance(Eigen::MatrixXd m) {
  m = 0.5 * (m + m.transpose());
  check_psd(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.eigenvalues().minCoeff() < 0.0) {
    const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
    m = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    m = 0.5 * (m + m.transpose());
  }
  return m;
}

}  // namespace

double min_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

JointGaussian::JointGaussian(int q, int r, Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : q_(q), r_(r), mean_(std::move(mean)), cov_(std::move(cov)) {
  require(q_ > 0 && r_ > 0, ErrorCode::DimensionMismatch, "block dimensions must be positive");
  const Eigen::Index d = q_ + r_;
  require(mean_.size() == d, ErrorCode::DimensionMismatch, "mean length != q + r");
  require(cov_.rows() == d && cov_.cols() == d, ErrorCode::DimensionMismatch,
          "covariance shape != (q + r) x (q + r)");
  check_symmetric(cov_);
  check_psd(cov_);
}

double JointGaussian::y_condition_number() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_yy(), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

ConditionalGaussian condition_on_vector(const JointGaussian& jg, const Eigen::VectorXd& y) {
  require(y.size() == jg.r(), ErrorCode::DimensionMismatch, "conditioning value length != r");
  const double cond = jg.y_condition_number();
  if (!(cond <= kMaxConditionNumber)) {
    std::ostringstream os;
    os << "Var(Y) condition number " << cond << " exceeds " << kMaxConditionNumber;
    fail(ErrorCode::SingularYBlock, os.str());
  }
  const Eigen::MatrixXd syy = jg.cov_yy();
  const Eigen::MatrixXd sxy = jg.cov_xy();
  // A = Sxy Syy^{-1}  <=>  Syy A^T = Syx
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(syy);
  const Eigen::MatrixXd a = ldlt.solve(sxy.transpose()).transpose();

  ConditionalGaussian out;
  out.gamma = a;
  out.mean = jg.mean_x() + a * (y - jg.mean_y());
  out.cov = clean_covariance(jg.cov_xx() - a * sxy.transpose());
  return out;
}

ConditionalGaussian condition_on_scalar(const JointGaussian& jg, double xi) {
  require(jg.r() == 1, ErrorCode::DimensionMismatch, "condition_on_scalar needs r = 1");
  const double var_y = jg.cov()(jg.q(), jg.q());
  if (!(var_y > 0.0)) fail(ErrorCode::SingularYBlock, "Var(Y) <= 0");

  const int q = jg.q();
  const Eigen::VectorXd cov_x_y = jg.cov().col(q).head(q);
  const Eigen::VectorXd gamma = cov_x_y / var_y;

  ConditionalGaussian out;
  out.gamma = gamma;
  out.mean = jg.mean_x() + (xi - jg.mean()(q)) * gamma;
  Eigen::MatrixXd cov(q, q);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double c = jg.cov()(i, j) - cov_x_y(i) * cov_x_y(j) / var_y;
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  out.cov = clean_covariance(std::move(cov));
  return out;
}

double residual_variance(double sx2, double sy2, double sxy) {
  require(sy2 > 0.0, ErrorCode::SingularYBlock, "sy2 must be positive");
  require(sx2 >= 0.0, ErrorCode::InvalidCovariance, "sx2 must be non-negative");
  const double excess = sxy * sxy - sx2 * sy2;
  if (excess > 1e-12 * std::max(1.0, sx2 * sy2)) {
    fail(ErrorCode::InvalidCovariance, "Cauchy-Schwarz violated: sxy^2 > sx2 * sy2");
  }
  const double res = std::clamp(sx2 - sxy * sxy / sy2, 0.0, sx2);
  if (sx2 > 0.0) {
    const double rho = sxy / std::sqrt(sx2 * sy2);
    const double alt = std::max(0.0, (1.0 - rho * rho) * sx2);
    if (std::abs(alt - res) > 1e-12 * std::max(1.0, sx2)) {
      fail(ErrorCode::InvalidCovariance, "residual variance routes disagree");
    }
  }
  return res;
}

ConditionalGaussian conjugate_by_transform(const Eigen::MatrixXd& T, const JointGaussian& jg,
                                           double xi) {
  const int q = jg.q();
  require(T.rows() == q && T.cols() == q, ErrorCode::DimensionMismatch,
          "transform must be q x q");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(T);
  const auto& sv = svd.singularValues();
  const double lo = sv(sv.size() - 1);
  if (!(lo > 0.0) || sv(0) / lo > kMaxConditionNumber) {
    fail(ErrorCode::SingularTransform, "transform is numerically singular");
  }

  const int d = q + jg.r();
  Eigen::MatrixXd full = Eigen::MatrixXd::Identity(d, d);
  full.topLeftCorner(q, q) = T;
  Eigen::MatrixXd tcov = full * jg.cov() * full.transpose();
  tcov = 0.5 * (tcov + tcov.transpose());
  const JointGaussian transformed(q, jg.r(), full * jg.mean(), tcov);
  const ConditionalGaussian c = condition_on_scalar(transformed, xi);

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(T);
  const Eigen::MatrixXd tinv = lu.inverse();
  ConditionalGaussian out;
  out.mean = tinv * c.mean;
  out.gamma = tinv * c.gamma;
  out.cov = clean_covariance(tinv * c.cov * tinv.transpose());
  return out;
}

}  // namespace condclt
