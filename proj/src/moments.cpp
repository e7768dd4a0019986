#include "condclt/moments.hpp"

#include <algorithm>
#include <cmath>

#include "condclt/errors.hpp"

namespace condclt {

MomentAccumulator::MomentAccumulator(int dim)
    : mean_(Eigen::VectorXd::Zero(dim)),
      comoment_(Eigen::MatrixXd::Zero(dim, dim)),
      m3_(Eigen::VectorXd::Zero(dim)),
      m4_(Eigen::VectorXd::Zero(dim)) {}

void MomentAccumulator::add(std::span<const double> x) {
  require(static_cast<int>(x.size()) == dim(), ErrorCode::DimensionMismatch,
          "observation length differs from accumulator dimension");
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), dim());
  const double n1 = static_cast<double>(count_);
  ++count_;
  const double n = static_cast<double>(count_);
  const Eigen::VectorXd delta = v - mean_;
  const Eigen::VectorXd dn = delta / n;
  const Eigen::ArrayXd term1 = delta.array() * dn.array() * n1;
  const Eigen::ArrayXd m2 = comoment_.diagonal().array();
  m4_.array() += term1 * dn.array().square() * (n * n - 3.0 * n + 3.0) +
                 6.0 * dn.array().square() * m2 - 4.0 * dn.array() * m3_.array();
  m3_.array() += term1 * dn.array() * (n - 2.0) - 3.0 * dn.array() * m2;
  comoment_.noalias() += (n1 / n) * delta * delta.transpose();
  mirror_upper();
  mean_ += dn;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  require(other.dim() == dim(), ErrorCode::DimensionMismatch, "merging accumulators of different dimension");
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const Eigen::VectorXd delta = other.mean_ - mean_;
  const Eigen::ArrayXd d = delta.array();
  const Eigen::ArrayXd m2a = comoment_.diagonal().array();
  const Eigen::ArrayXd m2b = other.comoment_.diagonal().array();

  m4_.array() += other.m4_.array() +
                 d.pow(4) * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                 6.0 * d.square() * (na * na * m2b + nb * nb * m2a) / (n * n) +
                 4.0 * d * (na * other.m3_.array() - nb * m3_.array()) / n;
  m3_.array() += other.m3_.array() + d.cube() * na * nb * (na - nb) / (n * n) +
                 3.0 * d * (na * m2b - nb * m2a) / n;
  comoment_ += other.comoment_ + (na * nb / n) * delta * delta.transpose();
  mirror_upper();
  mean_ += delta * (nb / n);
  count_ += other.count_;
}

// Rounding in the outer product can break symmetry in the last bit.
void MomentAccumulator::mirror_upper() {
  comoment_.triangularView<Eigen::StrictlyLower>() = comoment_.transpose();
}

Eigen::MatrixXd MomentAccumulator::covariance() const {
  require(count_ >= 2, ErrorCode::InsufficientReplicates, "covariance needs at least 2 observations");
  return comoment_ / static_cast<double>(count_ - 1);
}

double MomentAccumulator::variance_stderr(int i) const {
  require(count_ >= 2, ErrorCode::InsufficientReplicates, "variance SE needs at least 2 observations");
  const double n = static_cast<double>(count_);
  const double m2 = comoment_(i, i) / n;
  const double m4 = m4_(i) / n;
  return std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
}

}  // namespace condclt
