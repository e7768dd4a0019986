#include "condclt/limit_theory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "condclt/errors.hpp"
#include "condclt/gauss_cond.hpp"

namespace condclt {
namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    std::ostringstream os;
    os << "lambda must be positive, got " << lambda;
    fail(ErrorCode::InvalidLambda, os.str());
  }
}

void check_index(int i) {
  require(i >= 0, ErrorCode::InvalidParameter, "index must be non-negative");
}

// pi(i) pi(j) (sign (i - l)(j - l) / l - 1) + delta_ij pi(i).
// sign = -1 gives the fixed-count covariance (allocations and G(n, m)),
// sign = +1 the independent-edge one.
double occupancy_kernel(double lambda, int i, int j, double sign) {
  check_lambda(lambda);
  check_index(i);
  check_index(j);
  const double pi = poisson_pmf(lambda, i);
  const double pj = poisson_pmf(lambda, j);
  const double corr = sign * (i - lambda) * (j - lambda) / lambda - 1.0;
  double v = pi * pj * corr;
  if (i == j) v += pi;
  return v;
}

}  // namespace

std::string_view to_string(Model model) {
  switch (model) {
    case Model::Alloc: return "ALLOC";
    case Model::Gnp: return "GNP";
    case Model::Gnm: return "GNM";
  }
  return "?";
}

double poisson_pmf(double lambda, std::int64_t k) {
  check_lambda(lambda);
  if (k < 0) return 0.0;
  if (k <= 30) {
    double fact = 1.0;
    for (std::int64_t i = 2; i <= k; ++i) fact *= static_cast<double>(i);
    return std::pow(lambda, static_cast<double>(k)) * std::exp(-lambda) / fact;
  }
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0));
}

double poisson_tail(double lambda, int K) {
  check_lambda(lambda);
  if (K < 0) return 1.0;
  // Below the mode the tail is not small; the complement is accurate there.
  if (K < lambda) {
    double head = 0.0;
    for (int k = 0; k <= K; ++k) head += poisson_pmf(lambda, k);
    return std::max(0.0, 1.0 - head);
  }
  double sum = 0.0;
  for (std::int64_t k = K + 1;; ++k) {
    const double term = poisson_pmf(lambda, k);
    sum += term;
    if (term < 1e-300 || term < sum * 1e-18) break;
  }
  return sum;
}

int truncation_for(double lambda, double tol) {
  check_lambda(lambda);
  int K = static_cast<int>(std::ceil(lambda));
  while (poisson_tail(lambda, K) >= tol) ++K;
  return K;
}

PoissonParams make_poisson_params(double lambda, int K) {
  check_lambda(lambda);
  require(K >= 0, ErrorCode::InvalidParameter, "K must be non-negative");
  const double tail = poisson_tail(lambda, K);
  if (!(tail < kTailMassGate)) {
    std::ostringstream os;
    os << "tail mass P(Po(" << lambda << ") > " << K << ") = " << tail << " exceeds "
       << kTailMassGate;
    fail(ErrorCode::TruncationError, os.str());
  }
  return {lambda, K};
}

double alloc_cov(double lambda, int i, int j) { return occupancy_kernel(lambda, i, j, -1.0); }

double gnp_degree_cov(double lambda, int j, int k) { return occupancy_kernel(lambda, j, k, 1.0); }

double gnm_degree_cov(double lambda, int j, int k) { return occupancy_kernel(lambda, j, k, -1.0); }

double model_cov(Model model, double lambda, int j, int k) {
  switch (model) {
    case Model::Alloc: return alloc_cov(lambda, j, k);
    case Model::Gnp: return gnp_degree_cov(lambda, j, k);
    case Model::Gnm: return gnm_degree_cov(lambda, j, k);
  }
  return 0.0;
}

double expected_degree_count_exact(std::int64_t n, double p, std::int64_t k) {
  require(n >= 2, ErrorCode::InvalidParameter, "n must be >= 2");
  require(p > 0.0 && p < 1.0, ErrorCode::InvalidParameter, "p must lie in (0, 1)");
  require(k >= 0 && k <= n - 1, ErrorCode::InvalidParameter, "k must lie in [0, n-1]");
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  const double log_choose =
      std::lgamma(nn) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk);
  const double log_term =
      std::log(nn) + log_choose + kk * std::log(p) + (nn - 1.0 - kk) * std::log1p(-p);
  return std::exp(log_term);
}

double weiss_variance(double lambda) {
  check_lambda(lambda);
  const double e1 = std::exp(-lambda);
  const double e2 = std::exp(-2.0 * lambda);
  const double closed = e1 - e2 - lambda * e2;
  const double via_regression = residual_variance(e1 * (1.0 - e1), lambda, -lambda * e1);
  if (std::abs(closed - via_regression) > 1e-14) {
    fail(ErrorCode::InvalidCovariance, "Weiss variance routes disagree");
  }
  return std::max(0.0, closed);
}

SpacingsConstants spacings_limit_constants(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) fail(ErrorCode::InvalidA, "a must be positive");
  const double ea = std::exp(-a);
  const double e2a = std::exp(-2.0 * a);
  SpacingsConstants c;
  c.sx2 = ea * (1.0 - ea);
  c.sxy = a * ea;
  c.sy2 = 1.0;
  c.residual = residual_variance(c.sx2, c.sy2, c.sxy);
  const double closed = ea - e2a - a * a * e2a;
  if (std::abs(closed - c.residual) > 1e-14) {
    fail(ErrorCode::InvalidCovariance, "spacings residual routes disagree");
  }
  return c;
}

TheoryCovariance theory_covariance(Model model, double lambda, int K) {
  check_lambda(lambda);
  require(K >= 0, ErrorCode::InvalidParameter, "K must be non-negative");
  Eigen::MatrixXd m(K + 1, K + 1);
  for (int i = 0; i <= K; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = model_cov(model, lambda, i, j);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return {model, lambda, std::move(m)};
}

double lincomb_variance(double lambda, const std::vector<double>& coeffs, Model model) {
  check_lambda(lambda);
  require(!coeffs.empty(), ErrorCode::InvalidParameter, "coefficient vector is empty");
  const int K = static_cast<int>(coeffs.size()) - 1;
  const TheoryCovariance th = theory_covariance(model, lambda, K);
  const Eigen::Map<const Eigen::VectorXd> a(coeffs.data(), K + 1);
  const double q = a.dot(th.matrix * a);

  // Geometric envelope |a_k| <= C A^k fitted on the given coefficients.
  double growth = 1.0;
  for (int k = 1; k <= K; ++k) {
    if (coeffs[k - 1] != 0.0) growth = std::max(growth, std::abs(coeffs[k] / coeffs[k - 1]));
  }
  double scale = 0.0;
  for (int k = 0; k <= K; ++k) {
    scale = std::max(scale, std::abs(coeffs[k]) / std::pow(growth, k));
  }
  // sd(sum_{k>K} a_k U_k) <= sum_{k>K} |a_k| sd(U_k); Var(X+T) - Var(X)
  // <= 2 sd(X) sd(T) + Var(T).
  double tail_sd = 0.0;
  for (int k = K + 1; k <= K + 400; ++k) {
    const double s = std::sqrt(std::max(0.0, model_cov(model, lambda, k, k)));
    const double term = scale * std::exp(k * std::log(growth)) * s;
    tail_sd += term;
    if (term < 1e-30 && k > K + 10) break;
  }
  const double tail = 2.0 * std::sqrt(std::max(q, 0.0)) * tail_sd + tail_sd * tail_sd;
  if (!(tail <= 1e-9)) {
    std::ostringstream os;
    os << "estimated truncation contribution " << tail << " exceeds 1e-9 at K = " << K;
    fail(ErrorCode::TruncationError, os.str());
  }
  if (q < -1e-10) fail(ErrorCode::InvalidCovariance, "quadratic form is negative");
  return std::max(q, 0.0);
}

EdgeStatMoments edge_stat_moments(double lambda, int K) {
  make_poisson_params(lambda, K);
  const TheoryCovariance th = theory_covariance(Model::Gnp, lambda, K);
  Eigen::VectorXd half_k(K + 1);
  for (int k = 0; k <= K; ++k) half_k(k) = 0.5 * k;
  EdgeStatMoments out;
  out.cov_with_v = th.matrix * half_k;
  out.var_v = half_k.dot(out.cov_with_v);
  return out;
}

}  // namespace condclt
