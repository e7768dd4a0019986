#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "condclt/errors.hpp"
#include "condclt/gauss_cond.hpp"
#include "condclt/limit_theory.hpp"

using namespace condclt;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::Io;
}

// Recurrence pi(k) = pi(k-1) * lambda / k, independent of the library route.
std::vector<double> pmf_table(double lambda, int K) {
  std::vector<double> p(K + 1);
  p[0] = std::exp(-lambda);
  for (int k = 1; k <= K; ++k) p[k] = p[k - 1] * lambda / k;
  return p;
}

}  // namespace

TEST_CASE("poisson_pmf") {
  CHECK(poisson_pmf(1.0, 0) == Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(poisson_pmf(2.0, 1) == Approx(2 * std::exp(-2.0)).epsilon(1e-15));
  CHECK(poisson_pmf(1.0, 0) == Approx(0.3678794).epsilon(1e-7));
  CHECK(poisson_pmf(2.0, 1) == Approx(0.2706706).epsilon(1e-7));
  for (double lambda : {0.1, 1.0, 5.0, 30.0, 200.0}) {
    double total = 0.0;
    const int K = truncation_for(lambda);
    for (int k = 0; k <= K; ++k) {
      const double p = poisson_pmf(lambda, k);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      total += p;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
  // log-space branch against the recurrence
  const auto table = pmf_table(3.0, 80);
  for (int k = 25; k <= 80; ++k) CHECK(poisson_pmf(3.0, k) == Approx(table[k]).epsilon(1e-12));
  CHECK(code_of([] { poisson_pmf(0.0, 1); }) == ErrorCode::InvalidLambda);
  CHECK(code_of([] { poisson_pmf(-1.0, 1); }) == ErrorCode::InvalidLambda);
}

TEST_CASE("truncation and tail gate") {
  const int K = truncation_for(2.0);
  CHECK(poisson_tail(2.0, K) < kTailMassGate);
  CHECK(poisson_tail(2.0, K - 1) >= kTailMassGate);
  CHECK(make_poisson_params(2.0, 60).K == 60);
  CHECK(code_of([] { make_poisson_params(2.0, 5); }) == ErrorCode::TruncationError);
  CHECK(poisson_tail(2.0, 0) == Approx(1 - std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("alloc_cov examples") {
  const double e2 = std::exp(-2.0), e4 = std::exp(-4.0);
  CHECK(alloc_cov(2, 0, 0) == Approx(e2 - 3 * e4).epsilon(1e-14));
  CHECK(alloc_cov(2, 0, 0) == Approx(0.080388).epsilon(1e-5));
  CHECK(alloc_cov(2, 0, 1) == Approx(-4 * e4).epsilon(1e-14));
  CHECK(alloc_cov(2, 0, 1) == Approx(-0.073263).epsilon(1e-5));
  CHECK(alloc_cov(1, 1, 1) >= 0.0);
  CHECK(alloc_cov(2, 3, 5) == alloc_cov(2, 5, 3));
  CHECK(code_of([] { alloc_cov(0, 0, 0); }) == ErrorCode::InvalidLambda);
}

TEST_CASE("gnp_degree_cov examples") {
  const double e2 = std::exp(-2.0), e4 = std::exp(-4.0);
  CHECK(gnp_degree_cov(2, 0, 0) == Approx(e2 + e4).epsilon(1e-14));
  CHECK(gnp_degree_cov(2, 0, 0) == Approx(0.153651).epsilon(1e-5));
  CHECK(gnp_degree_cov(2, 0, 1) == 0.0);
  for (int k = 0; k <= 10; ++k) {
    const double p = poisson_pmf(1.0, k);
    CHECK(gnp_degree_cov(1, k, k) == Approx(p * p * ((k - 1.0) * (k - 1.0) - 1) + p).epsilon(1e-13));
  }
  CHECK(code_of([] { gnp_degree_cov(-2, 0, 0); }) == ErrorCode::InvalidLambda);
}

TEST_CASE("gnm_degree_cov examples and the allocation identity") {
  const double e2 = std::exp(-2.0), e4 = std::exp(-4.0);
  CHECK(gnm_degree_cov(2, 0, 0) == Approx(e2 - 3 * e4).epsilon(1e-14));
  CHECK(gnm_degree_cov(2, 0, 1) == Approx(-4 * e4).epsilon(1e-14));
  for (double lambda : {0.5, 1.0, 2.0, 4.0})
    for (int i = 0; i <= 60; ++i)
      for (int j = 0; j <= 60; ++j) REQUIRE(alloc_cov(lambda, i, j) == gnm_degree_cov(lambda, i, j));
  CHECK(code_of([] { gnm_degree_cov(0, 0, 0); }) == ErrorCode::InvalidLambda);
}

TEST_CASE("model_cov dispatch") {
  CHECK(model_cov(Model::Alloc, 2, 1, 2) == alloc_cov(2, 1, 2));
  CHECK(model_cov(Model::Gnp, 2, 1, 2) == gnp_degree_cov(2, 1, 2));
  CHECK(model_cov(Model::Gnm, 2, 1, 2) == gnm_degree_cov(2, 1, 2));
}

TEST_CASE("expected_degree_count_exact") {
  CHECK(expected_degree_count_exact(3, 0.5, 2) == Approx(0.75).epsilon(1e-14));
  CHECK(expected_degree_count_exact(2, 0.5, 0) == Approx(1.0).epsilon(1e-14));
  for (std::int64_t n : {2, 7, 50, 1000}) {
    double total = 0.0;
    for (std::int64_t k = 0; k < n; ++k) total += expected_degree_count_exact(n, 0.3, k);
    CHECK(std::abs(total - n) < 1e-9);
  }
  const double n = 1e4;
  const double exact = expected_degree_count_exact(10000, 2.0 / n, 0);
  const double limit = n * std::exp(-2.0);
  CHECK(std::abs(exact - limit) / limit < 1e-3);
  CHECK(code_of([] { expected_degree_count_exact(1, 0.5, 0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { expected_degree_count_exact(5, 1.5, 0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { expected_degree_count_exact(5, 0.5, 5); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("weiss_variance") {
  CHECK(weiss_variance(1.0) == Approx(std::exp(-1.0) - 2 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(weiss_variance(1.0) == Approx(0.0972088).epsilon(1e-6));
  CHECK(weiss_variance(2.0) == Approx(alloc_cov(2, 0, 0)).epsilon(1e-14));
  double prev = weiss_variance(2.0);
  for (double lambda = 2.5; lambda <= 30; lambda += 0.5) {
    const double v = weiss_variance(lambda);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  CHECK(code_of([] { weiss_variance(0.0); }) == ErrorCode::InvalidLambda);
}

TEST_CASE("spacings_limit_constants") {
  const auto c = spacings_limit_constants(1.0);
  CHECK(c.sx2 == Approx(0.232544).epsilon(1e-5));
  CHECK(c.sxy == Approx(0.367879).epsilon(1e-5));
  CHECK(c.sy2 == 1.0);
  CHECK(c.residual == Approx(0.097208).epsilon(1e-5));
  CHECK(spacings_limit_constants(std::log(2.0)).sx2 == Approx(0.25).epsilon(1e-14));
  CHECK(spacings_limit_constants(1e-6).residual < 1e-5);
  for (double a : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const auto s = spacings_limit_constants(a);
    const double closed = std::exp(-a) - std::exp(-2 * a) - a * a * std::exp(-2 * a);
    CHECK(std::abs(s.residual - closed) < 1e-14);
    CHECK(std::abs(s.residual - residual_variance(s.sx2, s.sy2, s.sxy)) < 1e-14);
  }
  CHECK(code_of([] { spacings_limit_constants(0.0); }) == ErrorCode::InvalidA);
}

TEST_CASE("lincomb_variance") {
  std::vector<double> onehot(61, 0.0);
  onehot[3] = 1.0;
  CHECK(lincomb_variance(2.0, onehot, Model::Gnp) == Approx(gnp_degree_cov(2, 3, 3)).epsilon(1e-14));

  std::vector<double> half_k(61);
  for (int k = 0; k <= 60; ++k) half_k[k] = 0.5 * k;
  CHECK(std::abs(lincomb_variance(2.0, half_k, Model::Gnm)) < 1e-10);
  CHECK(lincomb_variance(2.0, half_k, Model::Gnp) == Approx(1.0).epsilon(1e-6));

  // exponentially growing weights truncated far too early
  std::vector<double> steep(11);
  for (int k = 0; k <= 10; ++k) steep[k] = std::pow(3.0, k);
  CHECK(code_of([&] { lincomb_variance(2.0, steep, Model::Gnp); }) == ErrorCode::TruncationError);
}

TEST_CASE("edge_stat_moments against a direct truncated series") {
  const double lambda = 2.0;
  const int K = 60;
  const auto m = edge_stat_moments(lambda, K);
  CHECK(std::abs(m.var_v - lambda / 2) < 1e-9);
  CHECK(std::abs(m.cov_with_v(0) + 2 * std::exp(-2.0)) < 1e-9);
  const auto pi = pmf_table(lambda, K);
  double bilinear = 0.0;
  for (int k = 0; k <= K; ++k) {
    CHECK(std::abs(m.cov_with_v(k) - pi[k] * (k - lambda)) < 1e-9);
    bilinear += k * m.cov_with_v(k);
  }
  CHECK(bilinear == Approx(2 * m.var_v).epsilon(1e-12));
  CHECK(code_of([] { edge_stat_moments(2.0, 5); }) == ErrorCode::TruncationError);
}

TEST_CASE("matrix invariants") {
  for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
    const int K = 60;
    const auto gnp = theory_covariance(Model::Gnp, lambda, K).matrix;
    const auto gnm = theory_covariance(Model::Gnm, lambda, K).matrix;
    const auto alloc = theory_covariance(Model::Alloc, lambda, K).matrix;
    CHECK(min_eigenvalue(gnp) >= -1e-9);
    CHECK(min_eigenvalue(gnm) >= -1e-9);
    CHECK(min_eigenvalue(alloc) >= -1e-9);

    // rank-one gap with g_k built from the recurrence table
    const auto pi = pmf_table(lambda, K);
    double gap = 0.0;
    for (int j = 0; j <= K; ++j)
      for (int k = 0; k <= K; ++k) {
        const double g = (2.0 / lambda) * pi[j] * (j - lambda) * pi[k] * (k - lambda);
        gap = std::max(gap, std::abs(gnp(j, k) - gnm(j, k) - g));
      }
    CHECK(gap < 1e-12);

    for (int i = 0; i <= K; ++i) CHECK(std::abs(alloc.row(i).sum()) < 1e-8);
  }
}

TEST_CASE("transfer: conditioning the GNP system on the edge statistic gives GNM") {
  const double lambda = 2.0;
  const int K = 60;
  const auto gnp = theory_covariance(Model::Gnp, lambda, K).matrix;
  const auto m = edge_stat_moments(lambda, K);
  Eigen::MatrixXd cov(K + 2, K + 2);
  cov.topLeftCorner(K + 1, K + 1) = gnp;
  cov.col(K + 1).head(K + 1) = m.cov_with_v;
  cov.row(K + 1).head(K + 1) = m.cov_with_v.transpose();
  cov(K + 1, K + 1) = m.var_v;
  const JointGaussian jg(K + 1, 1, Eigen::VectorXd::Zero(K + 2), cov);
  const auto c = condition_on_scalar(jg, 0.0);
  const auto gnm = theory_covariance(Model::Gnm, lambda, K).matrix;
  CHECK((c.cov - gnm).cwiseAbs().maxCoeff() < 1e-10);
}
