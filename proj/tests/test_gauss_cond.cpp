#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "condclt/errors.hpp"
#include "condclt/gauss_cond.hpp"
#include "condclt/limit_theory.hpp"

using namespace condclt;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixXd m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

VectorXd vec(std::initializer_list<double> v) {
  VectorXd x(v.size());
  int i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::Io;
}

MatrixXd random_pd(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> z;
  MatrixXd b(d, d + 2);
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) b(i, j) = z(rng);
  MatrixXd s = b * b.transpose();
  return 0.5 * (s + s.transpose());
}

// Schur complement through the precision matrix: Var(X | Y) = ((Sigma^-1)_XX)^-1.
MatrixXd schur_via_precision(const MatrixXd& cov, int q) {
  const MatrixXd prec = cov.fullPivLu().inverse();
  return prec.topLeftCorner(q, q).fullPivLu().inverse();
}

}  // namespace

TEST_CASE("independent blocks: conditioning is a no-op") {
  const JointGaussian jg(1, 1, vec({0, 0}), mat({{1, 0}, {0, 1}}));
  const auto c = condition_on_vector(jg, vec({5}));
  CHECK(c.mean(0) == doctest::Approx(0.0));
  CHECK(c.cov(0, 0) == doctest::Approx(1.0));
  CHECK(c.gamma(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("bivariate rho = 0.6, y = 1") {
  const JointGaussian jg(1, 1, vec({0, 0}), mat({{1, 0.6}, {0.6, 1}}));
  const auto c = condition_on_vector(jg, vec({1}));
  CHECK(c.mean(0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(c.cov(0, 0) == doctest::Approx(0.64).epsilon(1e-14));
  CHECK(c.gamma(0, 0) == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("q = 2, r = 1 hand-computed Schur complement") {
  const JointGaussian jg(2, 1, vec({0, 0, 0}), mat({{1, 0, 0.5}, {0, 1, 0.5}, {0.5, 0.5, 1}}));
  const auto c = condition_on_vector(jg, vec({2}));
  CHECK(c.mean(0) == doctest::Approx(1.0));
  CHECK(c.mean(1) == doctest::Approx(1.0));
  CHECK(c.cov(0, 0) == doctest::Approx(0.75));
  CHECK(c.cov(0, 1) == doctest::Approx(-0.25));
  CHECK(c.cov(1, 1) == doctest::Approx(0.75));
  const auto s = condition_on_scalar(jg, 2.0);
  CHECK((s.cov - c.cov).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.mean - c.mean).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("condition_on_scalar: zero correlation leaves N(0,1)") {
  const JointGaussian jg(1, 1, vec({0, 0}), mat({{1, 0}, {0, 1}}));
  const auto c = condition_on_scalar(jg, 3.0);
  CHECK(c.mean(0) == 0.0);
  CHECK(c.cov(0, 0) == 1.0);
}

TEST_CASE("condition_on_scalar: spacings constants at a = 1") {
  const double e1 = std::exp(-1.0);
  const JointGaussian jg(1, 1, vec({0, 0}), mat({{e1 * (1 - e1), e1}, {e1, 1}}));
  const auto c = condition_on_scalar(jg, 0.0);
  const double closed = e1 - std::exp(-2.0) - std::exp(-2.0);
  CHECK(c.cov(0, 0) == doctest::Approx(closed).epsilon(1e-13));
  CHECK(c.cov(0, 0) == doctest::Approx(0.097208).epsilon(1e-5));
}

TEST_CASE("condition_on_scalar: degree counts conditioned on the edge statistic") {
  // Cov(U_k, V) and Var(V) by truncated series, independent of gauss_cond.
  const double lambda = 2.0;
  const int K = 60;
  MatrixXd cov(K + 2, K + 2);
  for (int j = 0; j <= K; ++j)
    for (int k = 0; k <= K; ++k) cov(j, k) = gnp_degree_cov(lambda, j, k);
  double var_v = 0.0;
  for (int k = 0; k <= K; ++k) {
    double s = 0.0;
    for (int j = 0; j <= K; ++j) s += 0.5 * j * cov(k, j);
    cov(k, K + 1) = cov(K + 1, k) = s;
    var_v += 0.5 * k * s;
  }
  cov(K + 1, K + 1) = var_v;
  const JointGaussian jg(K + 1, 1, VectorXd::Zero(K + 2), cov);
  const auto c = condition_on_scalar(jg, 0.0);
  double worst = 0.0;
  for (int j = 0; j <= K; ++j)
    for (int k = 0; k <= K; ++k) worst = std::max(worst, std::abs(c.cov(j, k) - gnm_degree_cov(lambda, j, k)));
  CHECK(worst < 1e-10);
}

TEST_CASE("residual_variance") {
  CHECK(residual_variance(1, 1, 0) == 1.0);
  CHECK(residual_variance(1, 1, 1) == doctest::Approx(0.0));
  const double e1 = std::exp(-1.0);
  CHECK(residual_variance(e1 * (1 - e1), 1, e1) == doctest::Approx(e1 - 2 * std::exp(-2.0)).epsilon(1e-13));
  CHECK(code_of([] { residual_variance(1, 1, 1.5); }) == ErrorCode::InvalidCovariance);
  CHECK(code_of([] { residual_variance(1, 0, 0); }) == ErrorCode::SingularYBlock);
}

TEST_CASE("residual variance lies in [0, sx2]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::uniform_real_distribution<double> rho(-1.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double sx2 = u(rng);
    const double sy2 = u(rng) + 1e-3;
    const double sxy = rho(rng) * std::sqrt(sx2 * sy2);
    const double r = residual_variance(sx2, sy2, sxy);
    CHECK(r >= 0.0);
    CHECK(r <= sx2);
  }
}

TEST_CASE("conjugate_by_transform") {
  // allocation system (1[W=j], W), W ~ Po(2), j = 0..5
  const double lambda = 2.0;
  const int J = 5;
  MatrixXd cov(J + 2, J + 2);
  for (int i = 0; i <= J; ++i) {
    const double pi = poisson_pmf(lambda, i);
    for (int j = 0; j <= J; ++j) cov(i, j) = (i == j ? pi : 0.0) - pi * poisson_pmf(lambda, j);
    cov(i, J + 1) = cov(J + 1, i) = (i - lambda) * pi;
  }
  cov(J + 1, J + 1) = lambda;
  const JointGaussian jg(J + 1, 1, VectorXd::Zero(J + 2), cov);
  const auto direct = condition_on_scalar(jg, 0.0);

  SUBCASE("identity") {
    const auto c = conjugate_by_transform(MatrixXd::Identity(J + 1, J + 1), jg, 0.0);
    CHECK((c.cov - direct.cov).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("cumulative sums") {
    MatrixXd T = MatrixXd::Zero(J + 1, J + 1);
    for (int i = 0; i <= J; ++i) T.row(i).head(i + 1).setOnes();
    const auto c = conjugate_by_transform(T, jg, 0.0);
    CHECK((c.cov - direct.cov).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((c.mean - direct.mean).cwiseAbs().maxCoeff() < 1e-10);
    // the conditioned covariance is the allocation limit covariance
    for (int i = 0; i <= J; ++i)
      for (int j = 0; j <= J; ++j) CHECK(std::abs(c.cov(i, j) - alloc_cov(lambda, i, j)) < 1e-10);
  }
  SUBCASE("scaling") {
    const auto c = conjugate_by_transform(2.0 * MatrixXd::Identity(J + 1, J + 1), jg, 0.0);
    CHECK((c.cov - direct.cov).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((c.gamma - direct.gamma).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("singular transform") {
    MatrixXd T = MatrixXd::Identity(J + 1, J + 1);
    T(0, 0) = 0.0;
    CHECK(code_of([&] { conjugate_by_transform(T, jg, 0.0); }) == ErrorCode::SingularTransform);
  }
}

TEST_CASE("error paths") {
  CHECK(code_of([] { JointGaussian(1, 1, vec({0, 0}), mat({{1, 0.5}, {0.4, 1}})); }) ==
        ErrorCode::InvalidCovariance);
  CHECK(code_of([] { JointGaussian(1, 1, vec({0, 0}), mat({{1, 2}, {2, 1}})); }) ==
        ErrorCode::InvalidCovariance);
  CHECK(code_of([] { JointGaussian(1, 1, vec({0}), mat({{1, 0}, {0, 1}})); }) ==
        ErrorCode::DimensionMismatch);
  const JointGaussian degenerate(1, 1, vec({0, 0}), mat({{1, 0}, {0, 0}}));
  CHECK(code_of([&] { condition_on_vector(degenerate, vec({0})); }) == ErrorCode::SingularYBlock);
  CHECK(code_of([&] { condition_on_scalar(degenerate, 0.0); }) == ErrorCode::SingularYBlock);
  // Var(Y) of rank one in r = 2: condition number beyond 1e12
  const JointGaussian rank_def(1, 2, vec({0, 0, 0}), mat({{1, 0, 0}, {0, 1, 1}, {0, 1, 1}}));
  CHECK(code_of([&] { condition_on_vector(rank_def, vec({0, 0})); }) == ErrorCode::SingularYBlock);
  const JointGaussian ok(1, 1, vec({0, 0}), mat({{1, 0.2}, {0.2, 1}}));
  CHECK(code_of([&] { condition_on_vector(ok, vec({0, 0})); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("Schur-complement equivalence on random PSD systems") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 200; ++t) {
    const int d = 3 + static_cast<int>(rng() % 4);  // 3..6
    const int r = 1 + static_cast<int>(rng() % (d - 1));
    const int q = d - r;
    const MatrixXd cov = random_pd(rng, d);
    VectorXd mean = VectorXd::Random(d);
    const JointGaussian jg(q, r, mean, cov);
    const VectorXd y = VectorXd::Random(r);
    const auto c = condition_on_vector(jg, y);
    const MatrixXd oracle = schur_via_precision(cov, q);
    CHECK((c.cov - oracle).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, cov.cwiseAbs().maxCoeff()));
    CHECK(min_eigenvalue(c.cov) >= 0.0);
  }
}

TEST_CASE("conditioning on an independent coordinate changes nothing") {
  const MatrixXd cov = mat({{2, 0.3, 0}, {0.3, 1, 0}, {0, 0, 4}});
  const JointGaussian jg(2, 1, vec({1, -1, 0}), cov);
  const auto c = condition_on_scalar(jg, 7.0);
  CHECK(c.gamma.cwiseAbs().maxCoeff() == 0.0);
  CHECK((c.cov - cov.topLeftCorner(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(c.mean(0) == 1.0);
  CHECK(c.mean(1) == -1.0);
}

TEST_CASE("sampling consistency: accepted draws near Y = xi match the conditional law") {
  const MatrixXd cov = mat({{1.0, 0.3, 0.5}, {0.3, 2.0, -0.6}, {0.5, -0.6, 1.5}});
  const VectorXd mean = vec({0.5, -1.0, 0.2});
  const JointGaussian jg(2, 1, mean, cov);
  const double xi = 0.7;
  const auto c = condition_on_scalar(jg, xi);

  const MatrixXd L = cov.llt().matrixL();
  std::mt19937_64 rng(99);
  std::normal_distribution<double> z;
  const double eps = 0.02;
  double n = 0, s0 = 0, s1 = 0, s00 = 0, s01 = 0, s11 = 0;
  for (int i = 0; i < 1000000; ++i) {
    const VectorXd draw = mean + L * VectorXd{{z(rng), z(rng), z(rng)}};
    if (std::abs(draw(2) - xi) >= eps) continue;
    n += 1;
    s0 += draw(0);
    s1 += draw(1);
    s00 += draw(0) * draw(0);
    s01 += draw(0) * draw(1);
    s11 += draw(1) * draw(1);
  }
  REQUIRE(n >= 1e4);
  const double m0 = s0 / n, m1 = s1 / n;
  const double v00 = s00 / n - m0 * m0, v11 = s11 / n - m1 * m1, v01 = s01 / n - m0 * m1;
  CHECK(std::abs(m0 - c.mean(0)) < 5 * std::sqrt(c.cov(0, 0) / n));
  CHECK(std::abs(m1 - c.mean(1)) < 5 * std::sqrt(c.cov(1, 1) / n));
  CHECK(std::abs(v00 - c.cov(0, 0)) < 5 * c.cov(0, 0) * std::sqrt(2.0 / n));
  CHECK(std::abs(v11 - c.cov(1, 1)) < 5 * c.cov(1, 1) * std::sqrt(2.0 / n));
  const double se01 = std::sqrt((c.cov(0, 0) * c.cov(1, 1) + c.cov(0, 1) * c.cov(0, 1)) / n);
  CHECK(std::abs(v01 - c.cov(0, 1)) < 5 * se01);
}
