#include "condclt/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <span>
#include <cmath>
#include <string>

#include "condclt/cwold.hpp"
#include "condclt/errors.hpp"
#include "condclt/gauss_cond.hpp"
#include "condclt/limit_theory.hpp"
#include "condclt/monotone.hpp"

namespace condclt {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

nlohmann::ordered_json params_json(const ExperimentParams& params) {
  nlohmann::ordered_json j;
  std::visit(overloaded{[&](const AllocParams& p) {
                          j["n"] = p.n;
                          j["m"] = p.m;
                          j["max_k"] = p.max_j;
                        },
                        [&](const GnpParams& p) {
                          j["n"] = p.n;
                          j["p"] = p.p;
                          j["max_k"] = p.max_k;
                        },
                        [&](const GnmParams& p) {
                          j["n"] = p.n;
                          j["m"] = p.m;
                          j["max_k"] = p.max_k;
                        },
                        [&](const SpacingsParams& p) {
                          j["n"] = p.n;
                          j["a"] = p.a;
                        }},
             params);
  j["lambda_n"] = finite_n_lambda(params);
  return j;
}

Model model_of(const ExperimentParams& params) {
  if (std::holds_alternative<GnpParams>(params)) return Model::Gnp;
  if (std::holds_alternative<GnmParams>(params)) return Model::Gnm;
  return Model::Alloc;
}

JointGaussian degree_system(double lambda, int K) {
  const TheoryCovariance gnp = theory_covariance(Model::Gnp, lambda, K);
  const EdgeStatMoments ev = edge_stat_moments(lambda, K);
  Eigen::MatrixXd cov(K + 2, K + 2);
  cov.topLeftCorner(K + 1, K + 1) = gnp.matrix;
  cov.topRightCorner(K + 1, 1) = ev.cov_with_v;
  cov.bottomLeftCorner(1, K + 1) = ev.cov_with_v.transpose();
  cov(K + 1, K + 1) = ev.var_v;
  return JointGaussian(K + 1, 1, Eigen::VectorXd::Zero(K + 2), cov);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Empty, cumulative occupancy and cumulative degree laws share this check.
void check_chain(const ExactLaw& lower_m, const ExactLaw& higher_m, int& pairs, int& violations,
                 int& couplings, int& coupling_failures) {
  // decreasing in m: law at m + 1 is dominated by the law at m
  ++pairs;
  if (!check_stochastic_dominance(higher_m, lower_m).holds) {
    ++violations;
    return;
  }
  ++couplings;
  const auto atoms = quantile_coupling(higher_m, lower_m);
  Rational total = 0;
  bool ok = true;
  for (const auto& a : atoms) {
    ok = ok && a.x1 <= a.x2 && a.prob > 0;
    total += a.prob;
  }
  for (std::size_t i = 0; i < higher_m.support.size(); ++i) {
    Rational marginal = 0;
    for (const auto& a : atoms) {
      if (a.x1 == higher_m.support[i]) marginal += a.prob;
    }
    ok = ok && marginal == higher_m.probability(higher_m.support[i]);
  }
  for (std::size_t i = 0; i < lower_m.support.size(); ++i) {
    Rational marginal = 0;
    for (const auto& a : atoms) {
      if (a.x2 == lower_m.support[i]) marginal += a.prob;
    }
    ok = ok && marginal == lower_m.probability(lower_m.support[i]);
  }
  if (!ok || total != 1) ++coupling_failures;
}

}  // namespace

TheoryMoments limit_moments(const ExperimentParams& params) {
  validate(params);
  const int dim = statistic_dim(params);
  TheoryMoments th{Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, dim)};
  if (const auto* s = std::get_if<SpacingsParams>(&params)) {
    th.cov(0, 0) = spacings_limit_constants(s->a).residual;
    return th;
  }
  th.cov = theory_covariance(model_of(params), finite_n_lambda(params), dim - 1).matrix;
  return th;
}

VerificationReport mc_verification(const ExperimentResult& result, const TheoryMoments& theory,
                                   const Gates& gates, bool ks_checks) {
  VerificationReport rep = compare_to_theory(result, theory.mean, theory.cov, gates.z_gate);
  rep.parameters = params_json(result.params);
  rep.parameters["reps"] = result.reps;
  rep.parameters["z_gate"] = gates.z_gate;
  if (ks_checks) {
    rep.parameters["ks_gate"] = gates.ks_gate;
    for (int i = 0; i < result.dim; ++i) {
      if (!(theory.cov(i, i) > 0.0)) continue;
      const double d = normality_distance(result.column(i), theory.mean(i), theory.cov(i, i));
      rep.scalar_checks.push_back({"ks_" + std::to_string(i), 0.0, d, gates.ks_gate, CheckKind::Within});
    }
  }
  rep.finalize();
  return rep;
}

VerificationReport run_mc_report(const ExperimentParams& params, std::int64_t reps,
                                 std::uint64_t seed, int threads, const Gates& gates) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult res = run_experiment(params, reps, seed, threads);
  const bool ks = std::holds_alternative<AllocParams>(params) ||
                  std::holds_alternative<SpacingsParams>(params);
  VerificationReport rep = mc_verification(res, limit_moments(params), gates, ks);
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

double transfer_max_deviation(double lambda, int K) {
  const ConditionalGaussian c = condition_on_scalar(degree_system(lambda, K), 0.0);
  const TheoryCovariance gnm = theory_covariance(Model::Gnm, lambda, K);
  return (c.cov - gnm.matrix).cwiseAbs().maxCoeff();
}

double rank_one_gap_deviation(double lambda, int K) {
  const Eigen::MatrixXd gap = theory_covariance(Model::Gnp, lambda, K).matrix -
                              theory_covariance(Model::Gnm, lambda, K).matrix;
  Eigen::VectorXd g(K + 1);
  for (int k = 0; k <= K; ++k) g(k) = poisson_pmf(lambda, k) * (k - lambda);
  return (gap - (2.0 / lambda) * g * g.transpose()).cwiseAbs().maxCoeff();
}

double cumulative_transform_deviation(double lambda, int J) {
  // (1[W = 0], ..., 1[W = J], W) for W ~ Po(lambda)
  Eigen::MatrixXd cov(J + 2, J + 2);
  for (int i = 0; i <= J; ++i) {
    const double pi = poisson_pmf(lambda, i);
    for (int j = 0; j <= J; ++j) cov(i, j) = (i == j ? pi : 0.0) - pi * poisson_pmf(lambda, j);
    cov(i, J + 1) = cov(J + 1, i) = (i - lambda) * pi;
  }
  cov(J + 1, J + 1) = lambda;
  const JointGaussian jg(J + 1, 1, Eigen::VectorXd::Zero(J + 2), cov);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(J + 1, J + 1);
  for (int i = 0; i <= J; ++i) T.row(i).head(i + 1).setOnes();
  const ConditionalGaussian direct = condition_on_scalar(jg, 0.0);
  const ConditionalGaussian via = conjugate_by_transform(T, jg, 0.0);
  return std::max({(direct.cov - via.cov).cwiseAbs().maxCoeff(),
                   (direct.mean - via.mean).cwiseAbs().maxCoeff(),
                   (direct.gamma - via.gamma).cwiseAbs().maxCoeff()});
}

VerificationReport transfer_report(double lambda, int K) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.experiment = "transfer";
  rep.parameters["lambda"] = lambda;
  rep.parameters["K"] = K;
  rep.scalar_checks.push_back(
      {"conditioned_gnp_vs_gnm", 0.0, transfer_max_deviation(lambda, K), 1e-10, CheckKind::Within});
  rep.scalar_checks.push_back(
      {"rank_one_gap", 0.0, rank_one_gap_deviation(lambda, K), 1e-12, CheckKind::Within});
  const double alloc_gnm = (theory_covariance(Model::Alloc, lambda, K).matrix -
                            theory_covariance(Model::Gnm, lambda, K).matrix)
                               .cwiseAbs()
                               .maxCoeff();
  rep.scalar_checks.push_back({"alloc_equals_gnm", 0.0, alloc_gnm, 0.0, CheckKind::Within});
  rep.scalar_checks.push_back({"cumulative_transform_commutes", 0.0,
                               cumulative_transform_deviation(lambda, std::min(K, 20)), 1e-10,
                               CheckKind::Within});
  rep.wall_time_s = seconds_since(t0);
  rep.finalize();
  return rep;
}

MonotoneSuiteResult run_monotone_suite(int n_max, int m_max) {
  require(n_max >= 1 && n_max <= 8 && m_max >= 1 && m_max <= 12, ErrorCode::OutOfDeskRange,
          "monotone suite needs 1 <= n <= 8 and 1 <= m <= 12");
  MonotoneSuiteResult r;
  for (int n = 1; n <= n_max; ++n) {
    for (int m = 0; m < m_max; ++m) {
      check_chain(exact_empty_box_counts(n, m), exact_empty_box_counts(n, m + 1), r.empty_box_pairs,
                  r.empty_box_violations, r.couplings, r.coupling_failures);
      for (int j = 0; j <= 4; ++j) {
        auto at_most_j = [j](std::span<const int> c) {
          return static_cast<std::int64_t>(std::count_if(c.begin(), c.end(), [j](int v) { return v <= j; }));
        };
        check_chain(occupancy_statistic_law(n, m, at_most_j),
                    occupancy_statistic_law(n, m + 1, at_most_j), r.cumulative_occupancy_pairs,
                    r.cumulative_occupancy_violations, r.couplings, r.coupling_failures);
      }
    }
  }
  constexpr int kGraphN = 4;
  for (int m = 0; m < kGraphN * (kGraphN - 1) / 2; ++m) {
    for (int j = 0; j < kGraphN; ++j) {
      auto at_most_j = [j](std::span<const int> d) {
        return static_cast<std::int64_t>(std::count_if(d.begin(), d.end(), [j](int v) { return v <= j; }));
      };
      check_chain(graph_statistic_law(kGraphN, m, at_most_j),
                  graph_statistic_law(kGraphN, m + 1, at_most_j), r.cumulative_degree_pairs,
                  r.cumulative_degree_violations, r.couplings, r.coupling_failures);
    }
  }
  return r;
}

VerificationReport monotone_report(int n_max, int m_max) {
  const auto t0 = std::chrono::steady_clock::now();
  const MonotoneSuiteResult r = run_monotone_suite(n_max, m_max);
  VerificationReport rep;
  rep.experiment = "monotone";
  rep.parameters["n_max"] = n_max;
  rep.parameters["m_max"] = m_max;
  rep.parameters["pairs_checked"] =
      r.empty_box_pairs + r.cumulative_occupancy_pairs + r.cumulative_degree_pairs;
  auto violations = [&](const char* name, int v) {
    rep.scalar_checks.push_back({name, 0.0, static_cast<double>(v), 0.0, CheckKind::Within});
  };
  violations("empty_box_violations", r.empty_box_violations);
  violations("cumulative_occupancy_violations", r.cumulative_occupancy_violations);
  violations("cumulative_degree_violations", r.cumulative_degree_violations);
  violations("coupling_failures", r.coupling_failures);
  rep.wall_time_s = seconds_since(t0);
  rep.finalize();
  return rep;
}

VerificationReport cwold_report(double h, double T) {
  const auto t0 = std::chrono::steady_clock::now();
  const CfPair cf = canonical_pair();
  VerificationReport rep;
  rep.experiment = "cwold";
  rep.parameters["grid"] = h;
  rep.parameters["T"] = T;

  const ScanResult octant = octant_equality_scan(cf.x, cf.y, h, T);
  rep.scalar_checks.push_back({"octant_max_diff", 0.0, octant.max_diff, 1e-12, CheckKind::Within});
  const ScanPoint w = counterexample_witness(cf.x, cf.y, h, T);
  rep.parameters["witness_t1"] = w.t1;
  rep.parameters["witness_t2"] = w.t2;
  rep.scalar_checks.push_back({"witness_max_diff", 0.19, w.diff, 0.0, CheckKind::AtLeast});
  rep.scalar_checks.push_back(
      {"diff_at_-0.6_0.6", 0.2, cf_difference_at(cf.x, cf.y, {-0.6, 0.6}), 1e-12, CheckKind::Within});
  rep.scalar_checks.push_back({"direction_1_-1", 0.19,
                               marginal_difference_along(cf.x, cf.y, {1.0, -1.0}), 0.0,
                               CheckKind::AtLeast});
  rep.scalar_checks.push_back({"direction_1_1", 0.0,
                               marginal_difference_along(cf.x, cf.y, {1.0, 1.0}), 1e-14,
                               CheckKind::Within});
  rep.wall_time_s = seconds_since(t0);
  rep.finalize();
  return rep;
}

}  // namespace condclt
