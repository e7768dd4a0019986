#include "condclt/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "condclt/errors.hpp"
#include "condclt/limit_theory.hpp"
#include "condclt/simulators.hpp"

namespace condclt {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::int64_t kChunk = 64;

double batch_cov_stderr(const ExperimentResult& r, int i, int j) {
  const int b = static_cast<int>(r.batches.size());
  std::vector<double> est(b);
  for (int k = 0; k < b; ++k) est[k] = r.batches[k].covariance()(i, j);
  double mean = 0.0;
  for (double e : est) mean += e;
  mean /= b;
  double ss = 0.0;
  for (double e : est) ss += (e - mean) * (e - mean);
  return std::sqrt(ss / (b - 1) / b);
}

void check_theory_shape(const ExperimentResult& r, const Eigen::VectorXd& mean,
                        const Eigen::MatrixXd& cov) {
  require(mean.size() == r.dim && cov.rows() == r.dim && cov.cols() == r.dim,
          ErrorCode::DimensionMismatch, "theory dimensions differ from the statistic");
  require(r.acc.count() >= 100, ErrorCode::InsufficientReplicates,
          "theory comparison needs at least 100 replicates");
}

}  // namespace

void StandardizationSpec::validate() const {
  require(a_n > 0.0 && c_n > 0.0, ErrorCode::InvalidParameter, "a_n and c_n must be positive");
}

Eigen::VectorXd standardize(std::span<const double> x, const StandardizationSpec& spec) {
  spec.validate();
  require(static_cast<Eigen::Index>(x.size()) == spec.b_n.size(), ErrorCode::DimensionMismatch,
          "statistic length differs from b_n");
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  return (v - spec.b_n) / spec.a_n;
}

std::string experiment_name(const ExperimentParams& params) {
  return std::visit(overloaded{[](const AllocParams&) { return std::string("alloc"); },
                               [](const GnpParams&) { return std::string("gnp"); },
                               [](const GnmParams&) { return std::string("gnm"); },
                               [](const SpacingsParams&) { return std::string("spacings"); }},
                    params);
}

int statistic_dim(const ExperimentParams& params) {
  return std::visit(overloaded{[](const AllocParams& p) { return p.max_j + 1; },
                               [](const GnpParams& p) { return p.max_k + 1; },
                               [](const GnmParams& p) { return p.max_k + 1; },
                               [](const SpacingsParams&) { return 1; }},
                    params);
}

void validate(const ExperimentParams& params) {
  std::visit(
      overloaded{
          [](const AllocParams& p) {
            require(p.n >= 1 && p.m >= 0 && p.max_j >= 0, ErrorCode::InvalidParameter,
                    "alloc needs n >= 1, m >= 0, max_j >= 0");
          },
          [](const GnpParams& p) {
            require(p.n >= 1 && p.p >= 0.0 && p.p <= 1.0 && p.max_k >= 0,
                    ErrorCode::InvalidParameter, "gnp needs n >= 1, 0 <= p <= 1, max_k >= 0");
          },
          [](const GnmParams& p) {
            require(p.n >= 1 && p.m >= 0 && p.max_k >= 0, ErrorCode::InvalidParameter,
                    "gnm needs n >= 1, m >= 0, max_k >= 0");
            const auto pairs = static_cast<std::uint64_t>(p.n) * (p.n - 1) / 2;
            require(static_cast<std::uint64_t>(p.m) <= pairs, ErrorCode::TooManyEdges,
                    "m exceeds C(n,2)");
          },
          [](const SpacingsParams& p) {
            require(p.n >= 1, ErrorCode::InvalidParameter, "spacings needs n >= 1");
            if (!(p.a > 0.0)) fail(ErrorCode::InvalidA, "a must be positive");
          }},
      params);
}

void sample_statistic(const ExperimentParams& params, Rng& rng, std::span<std::int64_t> out) {
  std::visit(overloaded{[&](const AllocParams& p) {
                          const auto prof = sample_allocation(p.n, p.m, rng, p.max_j);
                          std::copy(prof.z.begin(), prof.z.end(), out.begin());
                        },
                        [&](const GnpParams& p) {
                          const auto d = sample_gnp(p.n, p.p, rng, p.max_k);
                          std::copy(d.counts.begin(), d.counts.end(), out.begin());
                        },
                        [&](const GnmParams& p) {
                          const auto d = sample_gnm(p.n, p.m, rng, p.max_k);
                          std::copy(d.counts.begin(), d.counts.end(), out.begin());
                        },
                        [&](const SpacingsParams& p) {
                          out[0] = exceedance_count(sample_spacings(p.n, rng), p.a);
                        }},
             params);
}

double finite_n_lambda(const ExperimentParams& params) {
  return std::visit(
      overloaded{[](const AllocParams& p) { return static_cast<double>(p.m) / p.n; },
                 [](const GnpParams& p) { return p.p * static_cast<double>(p.n); },
                 [](const GnmParams& p) { return 2.0 * static_cast<double>(p.m) / p.n; },
                 [](const SpacingsParams& p) { return p.a; }},
      params);
}

StandardizationSpec default_standardization(const ExperimentParams& params) {
  validate(params);
  StandardizationSpec spec;
  const int dim = statistic_dim(params);
  spec.b_n = Eigen::VectorXd::Zero(dim);
  std::visit(overloaded{[&](const AllocParams& p) {
                          const double n = static_cast<double>(p.n);
                          const double lam = finite_n_lambda(params);
                          spec.a_n = spec.c_n = std::sqrt(n);
                          for (int j = 0; j < dim; ++j) spec.b_n(j) = n * poisson_pmf(lam, j);
                          spec.d_n = spec.y_n = static_cast<double>(p.m);
                        },
                        [&](const GnpParams& p) {
                          const double n = static_cast<double>(p.n);
                          const double lam = finite_n_lambda(params);
                          spec.a_n = spec.c_n = std::sqrt(n);
                          for (int k = 0; k < dim; ++k) spec.b_n(k) = n * poisson_pmf(lam, k);
                          spec.d_n = spec.y_n = 0.5 * lam * n;
                        },
                        [&](const GnmParams& p) {
                          const double n = static_cast<double>(p.n);
                          const double lam = finite_n_lambda(params);
                          spec.a_n = spec.c_n = std::sqrt(n);
                          for (int k = 0; k < dim; ++k) spec.b_n(k) = n * poisson_pmf(lam, k);
                          spec.d_n = spec.y_n = static_cast<double>(p.m);
                        },
                        [&](const SpacingsParams& p) {
                          const double n = static_cast<double>(p.n);
                          spec.a_n = spec.c_n = std::sqrt(n);
                          spec.b_n(0) = n * std::exp(-p.a);
                          spec.d_n = spec.y_n = n;
                        }},
             params);
  return spec;
}

std::vector<double> ExperimentResult::column(int i) const {
  std::vector<double> out(static_cast<std::size_t>(reps));
  for (std::int64_t r = 0; r < reps; ++r) out[r] = standardized[r * dim + i];
  return out;
}

int default_thread_count() {
  if (const char* env = std::getenv("CONDCLT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

MomentAccumulator accumulate_rows(std::span<const double> rows, int dim, std::int64_t begin,
                                  std::int64_t end) {
  MomentAccumulator acc(dim);
  for (std::int64_t r = begin; r < end; ++r) acc.add(rows.subspan(r * dim, dim));
  return acc;
}

ExperimentResult run_experiment(const ExperimentParams& params, std::int64_t reps,
                                 std::uint64_t seed, int threads,
                                 const std::optional<StandardizationSpec>& standardization) {
  validate(params);
  require(reps >= 2, ErrorCode::InsufficientReplicates, "need at least 2 replicates");
  const StandardizationSpec spec =
      standardization ? *standardization : default_standardization(params);
  spec.validate();
  const int dim = statistic_dim(params);
  require(spec.b_n.size() == dim, ErrorCode::DimensionMismatch,
          "standardization length differs from the statistic");

  ExperimentResult res{params, seed, reps, dim, {}, {}, MomentAccumulator(dim), {}};
  res.counts.assign(static_cast<std::size_t>(reps * dim), 0);
  res.standardized.assign(static_cast<std::size_t>(reps * dim), 0.0);

  const int workers = static_cast<int>(
      std::min<std::int64_t>(threads > 0 ? threads : default_thread_count(), (reps + kChunk - 1) / kChunk));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    try {
      while (!failed.load()) {
        const std::int64_t begin = next.fetch_add(kChunk);
        if (begin >= reps) break;
        const std::int64_t end = std::min(reps, begin + kChunk);
        for (std::int64_t r = begin; r < end; ++r) {
          Rng rng = stream_for(seed, static_cast<std::uint64_t>(r));
          const std::span<std::int64_t> row(res.counts.data() + r * dim, dim);
          sample_statistic(params, rng, row);
          for (int i = 0; i < dim; ++i) {
            res.standardized[r * dim + i] = (static_cast<double>(row[i]) - spec.b_n(i)) / spec.a_n;
          }
        }
      }
    } catch (...) {
      if (!failed.exchange(true)) error = std::current_exception();
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  const int nb = reps >= 2 * kBatchCount ? kBatchCount : 0;
  for (int b = 0; b < nb; ++b) {
    res.batches.push_back(accumulate_rows(res.standardized, dim, b * reps / nb, (b + 1) * reps / nb));
  }
  res.acc = accumulate_rows(res.standardized, dim, 0, reps);
  return res;
}

double z_score(double estimate, double theory, double se) {
  const double diff = estimate - theory;
  if (se > 0.0) return diff / se;
  if (std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(theory))) return 0.0;
  return diff > 0 ? std::numeric_limits<double>::infinity()
                  : -std::numeric_limits<double>::infinity();
}

VerificationReport compare_to_theory(const ExperimentResult& r, const Eigen::VectorXd& theory_mean,
                                     const Eigen::MatrixXd& theory_cov, double z_gate) {
  check_theory_shape(r, theory_mean, theory_cov);
  require(r.batches.size() == kBatchCount, ErrorCode::InsufficientReplicates,
          "batch-means standard errors need at least 40 replicates");
  VerificationReport rep;
  rep.experiment = experiment_name(r.params);
  rep.seed = r.seed;
  rep.z_gate = z_gate;
  const Eigen::MatrixXd cov = r.acc.covariance();
  const double n = static_cast<double>(r.acc.count());
  for (int i = 0; i < r.dim; ++i) {
    const double se = std::sqrt(std::max(0.0, cov(i, i)) / n);
    rep.comparisons.push_back({"mean", i, -1, theory_mean(i), r.acc.mean()(i), se,
                               z_score(r.acc.mean()(i), theory_mean(i), se)});
  }
  for (int i = 0; i < r.dim; ++i) {
    for (int j = i; j < r.dim; ++j) {
      const double se = batch_cov_stderr(r, i, j);
      rep.comparisons.push_back(
          {"cov", i, j, theory_cov(i, j), cov(i, j), se, z_score(cov(i, j), theory_cov(i, j), se)});
    }
  }
  rep.finalize();
  return rep;
}

double normality_distance(std::span<const double> samples, double mu, double sigma2) {
  if (!(sigma2 > 0.0)) fail(ErrorCode::DegenerateVariance, "reference variance must be positive");
  require(samples.size() >= 1000, ErrorCode::InsufficientReplicates,
          "normality distance needs at least 1000 samples");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double sd = std::sqrt(sigma2);
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = 0.5 * std::erfc(-(xs[i] - mu) / (sd * std::sqrt(2.0)));
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

std::vector<Comparison> moment_convergence_check(const ExperimentResult& r,
                                                 const Eigen::VectorXd& theory_mean,
                                                 const Eigen::MatrixXd& theory_cov,
                                                 int max_order) {
  check_theory_shape(r, theory_mean, theory_cov);
  require(max_order >= 1 && max_order <= 2, ErrorCode::InvalidParameter,
          "moment checks are implemented for orders 1 and 2 only");
  std::vector<Comparison> out;
  const Eigen::MatrixXd cov = r.acc.covariance();
  const double n = static_cast<double>(r.acc.count());
  for (int i = 0; i < r.dim; ++i) {
    const double se = std::sqrt(std::max(0.0, cov(i, i)) / n);
    out.push_back({"mean", i, -1, theory_mean(i), r.acc.mean()(i), se,
                   z_score(r.acc.mean()(i), theory_mean(i), se)});
  }
  if (max_order < 2) return out;
  for (int i = 0; i < r.dim; ++i) {
    const double se = r.acc.variance_stderr(i);
    out.push_back({"var", i, i, theory_cov(i, i), cov(i, i), se,
                   z_score(cov(i, i), theory_cov(i, i), se)});
  }
  if (r.batches.size() == kBatchCount) {
    for (int i = 0; i < r.dim; ++i) {
      for (int j = i + 1; j < r.dim; ++j) {
        const double se = batch_cov_stderr(r, i, j);
        out.push_back({"cov", i, j, theory_cov(i, j), cov(i, j), se,
                       z_score(cov(i, j), theory_cov(i, j), se)});
      }
    }
  }
  return out;
}

}  // namespace condclt
