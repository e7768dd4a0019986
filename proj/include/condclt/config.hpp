#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "condclt/report.hpp"

namespace condclt {

/// One experiment invocation. Unset optionals fall back to per-experiment
/// defaults listed in `condclt --help`.
struct ExperimentConfig {
  std::string experiment;  // alloc | gnp | gnm | spacings | transfer | monotone | cwold
  std::optional<std::int64_t> n;
  std::optional<std::int64_t> m;
  std::optional<double> p;
  std::optional<double> lambda;
  std::optional<double> a;
  std::optional<int> K;
  std::optional<int> max_k;
  std::int64_t reps = 2000;
  std::uint64_t seed = 42;
  double z_gate = 4.0;
  double ks_gate = 0.05;
  double grid = 0.015;
  double T = 3.0;
  int threads = 0;
  std::string out;
  ReportFormat format = ReportFormat::Structured;
  std::string dump;
};

/// Thrown for bad flags, config keys or values; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitGateFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericError = 3;

/// Parses `args` (without the program name). A `--config FILE` of key=value
/// lines supplies values that explicit flags override. Throws ConfigError.
ExperimentConfig parse_config(const std::vector<std::string>& args);

/// Keys accepted in config files.
const std::vector<std::string>& config_keys();

std::string help_text();

struct RunOutcome {
  int exit_code = kExitPass;
  VerificationReport report;
};

/// Runs one experiment, writes the report to config.out when set, and maps
/// the result onto the exit-code contract. Parameter errors raise
/// ConfigError; numeric and IO errors propagate as condclt::Error.
RunOutcome run(const ExperimentConfig& config);

/// Full command-line entry point; prints a summary and returns the exit code.
int cli_main(int argc, char** argv);

}  // namespace condclt
