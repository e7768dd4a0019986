#include "condclt/config.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "condclt/errors.hpp"
#include "condclt/experiments.hpp"
#include "condclt/mc_engine.hpp"
#include "condclt/simulators.hpp"

namespace condclt {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

// Reads key=value lines ('#' starts a comment) into flag arguments.
std::vector<std::string> config_file_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  const auto& keys = config_keys();
  std::vector<std::string> flags;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    if (key == "experiment") {
      flags.push_back("--file-experiment");
      flags.push_back(value);
      continue;
    }
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    flags.push_back("--" + flag);
    flags.push_back(value);
  }
  return flags;
}

struct Parser {
  CLI::App app{"Conditional central limit verification toolkit", "condclt"};
  ExperimentConfig cfg;
  std::string format = "structured";
  std::string config_path;
  std::string file_experiment;  // used only when no positional is given

  Parser() {
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("experiment", cfg.experiment,
                   "alloc | gnp | gnm | spacings | transfer | monotone | cwold")
        ->check(CLI::IsMember({"alloc", "gnp", "gnm", "spacings", "transfer", "monotone", "cwold"}));
    app.add_option("--file-experiment", file_experiment)
        ->check(CLI::IsMember({"alloc", "gnp", "gnm", "spacings", "transfer", "monotone", "cwold"}))
        ->group("");
    app.add_option("--config", config_path, "File of key=value lines; flags override it");
    app.add_option("--n", cfg.n, "Boxes / vertices / points (monotone: largest n, default 5)");
    app.add_option("--m", cfg.m, "Balls or edges (monotone: largest m, default 8)");
    app.add_option("--p", cfg.p, "Edge probability for gnp (default lambda / n)");
    app.add_option("--lambda", cfg.lambda, "Poisson rate (transfer default 2; gnp sets p = lambda/n)");
    app.add_option("--a", cfg.a, "Spacings threshold multiplier (default 1)");
    app.add_option("--K", cfg.K, "Truncation index for transfer (default 60)");
    app.add_option("--max-k", cfg.max_k, "Largest occupancy/degree tracked (alloc 5, graphs 8)");
    app.add_option("--reps", cfg.reps, "Monte Carlo replicates")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    app.add_option("--z-gate", cfg.z_gate, "Largest accepted |z|")->capture_default_str();
    app.add_option("--ks-gate", cfg.ks_gate, "Largest accepted sup-distance")->capture_default_str();
    app.add_option("--grid", cfg.grid, "cwold grid step")->capture_default_str();
    app.add_option("--T", cfg.T, "cwold grid extent")->capture_default_str();
    app.add_option("--threads", cfg.threads,
                   "Worker threads (0: CONDCLT_THREADS or hardware); never changes results")
        ->capture_default_str();
    app.add_option("--out", cfg.out, "Report path");
    app.add_option("--format", format, "structured | table")
        ->check(CLI::IsMember({"structured", "table"}))
        ->capture_default_str();
    app.add_option("--dump", cfg.dump, "Binary dump of raw per-replicate counts (int64 LE)");
  }
};

std::string find_config_path(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  return path;
}

std::int64_t need(const std::optional<std::int64_t>& v, const char* key, const std::string& exp) {
  if (!v) throw ConfigError(exp + " requires '" + key + "'");
  return *v;
}

void write_dump(const std::string& path, const ExperimentResult& res) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  for (std::int64_t r = 0; r < res.reps; ++r) {
    write_dump_row(f, std::span<const std::int64_t>(res.counts.data() + r * res.dim, res.dim));
  }
}

VerificationReport dispatch(const ExperimentConfig& c) {
  const std::string& e = c.experiment;
  const Gates gates{c.z_gate, c.ks_gate};
  std::optional<ExperimentParams> params;
  if (e == "alloc") {
    params = AllocParams{need(c.n, "n", e), need(c.m, "m", e), c.max_k.value_or(5)};
  } else if (e == "gnp") {
    const std::int64_t n = need(c.n, "n", e);
    double p = 0.0;
    if (c.p) {
      p = *c.p;
    } else if (c.lambda) {
      p = *c.lambda / static_cast<double>(n);
    } else {
      throw ConfigError("gnp requires 'p' or 'lambda'");
    }
    params = GnpParams{n, p, c.max_k.value_or(8)};
  } else if (e == "gnm") {
    params = GnmParams{need(c.n, "n", e), need(c.m, "m", e), c.max_k.value_or(8)};
  } else if (e == "spacings") {
    params = SpacingsParams{need(c.n, "n", e), c.a.value_or(1.0)};
  } else if (e == "transfer") {
    return transfer_report(c.lambda.value_or(2.0), c.K.value_or(60));
  } else if (e == "monotone") {
    return monotone_report(static_cast<int>(c.n.value_or(5)), static_cast<int>(c.m.value_or(8)));
  } else if (e == "cwold") {
    return cwold_report(c.grid, c.T);
  } else {
    throw ConfigError("unknown experiment '" + e + "'");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult res = run_experiment(*params, c.reps, c.seed, c.threads);
  const bool ks = std::holds_alternative<AllocParams>(*params) ||
                  std::holds_alternative<SpacingsParams>(*params);
  VerificationReport rep = mc_verification(res, limit_moments(*params), gates, ks);
  if (!c.dump.empty()) write_dump(c.dump, res);
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "n",    "m",      "p",      "lambda", "a",       "K",   "max_k", "reps",
      "seed",       "z_gate", "ks_gate", "grid", "T",      "threads", "out", "format", "dump"};
  return keys;
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  std::vector<std::string> all;
  if (const std::string path = find_config_path(args); !path.empty()) {
    all = config_file_args(path);
  }
  all.insert(all.end(), args.begin(), args.end());

  Parser p;
  std::vector<std::string> rev(all.rbegin(), all.rend());  // CLI11 consumes from the back
  try {
    p.app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::ParseError& err) {
    throw ConfigError(err.what());
  }
  if (p.cfg.experiment.empty()) p.cfg.experiment = p.file_experiment;
  if (p.cfg.experiment.empty()) throw ConfigError("no experiment given");
  p.cfg.format = p.format == "table" ? ReportFormat::Table : ReportFormat::Structured;
  if (p.cfg.reps < 2) throw ConfigError("'reps' must be at least 2");
  if (!(p.cfg.z_gate > 0.0) || !(p.cfg.ks_gate > 0.0)) throw ConfigError("gates must be positive");
  return p.cfg;
}

std::string help_text() {
  Parser p;
  return p.app.help();
}

RunOutcome run(const ExperimentConfig& config) {
  RunOutcome out;
  try {
    out.report = dispatch(config);
  } catch (const Error& e) {
    if (is_parameter_error(e.code())) throw ConfigError(e.what());
    throw;
  }
  out.report.seed = config.seed;
  out.report.parameters["seed"] = config.seed;
  if (!config.out.empty()) emit_report(config.out, out.report, config.format);
  out.exit_code = out.report.pass ? kExitPass : kExitGateFailure;
  return out;
}

int cli_main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const ExperimentConfig cfg = parse_config(args);
    const RunOutcome res = run(cfg);
    const VerificationReport& r = res.report;
    std::cout << r.experiment << ": " << (r.pass ? "PASS" : "FAIL") << " (" << r.comparisons.size()
              << " comparisons, max |z| = " << r.max_abs_z() << ", " << r.scalar_checks.size()
              << " scalar checks, " << r.wall_time_s << " s, seed " << r.seed << ")\n";
    for (const auto& s : r.scalar_checks) {
      std::cout << "  " << (s.passed() ? "ok   " : "FAIL ") << s.name << " = " << s.value << '\n';
    }
    return res.exit_code;
  } catch (const CLI::CallForHelp&) {
    std::cout << help_text();
    return kExitPass;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericError;
  }
}

}  // namespace condclt
