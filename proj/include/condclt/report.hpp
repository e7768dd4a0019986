#pragma once

#include <cstdint>
#include <iosfwd>
#include "json.hpp"
#include <string>
#include <vector>

namespace condclt {

/// One theory-vs-estimate entry. `quantity` is "mean", "var" or "cov";
/// i and j index statistic coordinates (j = -1 for means).
struct Comparison {
  std::string quantity;
  int i = -1;
  int j = -1;
  double theory = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double z = 0.0;

  bool operator==(const Comparison&) const = default;
};

enum class CheckKind { Within, AtLeast, AtMost };

/// Deterministic scalar gate: |value - reference| <= tolerance (Within),
/// value >= reference (AtLeast) or value <= reference (AtMost).
struct ScalarCheck {
  std::string name;
  double reference = 0.0;
  double value = 0.0;
  double tolerance = 0.0;
  CheckKind kind = CheckKind::Within;

  bool passed() const;
  bool operator==(const ScalarCheck&) const = default;
};

struct VerificationReport {
  std::string experiment;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<Comparison> comparisons;
  std::vector<ScalarCheck> scalar_checks;
  double z_gate = 4.0;
  bool pass = false;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;

  /// pass = every |z| <= z_gate and every scalar check passes.
  void finalize();
  double max_abs_z() const;

  bool operator==(const VerificationReport&) const = default;
};

nlohmann::ordered_json to_json(const VerificationReport& report);
VerificationReport report_from_json(const nlohmann::ordered_json& doc);

enum class ReportFormat { Structured, Table };

inline constexpr const char* kTableHeader = "experiment,entry_i,entry_j,theory,estimate,stderr,z";

/// Structured: one JSON document. Table: CSV with kTableHeader, one row per
/// comparison and per scalar check. The experiment column is
/// "<experiment>:<quantity or check name>"; scalar-check rows carry the
/// reference in `theory`, the tolerance in `stderr` and 0/1 (pass/fail) in `z`.
void emit_report(std::ostream& out, const VerificationReport& report, ReportFormat format);
void emit_report(const std::string& path, const VerificationReport& report, ReportFormat format);

VerificationReport parse_report(std::istream& in);

}  // namespace condclt
