#include "condclt/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "condclt/errors.hpp"

namespace condclt {
namespace {

using Json = nlohmann::ordered_json;

// JSON has no inf/nan; encode them as strings so reports round-trip.
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double from_num(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

std::string_view kind_name(CheckKind k) {
  switch (k) {
    case CheckKind::Within: return "within";
    case CheckKind::AtLeast: return "at_least";
    case CheckKind::AtMost: return "at_most";
  }
  return "within";
}

CheckKind kind_from(const std::string& s) {
  if (s == "at_least") return CheckKind::AtLeast;
  if (s == "at_most") return CheckKind::AtMost;
  if (s == "within") return CheckKind::Within;
  fail(ErrorCode::InvalidParameter, "unknown check kind '" + s + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

bool ScalarCheck::passed() const {
  switch (kind) {
    case CheckKind::Within: return std::abs(value - reference) <= tolerance;
    case CheckKind::AtLeast: return value >= reference;
    case CheckKind::AtMost: return value <= reference;
  }
  return false;
}

void VerificationReport::finalize() {
  pass = true;
  for (const auto& c : comparisons) {
    if (!(std::abs(c.z) <= z_gate)) pass = false;
  }
  for (const auto& s : scalar_checks) {
    if (!s.passed()) pass = false;
  }
}

double VerificationReport::max_abs_z() const {
  double m = 0.0;
  for (const auto& c : comparisons) m = std::max(m, std::abs(c.z));
  return m;
}

Json to_json(const VerificationReport& r) {
  Json doc;
  doc["experiment"] = r.experiment;
  doc["seed"] = r.seed;
  doc["parameters"] = r.parameters;
  doc["z_gate"] = num(r.z_gate);
  doc["pass"] = r.pass;
  doc["wall_time_s"] = num(r.wall_time_s);
  Json comps = Json::array();
  for (const auto& c : r.comparisons) {
    comps.push_back({{"quantity", c.quantity},
                     {"i", c.i},
                     {"j", c.j},
                     {"theory", num(c.theory)},
                     {"estimate", num(c.estimate)},
                     {"stderr", num(c.stderr_)},
                     {"z", num(c.z)}});
  }
  doc["comparisons"] = std::move(comps);
  Json checks = Json::array();
  for (const auto& s : r.scalar_checks) {
    checks.push_back({{"name", s.name},
                      {"kind", kind_name(s.kind)},
                      {"reference", num(s.reference)},
                      {"value", num(s.value)},
                      {"tolerance", num(s.tolerance)},
                      {"pass", s.passed()}});
  }
  doc["scalar_checks"] = std::move(checks);
  return doc;
}

VerificationReport report_from_json(const Json& doc) {
  VerificationReport r;
  try {
    r.experiment = doc.at("experiment").get<std::string>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.parameters = doc.at("parameters");
    r.z_gate = from_num(doc.at("z_gate"));
    r.pass = doc.at("pass").get<bool>();
    r.wall_time_s = from_num(doc.at("wall_time_s"));
    for (const auto& c : doc.at("comparisons")) {
      r.comparisons.push_back({c.at("quantity").get<std::string>(), c.at("i").get<int>(),
                               c.at("j").get<int>(), from_num(c.at("theory")),
                               from_num(c.at("estimate")), from_num(c.at("stderr")),
                               from_num(c.at("z"))});
    }
    for (const auto& s : doc.at("scalar_checks")) {
      r.scalar_checks.push_back({s.at("name").get<std::string>(), from_num(s.at("reference")),
                                 from_num(s.at("value")), from_num(s.at("tolerance")),
                                 kind_from(s.at("kind").get<std::string>())});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidParameter, std::string("malformed report: ") + e.what());
  }
  return r;
}

void emit_report(std::ostream& out, const VerificationReport& r, ReportFormat format) {
  if (format == ReportFormat::Structured) {
    out << to_json(r).dump(2) << '\n';
  } else {
    out << kTableHeader << '\n';
    for (const auto& c : r.comparisons) {
      out << r.experiment << ':' << c.quantity << ',' << c.i << ',' << c.j << ','
          << fmt(c.theory) << ',' << fmt(c.estimate) << ',' << fmt(c.stderr_) << ','
          << fmt(c.z) << '\n';
    }
    for (const auto& s : r.scalar_checks) {
      out << r.experiment << ':' << s.name << ",-1,-1," << fmt(s.reference) << ','
          << fmt(s.value) << ',' << fmt(s.tolerance) << ',' << (s.passed() ? 0 : 1) << '\n';
    }
  }
  if (!out) fail(ErrorCode::Io, "failed writing report");
}

void emit_report(const std::string& path, const VerificationReport& r, ReportFormat format) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  emit_report(f, r, format);
}

VerificationReport parse_report(std::istream& in) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidParameter, std::string("report is not valid JSON: ") + e.what());
  }
  return report_from_json(doc);
}

}  // namespace condclt
