#include "condclt/cwold.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "condclt/errors.hpp"

namespace condclt {
namespace {

long grid_steps(double extent, double h) {
  require(h > 0.0 && extent > 0.0, ErrorCode::InvalidParameter, "grid step and extent must be positive");
  return static_cast<long>(std::floor(extent / h + 1e-9));
}

ScanPoint point(const CharFnExpr& x, const CharFnExpr& y, double t1, double t2) {
  const double t[2] = {t1, t2};
  ScanPoint p{t1, t2, eval_cf(x, t), eval_cf(y, t), 0.0};
  p.diff = std::abs(p.phi_x - p.phi_y);
  return p;
}

}  // namespace

BaseCf triangular(double scale) {
  require(scale > 0.0, ErrorCode::InvalidParameter, "triangular scale must be positive");
  return {BaseKind::Triangular, scale};
}

BaseCf periodic_triangular() { return {BaseKind::PeriodicTriangular, 1.0}; }

CfPair canonical_pair() {
  return {PairCf{triangular(), triangular()}, PairCf{triangular(), periodic_triangular()}};
}

int arity(const CharFnExpr& expr) { return std::holds_alternative<BaseCf>(expr) ? 1 : 2; }

double eval_base(const BaseCf& cf, double t) {
  switch (cf.kind) {
    case BaseKind::Triangular:
      return std::max(0.0, 1.0 - std::abs(t) / cf.scale);
    case BaseKind::PeriodicTriangular: {
      const double r = t - 2.0 * std::round(t / 2.0);  // in [-1, 1]
      return 1.0 - std::abs(r);
    }
  }
  return 0.0;
}

double eval_cf(const CharFnExpr& expr, std::span<const double> t) {
  if (static_cast<int>(t.size()) != arity(expr)) {
    fail(ErrorCode::ArityMismatch, "expected " + std::to_string(arity(expr)) + " arguments, got " +
                                       std::to_string(t.size()));
  }
  if (const auto* b = std::get_if<BaseCf>(&expr)) return eval_base(*b, t[0]);
  const auto& p = std::get<PairCf>(expr);
  return eval_base(p.u, t[0] + t[1]) * eval_base(p.v, t[0] - t[1]);
}

ScanResult octant_equality_scan(const CharFnExpr& cf_x, const CharFnExpr& cf_y, double h,
                                double T, bool keep_rows) {
  const long steps = grid_steps(T, h);
  ScanResult res;
  bool first = true;
  for (long i = 0; i <= steps; ++i) {
    for (long j = 0; j <= steps; ++j) {
      const ScanPoint p = point(cf_x, cf_y, i * h, j * h);
      if (keep_rows) res.rows.push_back(p);
      if (first || p.diff > res.max_diff) {
        res.max_diff = p.diff;
        res.argmax = p;
        first = false;
      }
    }
  }
  return res;
}

ScanPoint counterexample_witness(const CharFnExpr& cf_x, const CharFnExpr& cf_y, double h,
                                 double T) {
  const long steps = grid_steps(T, h);
  ScanPoint best{};
  bool found = false;
  for (long i = -steps; i <= steps; ++i) {
    for (long j = -steps; j <= steps; ++j) {
      if (i >= 0 && j >= 0) continue;
      const ScanPoint p = point(cf_x, cf_y, i * h, j * h);
      if (!found || p.diff > best.diff) {
        best = p;
        found = true;
      }
    }
  }
  if (!found || best.diff < kIndistinguishable) {
    fail(ErrorCode::NoDifferenceFound, "characteristic functions agree on the scanned region");
  }
  return best;
}

double cf_difference_at(const CharFnExpr& cf_x, const CharFnExpr& cf_y, std::array<double, 2> t) {
  return std::abs(eval_cf(cf_x, t) - eval_cf(cf_y, t));
}

double marginal_difference_along(const CharFnExpr& cf_x, const CharFnExpr& cf_y,
                                 std::array<double, 2> direction, double s_min, double s_max,
                                 double step) {
  require(direction[0] != 0.0 || direction[1] != 0.0, ErrorCode::InvalidParameter,
          "direction must be nonzero");
  require(s_max >= s_min, ErrorCode::InvalidParameter, "empty parameter range");
  const long steps = grid_steps(s_max - s_min, step);
  double best = 0.0;
  for (long i = 0; i <= steps; ++i) {
    const double s = s_min + i * step;
    best = std::max(best, cf_difference_at(cf_x, cf_y, {s * direction[0], s * direction[1]}));
  }
  return best;
}

LatticeMass periodic_triangular_lattice_mass(long kmax) {
  require(kmax >= 0, ErrorCode::InvalidParameter, "kmax must be non-negative");
  const double c = 4.0 / (std::numbers::pi * std::numbers::pi);
  double sum = 0.0;
  // smallest terms first
  for (long k = kmax; k >= 0; --k) {
    const double odd = 2.0 * static_cast<double>(k) + 1.0;
    sum += c / (odd * odd);
  }
  // sum_{k > kmax} 1/(2k+1)^2 <= integral_{kmax}^inf dx / (2x+1)^2
  const double tail = c / (2.0 * (2.0 * static_cast<double>(kmax) + 1.0));
  return {0.5 + sum, tail};
}

double periodic_triangular_from_lattice(double t, long kmax) {
  const double c = 4.0 / (std::numbers::pi * std::numbers::pi);
  double sum = 0.0;
  for (long k = kmax; k >= 0; --k) {
    const double odd = 2.0 * static_cast<double>(k) + 1.0;
    sum += c / (odd * odd) * std::cos(odd * std::numbers::pi * t);
  }
  return 0.5 + sum;
}

void write_scan_table(std::ostream& out, std::span<const ScanPoint> rows) {
  out << "t1,t2,phi_x,phi_y,diff\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.t1 << ',' << r.t2 << ',' << r.phi_x << ',' << r.phi_y << ',' << r.diff << '\n';
  }
  if (!out) fail(ErrorCode::Io, "failed writing scan table");
}

}  // namespace condclt
