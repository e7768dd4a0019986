#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace condclt {

enum class BaseKind {
  Triangular,           // t -> max(0, 1 - |t| / scale)
  PeriodicTriangular,   // period-2 extension of the triangular cf
};

/// Univariate characteristic function with a closed form. Both kinds are real
/// and even. Neither law has finite exponential moments (nor a finite mean),
/// so neither is certified moment-determinate.
struct BaseCf {
  BaseKind kind = BaseKind::Triangular;
  double scale = 1.0;  // only used by Triangular

  bool has_exponential_moments() const { return false; }
};

/// cf of (U + V, U - V) for independent U ~ u, V ~ v:
/// (t1, t2) -> phi_u(t1 + t2) phi_v(t1 - t2).
struct PairCf {
  BaseCf u;
  BaseCf v;
};

using CharFnExpr = std::variant<BaseCf, PairCf>;

BaseCf triangular(double scale = 1.0);
BaseCf periodic_triangular();

int arity(const CharFnExpr& expr);

/// Throws ArityMismatch when t has the wrong length.
double eval_cf(const CharFnExpr& expr, std::span<const double> t);
double eval_base(const BaseCf& cf, double t);

struct ScanPoint {
  double t1 = 0.0;
  double t2 = 0.0;
  double phi_x = 0.0;
  double phi_y = 0.0;
  double diff = 0.0;
};

struct ScanResult {
  double max_diff = 0.0;
  ScanPoint argmax;
  std::vector<ScanPoint> rows;  // filled only when requested
};

/// max |phi_X - phi_Y| over the grid {i h : 0 <= i h <= T}^2 (closed first
/// quadrant).
ScanResult octant_equality_scan(const CharFnExpr& cf_x, const CharFnExpr& cf_y, double h,
                                double T, bool keep_rows = false);

/// Point of largest |phi_X - phi_Y| on the grid over [-T, T]^2 with the closed
/// first quadrant removed. Ties go to the first point in row-major order.
/// Throws NoDifferenceFound when the maximum is below 1e-9.
ScanPoint counterexample_witness(const CharFnExpr& cf_x, const CharFnExpr& cf_y, double h,
                                 double T);

/// |phi_X(t) - phi_Y(t)| at one point.
double cf_difference_at(const CharFnExpr& cf_x, const CharFnExpr& cf_y, std::array<double, 2> t);

/// max over s in [s_min, s_max] (step `step`) of
/// |phi_X(s c1, s c2) - phi_Y(s c1, s c2)|.
double marginal_difference_along(const CharFnExpr& cf_x, const CharFnExpr& cf_y,
                                 std::array<double, 2> direction, double s_min = -5.0,
                                 double s_max = 5.0, double step = 0.001);

/// The lattice law behind the periodic triangular cf: P(0) = 1/2 and
/// P(+-(2k+1) pi) = 2 / (pi^2 (2k+1)^2).
struct LatticeMass {
  double partial_sum;  // mass of atoms with k <= kmax
  double tail_bound;   // upper bound on the omitted mass
};

LatticeMass periodic_triangular_lattice_mass(long kmax);

/// Fourier series of the lattice law truncated at kmax; approximates the
/// periodic triangular cf within 2 * tail_bound.
double periodic_triangular_from_lattice(double t, long kmax);

inline constexpr double kIndistinguishable = 1e-9;

struct CfPair {
  CharFnExpr x;
  CharFnExpr y;
};

/// X = (U + V, U - V), Y = (U + W, U - W) with U, V triangular and W periodic
/// triangular: cfs agree on the first quadrant, differ elsewhere.
CfPair canonical_pair();

/// CSV with header t1,t2,phi_x,phi_y,diff.
void write_scan_table(std::ostream& out, std::span<const ScanPoint> rows);

}  // namespace condclt
