#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "condclt/cwold.hpp"
#include "condclt/errors.hpp"

using namespace condclt;

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

double eval2(const CharFnExpr& e, double t1, double t2) {
  const double t[2] = {t1, t2};
  return eval_cf(e, t);
}

double eval1(const CharFnExpr& e, double t) {
  const double v[1] = {t};
  return eval_cf(e, v);
}

}  // namespace

TEST_CASE("base cf examples") {
  CHECK(eval1(triangular(), 0.5) == 0.5);
  CHECK(eval1(triangular(), 1.7) == 0.0);
  CHECK(eval1(periodic_triangular(), 1.2) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(eval1(triangular(2.0), 0.25) == doctest::Approx(0.875));
  CHECK(eval1(periodic_triangular(), 2.0) == doctest::Approx(1.0));
  CHECK(eval1(periodic_triangular(), 101.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("arity") {
  CHECK(arity(triangular()) == 1);
  CHECK(arity(canonical_pair().x) == 2);
  const double t3[3] = {0, 0, 0};
  CHECK(code_of([&] { eval_cf(canonical_pair().x, std::span<const double>(t3, 1)); }) == ErrorCode::ArityMismatch);
  CHECK(code_of([&] { eval_cf(triangular(), std::span<const double>(t3, 2)); }) == ErrorCode::ArityMismatch);
  CHECK(code_of([&] { eval_cf(canonical_pair().y, std::span<const double>(t3, 3)); }) == ErrorCode::ArityMismatch);
}

TEST_CASE("base cfs are valid on a dense grid") {
  for (const auto& cf : {triangular(), triangular(2.5), periodic_triangular()}) {
    CHECK(eval_base(cf, 0.0) == 1.0);
    for (double t = -20; t <= 20; t += 0.0037) {
      const double v = eval_base(cf, t);
      CHECK(std::abs(v) <= 1.0);
      CHECK(v == doctest::Approx(eval_base(cf, -t)).epsilon(1e-14));
    }
  }
}

TEST_CASE("periodic triangular is the cf of the lattice law") {
  const auto mass = periodic_triangular_lattice_mass(100000);
  CHECK(std::abs(mass.partial_sum - 1.0) <= mass.tail_bound + 1e-12);
  CHECK(mass.tail_bound < 1e-5);
  // analytic tail: sum_{k > K} 4 / (pi^2 (2k+1)^2) <= 1 / (pi^2 (K + 1/2))... checked directly
  double tail = 0.0;
  for (long k = 100001; k < 3000000; ++k) tail += 4.0 / (std::numbers::pi * std::numbers::pi * (2.0 * k + 1) * (2.0 * k + 1));
  CHECK(tail <= mass.tail_bound);
  for (double t = -3; t <= 3; t += 0.173) {
    const double series = periodic_triangular_from_lattice(t, 100000);
    CHECK(std::abs(series - eval_base(periodic_triangular(), t)) <= 2 * mass.tail_bound + 1e-12);
  }
}

TEST_CASE("octant_equality_scan") {
  const auto pair = canonical_pair();
  const auto scan = octant_equality_scan(pair.x, pair.y, 0.015, 3.0);
  CHECK(scan.max_diff < 1e-12);
  CHECK(octant_equality_scan(pair.x, pair.x, 0.015, 3.0).max_diff == 0.0);

  const CharFnExpr scaled = PairCf{triangular(), triangular(2.0)};
  const auto det = octant_equality_scan(pair.x, scaled, 0.05, 3.0);
  CHECK(det.max_diff > 0.0);
  CHECK(cf_difference_at(pair.x, scaled, {0.25, 0.0}) > 0.0);

  const auto rows = octant_equality_scan(pair.x, pair.y, 0.5, 1.0, true);
  CHECK(rows.rows.size() == 9);
  CHECK(code_of([&] { octant_equality_scan(pair.x, pair.y, 0.0, 1.0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([&] { octant_equality_scan(pair.x, pair.y, 0.1, -1.0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([&] { octant_equality_scan(pair.x, triangular(), 0.1, 1.0); }) == ErrorCode::ArityMismatch);
}

TEST_CASE("counterexample_witness") {
  const auto pair = canonical_pair();
  CHECK(eval2(pair.x, -0.6, 0.6) == 0.0);
  CHECK(eval2(pair.y, -0.6, 0.6) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(std::abs(cf_difference_at(pair.x, pair.y, {-0.6, 0.6}) - 0.2) < 1e-12);
  CHECK(cf_difference_at(pair.x, pair.y, {-0.6, 0.6}) == cf_difference_at(pair.x, pair.y, {0.6, -0.6}));

  const auto w = counterexample_witness(pair.x, pair.y, 0.015, 3.0);
  CHECK(w.diff >= 0.19);
  CHECK_FALSE((w.t1 >= 0 && w.t2 >= 0));
  CHECK(std::abs(w.diff - std::abs(eval2(pair.x, w.t1, w.t2) - eval2(pair.y, w.t1, w.t2))) < 1e-15);
  CHECK(code_of([&] { counterexample_witness(pair.x, pair.x, 0.015, 3.0); }) == ErrorCode::NoDifferenceFound);
}

TEST_CASE("marginal_difference_along") {
  const auto pair = canonical_pair();
  CHECK(marginal_difference_along(pair.x, pair.y, {1, -1}) >= 0.19);
  CHECK(marginal_difference_along(pair.x, pair.y, {1, 1}) < 1e-14);
  CHECK(marginal_difference_along(pair.x, pair.y, {1, 0}, 0.0, 5.0) == 0.0);
  CHECK(code_of([&] { marginal_difference_along(pair.x, pair.y, {0, 0}); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("positive-direction agreement on random points") {
  const auto pair = canonical_pair();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 100; ++i) CHECK(cf_difference_at(pair.x, pair.y, {u(rng), u(rng)}) < 1e-14);
}

TEST_CASE("octant equality and off-octant difference coexist") {
  const auto pair = canonical_pair();
  CHECK(octant_equality_scan(pair.x, pair.y, 0.015, 3.0).max_diff < kIndistinguishable);
  CHECK(counterexample_witness(pair.x, pair.y, 0.015, 3.0).diff > kIndistinguishable);
  CHECK_FALSE(std::get<PairCf>(pair.x).u.has_exponential_moments());
}

TEST_CASE("scan table export") {
  const auto pair = canonical_pair();
  const auto scan = octant_equality_scan(pair.x, pair.y, 1.0, 1.0, true);
  std::ostringstream out;
  write_scan_table(out, scan.rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t1,t2,phi_x,phi_y,diff");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
}
