#include <doctest.h>

#include <cmath>

#include "starlocal/simplex.hpp"

using namespace starlocal;

namespace {

LinearProgram make_lp(std::size_t rows, std::size_t cols, std::vector<double> a,
                      std::vector<double> b, std::vector<double> c) {
  LinearProgram lp;
  lp.rows = rows;
  lp.cols = cols;
  lp.a = std::move(a);
  lp.b = std::move(b);
  lp.c = std::move(c);
  return lp;
}

}  // namespace

TEST_SUITE("simplex") {

TEST_CASE("bounded optimum with duals") {
  // min -x1 - 2 x2  s.t.  x1 + x2 + s1 = 4,  x1 + s2 = 2.
  const LinearProgram lp =
      make_lp(2, 4, {1, 1, 1, 0, 1, 0, 0, 1}, {4, 2}, {-1, -2, 0, 0});
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective == doctest::Approx(-8.0));
  CHECK(s.x[1] == doctest::Approx(4.0));
  CHECK(s.x[0] == doctest::Approx(0.0));
  // Strong duality: y.b equals the optimum.
  CHECK(s.y[0] * 4.0 + s.y[1] * 2.0 == doctest::Approx(-8.0));
  // Dual feasibility: A^T y <= c componentwise.
  for (std::size_t j = 0; j < 4; ++j) {
    const double aty = s.y[0] * lp.a[j] + s.y[1] * lp.a[4 + j];
    CHECK(aty <= lp.c[j] + 1e-9);
  }
}

TEST_CASE("negative right-hand sides are normalized away") {
  // min x1  s.t.  -x1 = -3.
  const LpSolution s = solve_lp(make_lp(1, 1, {-1}, {-3}, {1}));
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective == doctest::Approx(3.0));
  CHECK(s.x[0] == doctest::Approx(3.0));
}

TEST_CASE("infeasible program is detected in phase one") {
  // x1 + x2 = -1 with x >= 0.
  const LpSolution s = solve_lp(make_lp(1, 2, {1, 1}, {-1}, {1, 1}));
  CHECK(s.status == LpStatus::infeasible);
}

TEST_CASE("unbounded ray is detected") {
  // min -x1  s.t.  x1 - x2 = 0.
  const LpSolution s = solve_lp(make_lp(1, 2, {1, -1}, {0}, {-1, 0}));
  CHECK(s.status == LpStatus::unbounded);
}

TEST_CASE("classic degenerate cycling instance terminates at the optimum") {
  // Beale's example, equality form with slacks first.
  const LpSolution s = solve_lp(make_lp(
      3, 7,
      {1, 0, 0, 0.25, -60, -1.0 / 25.0, 9,
       0, 1, 0, 0.50, -90, -1.0 / 50.0, 3,
       0, 0, 1, 0.00, 0, 1.0, 0},
      {0, 0, 1}, {0, 0, 0, -0.75, 150, -1.0 / 50.0, 6}));
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective == doctest::Approx(-0.05));
  CHECK(s.x[3] == doctest::Approx(0.04));
  CHECK(s.x[5] == doctest::Approx(1.0));
}

TEST_CASE("redundant equalities still solve") {
  // Same row twice: artificial stays basic at zero and must be driven out.
  const LpSolution s =
      solve_lp(make_lp(2, 2, {1, 1, 1, 1}, {2, 2}, {1, 0}));
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective == doctest::Approx(0.0));
  CHECK(s.x[1] == doctest::Approx(2.0));
}

TEST_CASE("feasibility at equality boundaries") {
  // Probability-mixture shape: w1 + w2 = 1, w1 - w2 = 0.
  const LpSolution s =
      solve_lp(make_lp(2, 2, {1, 1, 1, -1}, {1, 0}, {-1, -1}));
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.x[0] == doctest::Approx(0.5));
  CHECK(s.x[1] == doctest::Approx(0.5));
  CHECK(s.objective == doctest::Approx(-1.0));
}

}  // TEST_SUITE
