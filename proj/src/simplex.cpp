#include "starlocal/simplex.hpp"

#include <cmath>
#include <limits>

#include "starlocal/errors.hpp"

namespace starlocal {

namespace {

constexpr double kEnterTol = 1e-10;  // reduced cost must beat this to enter
constexpr double kPivotTol = 1e-11;  // smallest usable pivot element

// Tableau with artificial columns appended and the objective row kept as
// reduced costs; column n+m is the right-hand side.
struct Tableau {
  std::size_t m, n;               // constraints, structural variables
  std::size_t width;              // n + m + 1
  std::vector<double> t;          // (m + 1) rows; last row = objective
  std::vector<std::size_t> basis;

  double& at(std::size_t r, std::size_t c) { return t[r * width + c]; }
  double& obj(std::size_t c) { return t[m * width + c]; }
  double& rhs(std::size_t r) { return t[r * width + n + m]; }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    const double inv = 1.0 / p;
    for (std::size_t j = 0; j < width; ++j) at(row, j) *= inv;
    at(row, col) = 1.0;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == row) continue;
      const double f = at(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) at(r, j) -= f * at(row, j);
      at(r, col) = 0.0;
    }
    basis[row] = col;
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double feas_tol) {
  const std::size_t m = lp.rows, n = lp.cols;
  if (lp.a.size() != m * n || lp.b.size() != m || lp.c.size() != n)
    throw ArgumentError("solve_lp: inconsistent problem sizes");

  Tableau tb;
  tb.m = m;
  tb.n = n;
  tb.width = n + m + 1;
  tb.t.assign((m + 1) * tb.width, 0.0);
  tb.basis.resize(m);

  for (std::size_t r = 0; r < m; ++r) {
    const double sign = lp.b[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) tb.at(r, j) = sign * lp.a[r * n + j];
    tb.at(r, n + r) = 1.0;
    tb.rhs(r) = sign * lp.b[r];
    tb.basis[r] = n + r;
  }

  LpSolution sol;

  // One simplex phase: minimize the current objective row over the
  // allowed entering columns.  Returns false on unboundedness.
  auto run_phase = [&](std::size_t allowed_cols) -> bool {
    std::size_t degenerate_run = 0;
    for (;;) {
      // Pricing: Dantzig normally, Bland after a degenerate stretch.
      const bool bland = degenerate_run > 64;
      std::size_t enter = allowed_cols;
      double best = -kEnterTol;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        const double red = tb.obj(j);
        if (red < best) {
          enter = j;
          if (bland) break;
          best = red;
        }
      }
      if (enter == allowed_cols) return true;  // optimal for this phase

      std::size_t leave = m;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m; ++r) {
        const double a = tb.at(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = tb.rhs(r) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (leave == m || tb.basis[r] < tb.basis[leave]))) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave == m) return false;  // unbounded direction

      degenerate_run = best_ratio < 1e-12 ? degenerate_run + 1 : 0;
      tb.pivot(leave, enter);
      ++sol.pivots;
    }
  };

  // Phase 1: minimize the sum of artificials.
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += tb.at(r, j);
    tb.obj(j) = -s;
  }
  double b_sum = 0.0;
  for (std::size_t r = 0; r < m; ++r) b_sum += tb.rhs(r);
  tb.obj(n + m) = -b_sum;

  if (!run_phase(n + m)) throw SolverError("solve_lp: phase 1 unbounded (internal)");
  if (-tb.obj(n + m) > feas_tol) {
    sol.status = LpStatus::infeasible;
    return sol;
  }

  // Drive leftover artificials out of the basis; rows where no structural
  // pivot exists are redundant and keep their artificial at value ~0.
  for (std::size_t r = 0; r < m; ++r) {
    if (tb.basis[r] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(tb.at(r, j)) > 1e-9) {
        tb.pivot(r, j);
        ++sol.pivots;
        break;
      }
    }
  }

  // Phase 2: rebuild the objective row for the real costs.
  for (std::size_t j = 0; j < tb.width; ++j) tb.obj(j) = 0.0;
  for (std::size_t j = 0; j < n; ++j) tb.obj(j) = lp.c[j];
  for (std::size_t r = 0; r < m; ++r) {
    const double cb = tb.basis[r] < n ? lp.c[tb.basis[r]] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < tb.width; ++j) tb.obj(j) -= cb * tb.at(r, j);
  }

  if (!run_phase(n)) {
    sol.status = LpStatus::unbounded;
    return sol;
  }

  sol.status = LpStatus::optimal;
  sol.objective = -tb.obj(n + m);
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (tb.basis[r] < n) sol.x[tb.basis[r]] = tb.rhs(r);
  sol.y.resize(m);
  for (std::size_t r = 0; r < m; ++r) sol.y[r] = -tb.obj(n + r);
  return sol;
}

}  // namespace starlocal
