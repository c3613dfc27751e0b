#pragma once

#include <cstddef>
#include <vector>

namespace starlocal {

// min c.x  subject to  A x = b, x >= 0.  Rows of A are stored row-major
// in `a`.  b may have any sign (rows are negated internally).
struct LinearProgram {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // rows * cols
  std::vector<double> b;  // rows
  std::vector<double> c;  // cols
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;  // primal values, length cols
  std::vector<double> y;  // equality duals, length rows (optimal only)
  std::size_t pivots = 0;
};

// Dense two-phase primal simplex.  Dantzig pricing with a switch to
// Bland's rule after a run of degenerate pivots, which guarantees
// termination.  Artificial columns are kept (blocked from re-entering)
// so the duals can be read off their final reduced costs.
LpSolution solve_lp(const LinearProgram& lp, double feas_tol = 1e-9);

}  // namespace starlocal
