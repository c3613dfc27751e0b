#pragma once

#include <cstddef>

namespace starlocal {

// Every numerical threshold used by the library, in one place.  The
// defaults are deliberate choices, not ad-hoc epsilons; change them
// through tolerances() before doing work, not mid-computation.
struct Tolerances {
  // Density-matrix validation.
  double hermiticity = 1e-10;      // max |M - M^dag| entrywise
  double unit_trace = 1e-10;       // |tr - 1|
  double psd_floor = -1e-9;        // smallest admissible eigenvalue
  double ket_norm = 1e-12;         // | ||psi|| - 1 |

  // Linear-map bookkeeping.
  double trace_preserve = 1e-12;   // partial trace must keep tr within this
  double map_weight_floor = 1e-14; // below: map annihilated the state
  double entry_match = 1e-10;      // generic entrywise comparison

  // Jacobi eigensolver.
  double jacobi_offdiag = 1e-12;   // off-diagonal Frobenius norm target
  int jacobi_max_sweeps = 100;

  // Measurement / behavior validation.
  double povm_check = 1e-9;        // completeness + PSD slack for POVMs
  double behavior_norm = 1e-10;    // per-setting normalization slack
  double behavior_nonneg = -1e-12; // most negative admissible probability

  // Linear programming.
  double lp_feasibility = 1e-9;

  // Root finding (bisection).
  double bisect_tol = 1e-14;
  int bisect_max_iter = 200;

  // Unsteerability boundary: equality counts as unsteerable within this.
  double unsteerable_slack = 1e-12;

  // Hard caps.
  std::size_t max_matrix_side = 1u << 16;  // refuse larger dense matrices
  std::size_t max_vertices = 1000000;      // refuse larger vertex sets

  // Monte Carlo.
  double min_effective_samples = 100.0;    // below: precision warning
};

// Process-wide defaults.  Mutable so the CLI can apply overrides once at
// startup; individual operations read it at call time.
Tolerances& tolerances();

}  // namespace starlocal
