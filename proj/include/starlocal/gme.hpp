#pragma once

#include <cstddef>

#include "starlocal/linalg.hpp"
#include "starlocal/states.hpp"

namespace starlocal {

// Outcome of the X-matrix concurrence lower bound
//   C(rho) = 2 max_i (|z_i| - w_i),
// where for i = 1..2^{n-1} the antidiagonal pair is
//   c_i = rho[i-1, i-1], d_i = rho[2^n - i, 2^n - i],
//   z_i = rho[i-1, 2^n - i],  w_i = sum_{j != i} sqrt(c_j d_j).
// A positive score certifies genuine multipartite entanglement.
struct GMEReport {
  double score = 0.0;
  std::size_t witness_index = 0;  // 1-based maximizing i, smallest on ties
  double z_abs = 0.0;
  double w_i = 0.0;
  bool certified = false;
};

// The bound evaluated on an n-qubit state (all dims must equal 2).
GMEReport gme_score(const DensityMatrix& rho);

// Closed form of the same score for x_matrix_state(n, p):
//   2 sin^n(2t) (a^n + ((1+a)/2)^n + ((1-a)/2)^n - 1)
//     / ( [1 + a cos2t]^n + [1 - a cos2t]^n ).
// May be negative (then nothing is certified).
double analytic_concurrence(std::size_t n, const FamilyParams& p);

// a^n + ((1+a)/2)^n + ((1-a)/2)^n - 1; positivity of this margin is what
// makes the certificate work at theta saturating the unsteerability
// condition.
double gme_margin(std::size_t n, double alpha);

// Certification for states with a third local level: project every party
// onto its qubit subspace (a local operation, which cannot create
// entanglement), then score the projection.  A positive score therefore
// certifies the original state as well.
GMEReport gme_score_via_projection(const DensityMatrix& rho);

}  // namespace starlocal
