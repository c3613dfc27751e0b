#pragma once

#include <cstddef>
#include <vector>

#include "starlocal/complex_matrix.hpp"
#include "starlocal/tolerances.hpp"

namespace starlocal {

// A validated quantum state on a tensor product of subsystems.  The
// constructor enforces: square shape matching the product of dims, every
// dim >= 2, finite entries, Hermiticity, unit trace and positive
// semidefiniteness (smallest eigenvalue >= psd_floor).  Use unchecked()
// only for outputs that are positive by construction.
class DensityMatrix {
 public:
  DensityMatrix(ComplexMatrix m, std::vector<std::size_t> dims,
                const Tolerances& tol = tolerances());

  static DensityMatrix unchecked(ComplexMatrix m, std::vector<std::size_t> dims);

  const ComplexMatrix& matrix() const { return mat_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t side() const { return mat_.rows(); }
  std::size_t n_subsystems() const { return dims_.size(); }

  static DensityMatrix pure(const Ket& psi, std::vector<std::size_t> dims,
                            const Tolerances& tol = tolerances());

 private:
  DensityMatrix() = default;
  ComplexMatrix mat_;
  std::vector<std::size_t> dims_;
};

// Trace out every subsystem not listed in `keep` (indices ascending,
// 0-based, nonempty, no duplicates).  The kept subsystems stay in their
// original order.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& keep);

// Result of applying a (possibly trace-decreasing) operator-sum map to a
// subset of subsystems: sum_k K_k rho K_k^dag restricted to the targets.
// `unnormalized` keeps its raw trace; `weight` is that trace, i.e. the
// success probability of the map.  Divide by `weight` for a state.
struct KrausResult {
  ComplexMatrix unnormalized;
  std::vector<std::size_t> dims;   // output subsystem dims (may be empty)
  double weight;
};

// Apply the Kraus map given by `ops` (each d_out x d_target, identical
// shapes) to the subsystems listed in `targets` (ascending).  The mapped
// block is replaced by a single subsystem of dimension d_out appended
// AFTER the untouched subsystems; when d_out == 1 it is dropped (the map
// acted as a pure weight measurement).  Throws DegenerateError when the
// map annihilates the state (weight below map_weight_floor).
KrausResult apply_kraus(const DensityMatrix& rho, const std::vector<ComplexMatrix>& ops,
                        const std::vector<std::size_t>& targets,
                        const Tolerances& tol = tolerances());

// All eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi
// rotations (two-sided unitary similarity).  Throws ArgumentError if the
// input is visibly non-Hermitian, SolverError if the sweep cap is hit
// while the off-diagonal mass is still large.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m,
                                          const Tolerances& tol = tolerances());

double hermitian_eigen_min(const ComplexMatrix& m, const Tolerances& tol = tolerances());

// <psi| rho |psi> for a normalized |psi>.
double fidelity_with_pure(const DensityMatrix& rho, const Ket& psi,
                          const Tolerances& tol = tolerances());

}  // namespace starlocal
