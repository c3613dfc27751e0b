#pragma once

#include <cstddef>
#include <vector>

#include "starlocal/exec.hpp"
#include "starlocal/linalg.hpp"

namespace starlocal {

// Parameters of the two-qubit family
//   rho(alpha, theta) = alpha |psi><psi| + (1 - alpha) rho_A (x) I/2,
// with |psi> = cos(theta)|00> + sin(theta)|11> and rho_A its A-marginal.
struct FamilyParams {
  double alpha = 0.0;  // in [0, 1]
  double theta = 0.0;  // in [0, pi/4]
};

void validate_family(const FamilyParams& p);

// Dense 4x4 realization; diagonal ((1+a)/2 c^2, (1-a)/2 c^2, (1-a)/2 s^2,
// (1+a)/2 s^2) with corners a*c*s.
DensityMatrix rho_family(const FamilyParams& p);

// Entangled iff theta > 0 and alpha > 1/3.
bool is_entangled_family(const FamilyParams& p);

// Right-hand side of the unsteerability condition, (2a-1)/((2-a)a^3).
double unsteerability_bound(double alpha);

// Unsteerable (A -> B, projective measurements) iff
// cos^2(2 theta) >= (2a-1)/((2-a)a^3); equality counts, with a small
// slack for roundoff.  alpha = 0 returns true (separable).
bool is_unsteerable_family(const FamilyParams& p);

// The theta in [0, pi/4] at which the unsteerability condition holds with
// equality, found by bisection on cos(2 theta).  Errors when the bound
// lies outside [0, 1] (no such theta).
double saturating_theta(double alpha);

// (|0...0> + |1...1>)/sqrt(2) on n qubits.
Ket ghz_ket(std::size_t n);

// The single Kraus row |0>(<0...0| + <1...1|) collapsing n qubits to a
// one-dimensional output: the center projection of the star network.
std::vector<ComplexMatrix> ghz_projector_map(std::size_t n);

// A star network: n arms, each a bipartite state whose first subsystem
// goes to an outer party and whose second feeds the center, plus a Kraus
// map applied jointly to the center block.
struct NetworkSpec {
  std::size_t n_parties = 0;
  std::vector<DensityMatrix> arm_states;   // length n_parties, each 2 subsystems
  std::vector<ComplexMatrix> center_map;   // input dim = product of arm B dims
  bool keep_center = false;

  // All arms identical.
  static NetworkSpec uniform(std::size_t n, const DensityMatrix& arm,
                             std::vector<ComplexMatrix> center_map, bool keep_center = false);
};

void validate_network(const NetworkSpec& spec);

struct StarState {
  DensityMatrix state;    // outer parties in arm order; center appended if kept
  double normalization;   // trace removed by the center map
};

// Build the network state: order all A subsystems first, apply the center
// map to the joint B block, drop (or keep) the center output, normalize.
// Uses per-arm 2x2 blocks <b|rho|b'> when the center map is sparse, so
// the 4^n product state is never materialized; falls back to the dense
// route otherwise.
StarState star_network_state(const NetworkSpec& spec, ExecPolicy policy = ExecPolicy::parallel);

// Reference implementation that does materialize the tensor product and
// calls apply_kraus; only viable for small n.  Kept as the oracle the
// fast path is tested against.
StarState star_network_state_dense(const NetworkSpec& spec);

// State supported on the main diagonal plus the |0...0><1...1| corner.
class XMatrixState {
 public:
  XMatrixState(std::size_t n_qubits, std::vector<double> diagonal, cplx corner);

  std::size_t n_qubits() const { return n_; }
  const std::vector<double>& diagonal() const { return diag_; }
  cplx corner() const { return corner_; }

  DensityMatrix to_density() const;

 private:
  std::size_t n_;
  std::vector<double> diag_;
  cplx corner_;
};

// Closed form of the star-network output with the GHZ-projector center:
// diagonal weight at a bitstring with m ones is gamma(m)/T, corner is
// (alpha cos sin)^n / T, with T = [ (1+a c2)/2 ]^n + [ (1-a c2)/2 ]^n,
// c2 = alpha cos(2 theta) ... see gamma_weight below.
XMatrixState x_matrix_state(std::size_t n, const FamilyParams& p);

// gamma(m) = c^{2(n-m)} s^{2m} [ ((1+a)/2)^{n-m}((1-a)/2)^m
//                              + ((1+a)/2)^m((1-a)/2)^{n-m} ].
double gamma_weight(std::size_t n, std::size_t m, const FamilyParams& p);

// Trace of the unnormalized projected state:
// [ (1+a cos2t)/2 ]^n + [ (1-a cos2t)/2 ]^n.
double x_matrix_normalization(std::size_t n, const FamilyParams& p);

// Qutrit extension: each party gets a third level; the state is
// 2^{-n} [ rho_{A1..An} + sum_{j<n} (sum over size-j subsets S of
// (marginal on S) tensor |2><2| elsewhere) ], built so that projecting
// every party back onto levels {0,1} recovers the n-qubit state.
DensityMatrix rho_gme_qutrit(std::size_t n, const FamilyParams& p);

struct FilterResult {
  DensityMatrix state;
  double success_probability;
};

// Local filter G = eps|0><0| + |1><1| on every party (levels >= 2 are
// annihilated); success renormalizes.
FilterResult apply_local_filter(const DensityMatrix& rho, double eps);

// The filtered X-matrix at eps = tan(theta): diagonal gamma'(m)/2 with
// gamma'(m) = ((1+a)/2)^{n-m}((1-a)/2)^m + ((1+a)/2)^m((1-a)/2)^{n-m},
// corner alpha^n / 2.  Independent of theta.
XMatrixState analytic_filtered_state(std::size_t n, const FamilyParams& p);

// <GHZ| . |GHZ> of analytic_filtered_state in closed form:
// [ alpha^n + ((1+alpha)/2)^n + ((1-alpha)/2)^n ] / 2.
double analytic_filtered_fidelity(std::size_t n, double alpha);

struct ProjectionResult {
  DensityMatrix state;   // all dims 2
  double weight;
};

// Project every party onto span{|0>,|1>} and renormalize.
ProjectionResult project_qubit_subspace(const DensityMatrix& rho);

}  // namespace starlocal
