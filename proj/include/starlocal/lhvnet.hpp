#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "starlocal/correlations.hpp"
#include "starlocal/exec.hpp"
#include "starlocal/linalg.hpp"
#include "starlocal/rng.hpp"

namespace starlocal {

// One hidden-variable draw.  The built-in continuous model uses `bloch`;
// finite models loaded from JSON use `index`.
struct Lambda {
  std::array<double, 3> bloch{0.0, 0.0, 1.0};
  std::size_t index = 0;
};

// A local-hidden-state model for one bipartite arm state rho_AB: a
// density over lambda, hidden qubit states sigma_lambda on B, and the
// A-side response p_lambda(a|x).  The defining identity
//   Tr_A[(M_{a|x} (x) I) rho] = E_lambda[ p_lambda(a|x) sigma_lambda ]
// is what tests/validation verify; the interface deliberately gives a
// response access to nothing but its own lambda and its own measurement.
class LHSModel {
 public:
  virtual ~LHSModel() = default;
  virtual Lambda sample(RngStream& rng) const = 0;
  virtual ComplexMatrix hidden_state(const Lambda& l) const = 0;  // 2x2, unit trace
  // Outcome distribution for one input, given as its measurement
  // operator list.
  virtual std::vector<double> response(const Lambda& l,
                                       const std::vector<ComplexMatrix>& input_ops) const = 0;
  virtual const DensityMatrix& arm_state() const = 0;  // the rho_AB being modeled
};

// The model at the point alpha = 1/2, theta = pi/4 (where the
// unsteerability condition is saturated): lambda uniform on the sphere,
// sigma_lambda the pure state along lambda, responses deterministic by
// hemisphere after a y-axis reflection of the measurement direction.
// Construction runs a Monte-Carlo check of the defining identity
// (validation_samples draws, every tested direction within 6 standard
// errors) and throws SolverError if it fails.
std::shared_ptr<const LHSModel> builtin_werner_lhs(std::size_t validation_samples = 1000000,
                                                   std::uint64_t validation_seed = 61803398);

// A finite-lambda model: mixture of (q_k, sigma_k, response table)
// triples with declared measurement operators per input.  Construction
// checks the defining identity as an exact finite sum.
std::shared_ptr<const LHSModel> discrete_lhs_model(
    DensityMatrix arm_state, std::vector<double> q,
    std::vector<ComplexMatrix> sigmas,
    std::vector<std::vector<std::vector<double>>> response_tables,  // [k][input][outcome]
    std::vector<std::vector<ComplexMatrix>> declared_inputs);

// The star-network hidden-variable model assembled from per-arm LHS
// models: lambda = (lambda_1..lambda_n) with importance weight
// Tr[Lambda_B((x)_i sigma_{lambda_i})]; party i answers from arm i alone.
class LiftedModel {
 public:
  LiftedModel(std::vector<std::shared_ptr<const LHSModel>> arms,
              std::vector<ComplexMatrix> center_map, bool keep_center = false);

  std::size_t n_arms() const { return arms_.size(); }
  const LHSModel& arm(std::size_t i) const { return *arms_[i]; }
  bool keep_center() const { return keep_center_; }
  std::size_t center_out_dim() const { return d_out_; }
  // Exact normalization Tr[Lambda_B((x)_i rho_B^i)]; the Monte-Carlo
  // weight mean must reproduce this.
  double normalization() const { return normalization_; }

  // Importance weight of a joint draw, given the per-arm hidden states.
  double weight(const std::vector<ComplexMatrix>& sigmas) const;
  // Normalized center output state Lambda_B((x) sigma)/weight (only
  // meaningful when the center is kept with output dim >= 2).
  ComplexMatrix center_state(const std::vector<ComplexMatrix>& sigmas, double weight) const;

 private:
  struct CenterEntry {
    std::size_t out;
    std::vector<std::size_t> digits;
    cplx value;
  };
  std::vector<std::shared_ptr<const LHSModel>> arms_;
  std::vector<ComplexMatrix> center_map_;
  std::vector<std::vector<CenterEntry>> sparse_;
  std::vector<std::size_t> b_dims_;
  std::size_t d_out_ = 1;
  bool keep_center_ = false;
  double normalization_ = 0.0;
};

struct SimulationResult {
  Behavior behavior;
  std::vector<double> stderr_table;  // jackknife SE per cell
  double weight_mean = 0.0;
  double weight_se = 0.0;
  double normalization = 0.0;  // the exact target for weight_mean
  double ess = 0.0;            // (sum w)^2 / sum w^2
  bool precision_warning = false;
  std::size_t samples = 0;
  std::size_t chunks = 0;
  std::uint64_t seed = 0;
};

// Self-normalized importance-sampled estimate of the model's behavior
// under `m` (arms first; if the center is kept, it is the last party and
// responds with Tr[sigma_vec M_{b|y}]).  Work is split into `chunks`
// independent generator streams; results are bit-identical for a fixed
// (seed, samples, chunks) regardless of thread count or policy.
SimulationResult simulate_behavior(const LiftedModel& model, const MeasurementAssignment& m,
                                   std::size_t samples, std::uint64_t seed,
                                   std::size_t chunks = 64,
                                   ExecPolicy policy = ExecPolicy::parallel);

// Statistical agreement between a simulated behavior and a reference
// (typically the quantum behavior of the corresponding network state):
// per-cell deviations against jackknife SEs at a familywise 3-sigma
// level (Bonferroni over the table, so the threshold is 3 for a single
// cell and grows like sqrt(2 log K)), aggregate total-variation
// distance against 3x its SE budget, and the weight mean against the
// exact normalization within 3 sigma.
struct BehaviorComparison {
  double max_cell_deviation = 0.0;
  double max_cell_sigma = 0.0;        // worst |dev| / SE over cells with SE > 0
  double cell_threshold_sigma = 0.0;  // familywise gate applied per cell
  std::size_t cells_beyond_3se = 0;   // informational: ~0.27% expected
  double tv_distance = 0.0;           // mean over settings of per-setting TV
  double tv_budget = 0.0;             // same aggregation of the cell SEs
  double weight_sigma = 0.0;          // |weight_mean - normalization| / weight_se
  bool per_cell_ok = false;
  bool tv_ok = false;
  bool weight_ok = false;
  bool all_ok = false;
};

BehaviorComparison compare_behaviors(const SimulationResult& sim, const Behavior& reference);

}  // namespace starlocal
