#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "starlocal/exec.hpp"
#include "starlocal/linalg.hpp"
#include "starlocal/tolerances.hpp"

namespace starlocal {

// A Bell scenario: per-party input and output counts.
struct Scenario {
  std::size_t n_parties = 0;
  std::vector<std::size_t> inputs;   // settings per party, each >= 1
  std::vector<std::size_t> outputs;  // outcomes per party, each >= 1

  static Scenario uniform(std::size_t parties, std::size_t inputs, std::size_t outputs);

  std::size_t joint_inputs() const;   // product of inputs
  std::size_t joint_outputs() const;  // product of outputs
  std::size_t cells() const { return joint_inputs() * joint_outputs(); }
  bool operator==(const Scenario& o) const = default;
};

void validate_scenario(const Scenario& s);

// POVMs for every party and setting: ops[party][input][outcome].
// Validated on construction: PSD and completeness within povm_check.
class MeasurementAssignment {
 public:
  MeasurementAssignment(Scenario scenario,
                        std::vector<std::vector<std::vector<ComplexMatrix>>> ops,
                        const Tolerances& tol = tolerances());

  const Scenario& scenario() const { return scenario_; }
  const ComplexMatrix& op(std::size_t party, std::size_t input, std::size_t outcome) const {
    return ops_[party][input][outcome];
  }
  std::size_t local_dim(std::size_t party) const { return ops_[party][0][0].rows(); }

 private:
  Scenario scenario_;
  std::vector<std::vector<std::vector<ComplexMatrix>>> ops_;
};

// Two projectors (I +- n.sigma)/2 for a unit Bloch vector n.
std::array<ComplexMatrix, 2> projective_qubit(const std::array<double, 3>& bloch);

// Convenience: a qubit assignment from Bloch directions
// dirs[party][input]; two outcomes each, outcome 0 along +n.
MeasurementAssignment assignment_from_bloch(
    const std::vector<std::vector<std::array<double, 3>>>& dirs);

// Uniformly random directions dirs[party][setting], drawn from one
// generator stream per party (stream id 2^20 + party of `seed`), so the
// draw is independent of how many settings other parties have.
std::vector<std::vector<std::array<double, 3>>> random_bloch_directions(std::size_t parties,
                                                                        std::size_t settings,
                                                                        std::uint64_t seed);

// Joint conditional distribution p(a|x).  Layout: x-major then a-minor,
// both mixed-radix with party 1 most significant; table index is
// x_index * joint_outputs + a_index.
class Behavior {
 public:
  Behavior(Scenario scenario, std::vector<double> table,
           const Tolerances& tol = tolerances());

  static Behavior uniform(const Scenario& s);

  const Scenario& scenario() const { return scenario_; }
  const std::vector<double>& table() const { return table_; }
  double prob(std::size_t x_index, std::size_t a_index) const {
    return table_[x_index * scenario_.joint_outputs() + a_index];
  }

 private:
  Scenario scenario_;
  std::vector<double> table_;
};

// p(a|x) = Tr[rho (tensor of M_{a_i|x_i})].
Behavior quantum_behavior(const DensityMatrix& rho, const MeasurementAssignment& m,
                          ExecPolicy policy = ExecPolicy::parallel);

// For binary outcomes: E(x) = sum_a (-1)^{sum a_i} p(a|x).
double correlator(const Behavior& b, std::size_t x_index);

}  // namespace starlocal
