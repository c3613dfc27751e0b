#include "starlocal/correlations.hpp"

#include <bit>
#include <cmath>

#include "starlocal/errors.hpp"
#include "starlocal/indexing.hpp"
#include "starlocal/rng.hpp"

namespace starlocal {

Scenario Scenario::uniform(std::size_t parties, std::size_t inputs, std::size_t outputs) {
  Scenario s;
  s.n_parties = parties;
  s.inputs.assign(parties, inputs);
  s.outputs.assign(parties, outputs);
  return s;
}

std::size_t Scenario::joint_inputs() const { return radix_product(inputs); }
std::size_t Scenario::joint_outputs() const { return radix_product(outputs); }

void validate_scenario(const Scenario& s) {
  if (s.n_parties == 0) throw ArgumentError("Scenario: no parties");
  if (s.inputs.size() != s.n_parties || s.outputs.size() != s.n_parties)
    throw ArgumentError("Scenario: per-party count lists must match party count");
  for (std::size_t v : s.inputs)
    if (v == 0) throw ArgumentError("Scenario: zero inputs for a party");
  for (std::size_t v : s.outputs)
    if (v == 0) throw ArgumentError("Scenario: zero outputs for a party");
}

MeasurementAssignment::MeasurementAssignment(
    Scenario scenario, std::vector<std::vector<std::vector<ComplexMatrix>>> ops,
    const Tolerances& tol)
    : scenario_(std::move(scenario)), ops_(std::move(ops)) {
  validate_scenario(scenario_);
  if (ops_.size() != scenario_.n_parties)
    throw ArgumentError("MeasurementAssignment: party count mismatch");
  // The eigen check below should accept anything that passes the looser
  // POVM hermiticity gate.
  Tolerances eigtol = tol;
  eigtol.hermiticity = tol.povm_check;
  for (std::size_t p = 0; p < scenario_.n_parties; ++p) {
    if (ops_[p].size() != scenario_.inputs[p])
      throw ArgumentError("MeasurementAssignment: input count mismatch");
    const std::size_t d = ops_[p].empty() || ops_[p][0].empty() ? 0 : ops_[p][0][0].rows();
    if (d == 0) throw ArgumentError("MeasurementAssignment: empty operator list");
    for (std::size_t x = 0; x < scenario_.inputs[p]; ++x) {
      if (ops_[p][x].size() != scenario_.outputs[p])
        throw ArgumentError("MeasurementAssignment: outcome count mismatch");
      ComplexMatrix sum(d, d);
      for (const ComplexMatrix& m : ops_[p][x]) {
        if (m.rows() != d || m.cols() != d)
          throw ArgumentError("MeasurementAssignment: operator dimension mismatch");
        if (!m.all_finite()) throw ArgumentError("MeasurementAssignment: non-finite entry");
        if (m.hermiticity_defect() > tol.povm_check)
          throw ArgumentError("MeasurementAssignment: operator not Hermitian");
        if (hermitian_eigen_min(m, eigtol) < -tol.povm_check)
          throw ArgumentError("MeasurementAssignment: operator not positive");
        sum += m;
      }
      if (sum.max_abs_diff(ComplexMatrix::identity(d)) > tol.povm_check)
        throw ArgumentError("MeasurementAssignment: operators do not sum to identity");
    }
  }
}

std::array<ComplexMatrix, 2> projective_qubit(const std::array<double, 3>& bloch) {
  const double norm =
      std::sqrt(bloch[0] * bloch[0] + bloch[1] * bloch[1] + bloch[2] * bloch[2]);
  if (std::abs(norm - 1.0) > 1e-10)
    throw ArgumentError("projective_qubit: direction must be a unit vector");
  std::array<ComplexMatrix, 2> m{ComplexMatrix(2, 2), ComplexMatrix(2, 2)};
  for (int s = 0; s < 2; ++s) {
    const double sg = s == 0 ? 1.0 : -1.0;
    m[s](0, 0) = 0.5 * (1.0 + sg * bloch[2]);
    m[s](1, 1) = 0.5 * (1.0 - sg * bloch[2]);
    m[s](0, 1) = 0.5 * sg * cplx(bloch[0], -bloch[1]);
    m[s](1, 0) = 0.5 * sg * cplx(bloch[0], bloch[1]);
  }
  return m;
}

MeasurementAssignment assignment_from_bloch(
    const std::vector<std::vector<std::array<double, 3>>>& dirs) {
  Scenario s;
  s.n_parties = dirs.size();
  std::vector<std::vector<std::vector<ComplexMatrix>>> ops(dirs.size());
  for (std::size_t p = 0; p < dirs.size(); ++p) {
    s.inputs.push_back(dirs[p].size());
    s.outputs.push_back(2);
    for (const auto& d : dirs[p]) {
      auto pair = projective_qubit(d);
      ops[p].push_back({std::move(pair[0]), std::move(pair[1])});
    }
  }
  return MeasurementAssignment(std::move(s), std::move(ops));
}

Behavior::Behavior(Scenario scenario, std::vector<double> table, const Tolerances& tol)
    : scenario_(std::move(scenario)), table_(std::move(table)) {
  validate_scenario(scenario_);
  const std::size_t jx = scenario_.joint_inputs();
  const std::size_t ja = scenario_.joint_outputs();
  if (table_.size() != jx * ja) throw ArgumentError("Behavior: table size mismatch");
  for (std::size_t x = 0; x < jx; ++x) {
    double sum = 0.0;
    for (std::size_t a = 0; a < ja; ++a) {
      const double p = table_[x * ja + a];
      if (!std::isfinite(p) || p < tol.behavior_nonneg)
        throw ArgumentError("Behavior: negative or non-finite probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol.behavior_norm)
      throw ArgumentError("Behavior: setting not normalized");
  }
}

Behavior Behavior::uniform(const Scenario& s) {
  validate_scenario(s);
  const std::size_t ja = s.joint_outputs();
  return Behavior(s, std::vector<double>(s.joint_inputs() * ja,
                                         1.0 / static_cast<double>(ja)));
}

Behavior quantum_behavior(const DensityMatrix& rho, const MeasurementAssignment& m,
                          ExecPolicy policy) {
  const Scenario& s = m.scenario();
  if (rho.n_subsystems() != s.n_parties)
    throw ArgumentError("quantum_behavior: party count does not match state");
  for (std::size_t p = 0; p < s.n_parties; ++p)
    if (m.local_dim(p) != rho.dims()[p])
      throw ArgumentError("quantum_behavior: local dimension mismatch");

  const std::size_t jx = s.joint_inputs();
  const std::size_t ja = s.joint_outputs();
  const std::size_t side = rho.side();
  const auto& dims = rho.dims();
  std::vector<double> table(jx * ja, 0.0);

  const long long jxl = static_cast<long long>(jx);
  const bool par = policy == ExecPolicy::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (long long xi = 0; xi < jxl; ++xi) {
    const std::size_t x = static_cast<std::size_t>(xi);
    std::vector<std::size_t> xdig(s.n_parties), adig(s.n_parties);
    std::vector<std::size_t> rdig(s.n_parties), cdig(s.n_parties);
    digits_of(x, s.inputs, xdig);
    for (std::size_t a = 0; a < ja; ++a) {
      digits_of(a, s.outputs, adig);
      // tr[rho (tensor M)] = sum_{r,c} rho(r,c) prod_i M_i(c_i, r_i)
      cplx acc = 0.0;
      for (std::size_t r = 0; r < side; ++r) {
        digits_of(r, dims, rdig);
        for (std::size_t c = 0; c < side; ++c) {
          const cplx rv = rho.matrix()(r, c);
          if (rv == cplx(0.0, 0.0)) continue;
          digits_of(c, dims, cdig);
          cplx prod = rv;
          for (std::size_t p = 0; p < s.n_parties && prod != cplx(0.0, 0.0); ++p)
            prod *= m.op(p, xdig[p], adig[p])(cdig[p], rdig[p]);
          acc += prod;
        }
      }
      table[x * ja + a] = acc.real();
    }
  }
  return Behavior(s, std::move(table));
}

std::vector<std::vector<std::array<double, 3>>> random_bloch_directions(std::size_t parties,
                                                                        std::size_t settings,
                                                                        std::uint64_t seed) {
  std::vector<std::vector<std::array<double, 3>>> dirs(parties);
  for (std::size_t p = 0; p < parties; ++p) {
    RngStream rng(seed, (std::uint64_t{1} << 20) + p);
    for (std::size_t x = 0; x < settings; ++x) dirs[p].push_back(rng.unit_vector());
  }
  return dirs;
}

double correlator(const Behavior& b, std::size_t x_index) {
  const Scenario& s = b.scenario();
  for (std::size_t o : s.outputs)
    if (o != 2) throw ArgumentError("correlator: outcomes must be binary");
  if (x_index >= s.joint_inputs()) throw ArgumentError("correlator: setting out of range");
  const std::size_t ja = s.joint_outputs();
  double e = 0.0;
  for (std::size_t a = 0; a < ja; ++a)
    e += (std::popcount(a) % 2 ? -1.0 : 1.0) * b.prob(x_index, a);
  return e;
}

}  // namespace starlocal
