#include "starlocal/lhvnet.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "starlocal/errors.hpp"
#include "starlocal/indexing.hpp"
#include "starlocal/states.hpp"

namespace starlocal {

namespace {

// tr(m sigma_k) for k = x, y, z; real for Hermitian m.
std::array<double, 3> pauli_components(const ComplexMatrix& m) {
  return {(m(0, 1) + m(1, 0)).real(),
          ((m(0, 1) - m(1, 0)) * cplx(0.0, 1.0)).real(),
          (m(0, 0) - m(1, 1)).real()};
}

// B-side update Tr_A[(M (x) I) rho] for a bipartite qubit x qubit rho.
ComplexMatrix steered_block(const ComplexMatrix& m_op, const ComplexMatrix& rho) {
  ComplexMatrix t(2, 2);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t bp = 0; bp < 2; ++bp) {
      cplx acc = 0.0;
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t ap = 0; ap < 2; ++ap)
          acc += m_op(a, ap) * rho(ap * 2 + b, a * 2 + bp);
      t(b, bp) = acc;
    }
  return t;
}

class WernerLHS final : public LHSModel {
 public:
  WernerLHS() : arm_(rho_family(FamilyParams{0.5, M_PI / 4.0})) {}

  Lambda sample(RngStream& rng) const override {
    Lambda l;
    l.bloch = rng.unit_vector();
    return l;
  }

  ComplexMatrix hidden_state(const Lambda& l) const override {
    ComplexMatrix s(2, 2);
    s(0, 0) = 0.5 * (1.0 + l.bloch[2]);
    s(1, 1) = 0.5 * (1.0 - l.bloch[2]);
    s(0, 1) = 0.5 * cplx(l.bloch[0], -l.bloch[1]);
    s(1, 0) = 0.5 * cplx(l.bloch[0], l.bloch[1]);
    return s;
  }

  std::vector<double> response(const Lambda& l,
                               const std::vector<ComplexMatrix>& input_ops) const override {
    const std::array<double, 3> n = measurement_direction(input_ops);
    // The reflection n_y -> -n_y is what makes the defining identity
    // hold for this state (construction-time validation enforces it).
    const double dot = n[0] * l.bloch[0] - n[1] * l.bloch[1] + n[2] * l.bloch[2];
    return dot >= 0.0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
  }

  const DensityMatrix& arm_state() const override { return arm_; }

  // Bloch direction of a projective qubit pair {M_0, M_1}.
  static std::array<double, 3> measurement_direction(const std::vector<ComplexMatrix>& ops) {
    if (ops.size() != 2 || ops[0].rows() != 2 || ops[0].cols() != 2)
      throw ArgumentError("built-in response: expects a two-outcome qubit measurement");
    const std::array<double, 3> n = pauli_components(ops[0]);
    const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (std::abs(norm - 1.0) > 1e-6)
      throw ArgumentError("built-in response: measurement is not projective");
    return {n[0] / norm, n[1] / norm, n[2] / norm};
  }

 private:
  DensityMatrix arm_;
};

// Monte-Carlo check of the defining identity for a handful of
// measurement directions.  A wrong response convention sits hundreds of
// standard errors off target, so the gate is 6 SEs per matrix entry:
// wide enough that a correct model never trips it by chance (96 entry
// checks x ~1e-9 each), tight enough to catch any real sign error.
void validate_werner(const WernerLHS& model, std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) throw ArgumentError("builtin_werner_lhs: validation needs >= 1000 samples");
  const std::vector<std::array<double, 3>> dirs = {
      {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0},  {0.0, 1.0, 0.0},
      {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)},
      {0.36, 0.48, 0.8}, {-0.6, 0.0, 0.8}};
  const std::size_t n_chunks = 64;
  const std::size_t n_slots = dirs.size() * 2;  // (direction, outcome)

  std::vector<std::vector<ComplexMatrix>> ops;
  ops.reserve(dirs.size());
  for (const auto& d : dirs) {
    auto pair = projective_qubit(d);
    ops.push_back({pair[0], pair[1]});
  }

  // acc[chunk][slot] accumulates p(a|lambda) sigma_lambda.
  std::vector<std::vector<ComplexMatrix>> acc(
      n_chunks, std::vector<ComplexMatrix>(n_slots, ComplexMatrix(2, 2)));
  std::vector<std::size_t> chunk_size(n_chunks, samples / n_chunks);
  for (std::size_t k = 0; k < samples % n_chunks; ++k) ++chunk_size[k];

  for (std::size_t k = 0; k < n_chunks; ++k) {
    RngStream rng(seed, k);
    for (std::size_t s = 0; s < chunk_size[k]; ++s) {
      const Lambda l = model.sample(rng);
      const ComplexMatrix sig = model.hidden_state(l);
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const std::vector<double> p = model.response(l, ops[d]);
        const std::size_t outcome = p[0] >= 0.5 ? 0 : 1;
        acc[k][d * 2 + outcome] += sig;
      }
    }
  }

  for (std::size_t d = 0; d < dirs.size(); ++d) {
    for (std::size_t a = 0; a < 2; ++a) {
      const ComplexMatrix target = steered_block(ops[d][a], model.arm_state().matrix());
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
          // Mean and chunk-scatter SE of this matrix entry.
          cplx mean = 0.0;
          for (std::size_t k = 0; k < n_chunks; ++k) mean += acc[k][d * 2 + a](i, j);
          mean /= static_cast<double>(samples);
          double var_re = 0.0, var_im = 0.0;
          for (std::size_t k = 0; k < n_chunks; ++k) {
            const cplx ck = acc[k][d * 2 + a](i, j) / static_cast<double>(chunk_size[k]);
            var_re += (ck.real() - mean.real()) * (ck.real() - mean.real());
            var_im += (ck.imag() - mean.imag()) * (ck.imag() - mean.imag());
          }
          const double denom = static_cast<double>(n_chunks) * (n_chunks - 1.0);
          const double se_re = std::sqrt(var_re / denom);
          const double se_im = std::sqrt(var_im / denom);
          if (std::abs(mean.real() - target(i, j).real()) > 6.0 * se_re + 1e-9 ||
              std::abs(mean.imag() - target(i, j).imag()) > 6.0 * se_im + 1e-9)
            throw SolverError("builtin_werner_lhs: defining identity failed validation");
        }
    }
  }
}

class DiscreteLHS final : public LHSModel {
 public:
  DiscreteLHS(DensityMatrix arm, std::vector<double> q, std::vector<ComplexMatrix> sigmas,
              std::vector<std::vector<std::vector<double>>> tables,
              std::vector<std::vector<ComplexMatrix>> declared)
      : arm_(std::move(arm)), q_(std::move(q)), sigmas_(std::move(sigmas)),
        tables_(std::move(tables)), declared_(std::move(declared)) {
    const std::size_t n = q_.size();
    if (n == 0 || sigmas_.size() != n || tables_.size() != n)
      throw ArgumentError("discrete_lhs_model: inconsistent component counts");
    if (arm_.n_subsystems() != 2 || arm_.dims()[1] != 2)
      throw ArgumentError("discrete_lhs_model: arm state must be bipartite with a qubit B side");
    double qs = 0.0;
    for (double v : q_) {
      if (!(v >= 0.0)) throw ArgumentError("discrete_lhs_model: negative weight");
      qs += v;
    }
    if (std::abs(qs - 1.0) > 1e-10)
      throw ArgumentError("discrete_lhs_model: weights do not sum to 1");
    for (const auto& s : sigmas_) {
      if (s.rows() != 2 || s.cols() != 2 || s.hermiticity_defect() > 1e-9 ||
          std::abs(s.trace() - cplx(1.0, 0.0)) > 1e-9)
        throw ArgumentError("discrete_lhs_model: invalid hidden state");
      if (hermitian_eigen_min(s) < -1e-9)
        throw ArgumentError("discrete_lhs_model: hidden state not positive");
    }
    for (const auto& t : tables_) {
      if (t.size() != declared_.size())
        throw ArgumentError("discrete_lhs_model: response table input count mismatch");
      for (std::size_t x = 0; x < t.size(); ++x) {
        if (t[x].size() != declared_[x].size())
          throw ArgumentError("discrete_lhs_model: response table outcome count mismatch");
        double ps = 0.0;
        for (double v : t[x]) {
          if (!(v >= 0.0)) throw ArgumentError("discrete_lhs_model: negative response");
          ps += v;
        }
        if (std::abs(ps - 1.0) > 1e-12)
          throw ArgumentError("discrete_lhs_model: response not normalized");
      }
    }
    // The defining identity is an exact finite sum here.
    const std::size_t d_a = arm_.dims()[0];
    for (std::size_t x = 0; x < declared_.size(); ++x) {
      for (std::size_t a = 0; a < declared_[x].size(); ++a) {
        if (declared_[x][a].rows() != d_a || declared_[x][a].cols() != d_a)
          throw ArgumentError("discrete_lhs_model: declared operator dimension mismatch");
        ComplexMatrix lhs = steered_block_general(declared_[x][a]);
        ComplexMatrix rhs(2, 2);
        for (std::size_t k = 0; k < n; ++k) rhs += sigmas_[k] * cplx(q_[k] * tables_[k][x][a], 0.0);
        if (lhs.max_abs_diff(rhs) > 1e-8)
          throw ArgumentError("discrete_lhs_model: defining identity fails for a declared input");
      }
    }
    cum_.resize(n);
    double run = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      run += q_[k];
      cum_[k] = run;
    }
    cum_.back() = 1.0;
  }

  Lambda sample(RngStream& rng) const override {
    const double u = rng.next_double();
    Lambda l;
    l.index = std::lower_bound(cum_.begin(), cum_.end(), u) - cum_.begin();
    if (l.index >= q_.size()) l.index = q_.size() - 1;
    return l;
  }

  ComplexMatrix hidden_state(const Lambda& l) const override { return sigmas_[l.index]; }

  std::vector<double> response(const Lambda& l,
                               const std::vector<ComplexMatrix>& input_ops) const override {
    for (std::size_t x = 0; x < declared_.size(); ++x) {
      if (declared_[x].size() != input_ops.size()) continue;
      bool match = true;
      for (std::size_t a = 0; a < input_ops.size() && match; ++a)
        match = declared_[x][a].rows() == input_ops[a].rows() &&
                declared_[x][a].cols() == input_ops[a].cols() &&
                declared_[x][a].max_abs_diff(input_ops[a]) <= 1e-9;
      if (match) return tables_[l.index][x];
    }
    throw ArgumentError("discrete_lhs_model: measurement not among the declared inputs");
  }

  const DensityMatrix& arm_state() const override { return arm_; }

 private:
  ComplexMatrix steered_block_general(const ComplexMatrix& m_op) const {
    const std::size_t d_a = arm_.dims()[0];
    ComplexMatrix t(2, 2);
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t bp = 0; bp < 2; ++bp) {
        cplx acc = 0.0;
        for (std::size_t a = 0; a < d_a; ++a)
          for (std::size_t ap = 0; ap < d_a; ++ap)
            acc += m_op(a, ap) * arm_.matrix()(ap * 2 + b, a * 2 + bp);
        t(b, bp) = acc;
      }
    return t;
  }

  DensityMatrix arm_;
  std::vector<double> q_;
  std::vector<ComplexMatrix> sigmas_;
  std::vector<std::vector<std::vector<double>>> tables_;
  std::vector<std::vector<ComplexMatrix>> declared_;
  std::vector<double> cum_;
};

}  // namespace

std::shared_ptr<const LHSModel> builtin_werner_lhs(std::size_t validation_samples,
                                                   std::uint64_t validation_seed) {
  auto model = std::make_shared<WernerLHS>();
  validate_werner(*model, validation_samples, validation_seed);
  return model;
}

std::shared_ptr<const LHSModel> discrete_lhs_model(
    DensityMatrix arm_state, std::vector<double> q, std::vector<ComplexMatrix> sigmas,
    std::vector<std::vector<std::vector<double>>> response_tables,
    std::vector<std::vector<ComplexMatrix>> declared_inputs) {
  return std::make_shared<DiscreteLHS>(std::move(arm_state), std::move(q), std::move(sigmas),
                                       std::move(response_tables), std::move(declared_inputs));
}

LiftedModel::LiftedModel(std::vector<std::shared_ptr<const LHSModel>> arms,
                         std::vector<ComplexMatrix> center_map, bool keep_center)
    : arms_(std::move(arms)), center_map_(std::move(center_map)), keep_center_(keep_center) {
  if (arms_.size() < 2) throw ArgumentError("LiftedModel: need at least 2 arms");
  for (const auto& a : arms_) {
    if (!a) throw ArgumentError("LiftedModel: null arm model");
    if (a->arm_state().n_subsystems() != 2)
      throw ArgumentError("LiftedModel: arm states must be bipartite");
    b_dims_.push_back(a->arm_state().dims()[1]);
  }
  if (center_map_.empty()) throw ArgumentError("LiftedModel: empty center map");
  const std::size_t d_b = radix_product(b_dims_);
  d_out_ = center_map_.front().rows();
  sparse_.resize(center_map_.size());
  std::vector<std::size_t> digits(b_dims_.size());
  for (std::size_t k = 0; k < center_map_.size(); ++k) {
    const ComplexMatrix& op = center_map_[k];
    if (op.cols() != d_b || op.rows() != d_out_)
      throw ArgumentError("LiftedModel: center map shape mismatch");
    for (std::size_t o = 0; o < op.rows(); ++o)
      for (std::size_t c = 0; c < op.cols(); ++c) {
        if (op(o, c) == cplx(0.0, 0.0)) continue;
        digits_of(c, b_dims_, digits);
        sparse_[k].push_back(CenterEntry{o, digits, op(o, c)});
      }
  }

  // Exact normalization: the weight of the arm marginals themselves.
  std::vector<ComplexMatrix> marginals;
  marginals.reserve(arms_.size());
  for (const auto& a : arms_) marginals.push_back(partial_trace(a->arm_state(), {1}).matrix());
  normalization_ = weight(marginals);
  if (normalization_ < tolerances().map_weight_floor)
    throw DegenerateError("LiftedModel: center map annihilates the arm marginals");
}

double LiftedModel::weight(const std::vector<ComplexMatrix>& sigmas) const {
  cplx acc = 0.0;
  for (const auto& entries : sparse_) {
    for (const auto& e1 : entries) {
      for (const auto& e2 : entries) {
        if (e1.out != e2.out) continue;
        cplx prod = e1.value * std::conj(e2.value);
        for (std::size_t i = 0; i < sigmas.size() && prod != cplx(0.0, 0.0); ++i)
          prod *= sigmas[i](e1.digits[i], e2.digits[i]);
        acc += prod;
      }
    }
  }
  return std::max(0.0, acc.real());
}

ComplexMatrix LiftedModel::center_state(const std::vector<ComplexMatrix>& sigmas,
                                        double w) const {
  ComplexMatrix out(d_out_, d_out_);
  for (const auto& entries : sparse_) {
    for (const auto& e1 : entries) {
      for (const auto& e2 : entries) {
        cplx prod = e1.value * std::conj(e2.value);
        for (std::size_t i = 0; i < sigmas.size() && prod != cplx(0.0, 0.0); ++i)
          prod *= sigmas[i](e1.digits[i], e2.digits[i]);
        out(e1.out, e2.out) += prod;
      }
    }
  }
  out *= cplx(1.0 / w, 0.0);
  return out;
}

SimulationResult simulate_behavior(const LiftedModel& model, const MeasurementAssignment& m,
                                   std::size_t samples, std::uint64_t seed, std::size_t chunks,
                                   ExecPolicy policy) {
  const Scenario& s = m.scenario();
  const std::size_t n_arms = model.n_arms();
  const bool center_party = model.keep_center() && model.center_out_dim() >= 2;
  const std::size_t n_parties = n_arms + (center_party ? 1 : 0);
  if (s.n_parties != n_parties)
    throw ArgumentError("simulate_behavior: scenario party count mismatch");
  if (center_party && m.local_dim(n_arms) != model.center_out_dim())
    throw ArgumentError("simulate_behavior: center dimension mismatch");
  if (samples == 0) throw ArgumentError("simulate_behavior: no samples");
  chunks = std::max<std::size_t>(1, std::min(chunks, samples));

  const std::size_t jx = s.joint_inputs();
  const std::size_t ja = s.joint_outputs();
  const std::size_t cells = jx * ja;

  // Per-(party, input) operator lists, handed to responses verbatim.
  std::vector<std::vector<std::vector<ComplexMatrix>>> ops(n_parties);
  for (std::size_t p = 0; p < n_parties; ++p) {
    ops[p].resize(s.inputs[p]);
    for (std::size_t x = 0; x < s.inputs[p]; ++x)
      for (std::size_t a = 0; a < s.outputs[p]; ++a) ops[p][x].push_back(m.op(p, x, a));
  }

  // Joint-input digit table, reused by every sample.
  std::vector<std::vector<std::size_t>> xdig(jx, std::vector<std::size_t>(n_parties));
  for (std::size_t x = 0; x < jx; ++x) digits_of(x, s.inputs, xdig[x]);

  std::size_t max_inputs = 1;
  for (std::size_t p = 0; p < n_parties; ++p) max_inputs = std::max(max_inputs, s.inputs[p]);

  std::vector<std::size_t> chunk_size(chunks, samples / chunks);
  for (std::size_t k = 0; k < samples % chunks; ++k) ++chunk_size[k];

  std::vector<std::vector<double>> chunk_cells(chunks, std::vector<double>(cells, 0.0));
  std::vector<double> chunk_wsum(chunks, 0.0), chunk_wsq(chunks, 0.0);

  const long long n_chunks_ll = static_cast<long long>(chunks);
  const bool par = policy == ExecPolicy::parallel;
  // Exceptions cannot cross the parallel region; capture the first one
  // and rethrow after the loop.
  std::exception_ptr chunk_error;
#pragma omp parallel for schedule(dynamic) if (par)
  for (long long kl = 0; kl < n_chunks_ll; ++kl) {
    try {
    const std::size_t k = static_cast<std::size_t>(kl);
    RngStream rng(seed, k);
    std::vector<Lambda> lambdas(n_arms);
    std::vector<ComplexMatrix> sigmas(n_arms);
    std::vector<std::vector<std::vector<double>>> resp(n_arms);
    std::vector<std::size_t> det(n_arms * max_inputs);  // det outcome per (arm, input)
    std::vector<double>& cell = chunk_cells[k];

    for (std::size_t smp = 0; smp < chunk_size[k]; ++smp) {
      for (std::size_t i = 0; i < n_arms; ++i) {
        lambdas[i] = model.arm(i).sample(rng);
        sigmas[i] = model.arm(i).hidden_state(lambdas[i]);
      }
      const double w = model.weight(sigmas);
      chunk_wsum[k] += w;
      chunk_wsq[k] += w * w;
      if (w == 0.0) continue;

      bool all_det = true;
      det.assign(det.size(), 0);
      for (std::size_t i = 0; i < n_arms; ++i) {
        resp[i].resize(s.inputs[i]);
        for (std::size_t x = 0; x < s.inputs[i]; ++x) {
          resp[i][x] = model.arm(i).response(lambdas[i], ops[i][x]);
          std::size_t arg = 0;
          for (std::size_t a = 1; a < resp[i][x].size(); ++a)
            if (resp[i][x][a] > resp[i][x][arg]) arg = a;
          if (resp[i][x][arg] >= 1.0 - 1e-9)
            det[i * max_inputs + x] = arg;
          else
            all_det = false;
        }
      }

      std::vector<double> cdist;  // center outcome distributions, flattened per input
      if (center_party) {
        const ComplexMatrix cs = model.center_state(sigmas, w);
        cdist.resize(s.inputs[n_arms] * s.outputs[n_arms]);
        for (std::size_t y = 0; y < s.inputs[n_arms]; ++y)
          for (std::size_t b = 0; b < s.outputs[n_arms]; ++b) {
            cplx tr = 0.0;
            for (std::size_t u = 0; u < cs.rows(); ++u)
              for (std::size_t v = 0; v < cs.rows(); ++v) tr += cs(u, v) * ops[n_arms][y][b](v, u);
            cdist[y * s.outputs[n_arms] + b] = std::max(0.0, tr.real());
          }
      }

      if (all_det && !center_party) {
        for (std::size_t x = 0; x < jx; ++x) {
          std::size_t a_index = 0;
          for (std::size_t i = 0; i < n_arms; ++i)
            a_index = a_index * s.outputs[i] + det[i * max_inputs + xdig[x][i]];
          cell[x * ja + a_index] += w;
        }
      } else if (all_det && center_party) {
        for (std::size_t x = 0; x < jx; ++x) {
          std::size_t base = 0;
          for (std::size_t i = 0; i < n_arms; ++i)
            base = base * s.outputs[i] + det[i * max_inputs + xdig[x][i]];
          const std::size_t y = xdig[x][n_arms];
          for (std::size_t b = 0; b < s.outputs[n_arms]; ++b)
            cell[x * ja + base * s.outputs[n_arms] + b] += w * cdist[y * s.outputs[n_arms] + b];
        }
      } else {
        // Fully general: product of per-party distributions.
        std::vector<std::size_t> adig(n_parties);
        for (std::size_t x = 0; x < jx; ++x) {
          for (std::size_t a = 0; a < ja; ++a) {
            digits_of(a, s.outputs, adig);
            double p = w;
            for (std::size_t i = 0; i < n_arms && p != 0.0; ++i)
              p *= resp[i][xdig[x][i]][adig[i]];
            if (center_party && p != 0.0)
              p *= cdist[xdig[x][n_arms] * s.outputs[n_arms] + adig[n_arms]];
            if (p != 0.0) cell[x * ja + a] += p;
          }
        }
      }
    }
    } catch (...) {
#pragma omp critical
      if (!chunk_error) chunk_error = std::current_exception();
    }
  }
  if (chunk_error) std::rethrow_exception(chunk_error);

  // Deterministic merge in chunk order.
  std::vector<double> total(cells, 0.0);
  double wsum = 0.0, wsq = 0.0;
  for (std::size_t k = 0; k < chunks; ++k) {
    for (std::size_t c = 0; c < cells; ++c) total[c] += chunk_cells[k][c];
    wsum += chunk_wsum[k];
    wsq += chunk_wsq[k];
  }
  if (wsum < tolerances().map_weight_floor)
    throw DegenerateError("simulate_behavior: all sampled weights vanished");

  std::vector<double> table(cells);
  for (std::size_t c = 0; c < cells; ++c) table[c] = total[c] / wsum;

  // Delete-one-chunk jackknife per cell.
  std::vector<double> se(cells, 0.0);
  if (chunks > 1) {
    std::vector<double> loo(chunks);
    for (std::size_t c = 0; c < cells; ++c) {
      double mean = 0.0;
      for (std::size_t k = 0; k < chunks; ++k) {
        const double dw = wsum - chunk_wsum[k];
        loo[k] = dw > 0.0 ? (total[c] - chunk_cells[k][c]) / dw : 0.0;
        mean += loo[k];
      }
      mean /= static_cast<double>(chunks);
      double var = 0.0;
      for (std::size_t k = 0; k < chunks; ++k) var += (loo[k] - mean) * (loo[k] - mean);
      se[c] = std::sqrt(var * (chunks - 1.0) / static_cast<double>(chunks));
    }
  }

  double w_se = 0.0;
  const double w_mean = wsum / static_cast<double>(samples);
  if (chunks > 1) {
    std::vector<double> loo(chunks);
    double mean = 0.0;
    for (std::size_t k = 0; k < chunks; ++k) {
      loo[k] = (wsum - chunk_wsum[k]) / static_cast<double>(samples - chunk_size[k]);
      mean += loo[k];
    }
    mean /= static_cast<double>(chunks);
    double var = 0.0;
    for (std::size_t k = 0; k < chunks; ++k) var += (loo[k] - mean) * (loo[k] - mean);
    w_se = std::sqrt(var * (chunks - 1.0) / static_cast<double>(chunks));
  }

  SimulationResult r{Behavior(s, std::move(table)), std::move(se),
                     w_mean, w_se, model.normalization(),
                     wsq > 0.0 ? wsum * wsum / wsq : 0.0,
                     false, samples, chunks, seed};
  r.precision_warning = r.ess < tolerances().min_effective_samples;
  return r;
}

namespace {

// z with P(Z > z) = tail for a standard normal, by bisection on erfc.
double normal_upper_quantile(double tail) {
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::sqrt(2.0)) > tail ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

BehaviorComparison compare_behaviors(const SimulationResult& sim, const Behavior& reference) {
  if (!(sim.behavior.scenario() == reference.scenario()))
    throw ArgumentError("compare_behaviors: scenario mismatch");
  const Scenario& s = reference.scenario();
  const std::size_t jx = s.joint_inputs();
  const std::size_t ja = s.joint_outputs();
  const double atol = 1e-9;  // absolute floor for zero-variance cells

  BehaviorComparison cmp;
  // The per-cell gate applies the two-sided 3-sigma tail mass to the
  // whole table at once (Bonferroni): with K cells the threshold is
  // z_K = Phi^-1(1 - 0.0027 / (2K)), which is exactly 3 for K = 1.  A
  // cell-by-cell 3 SE cut cannot work here -- with thousands of cells a
  // correct simulation still produces ~0.27% of them beyond 3 SE, and
  // that count is reported instead.
  const std::size_t cells = jx * ja;
  cmp.cell_threshold_sigma = normal_upper_quantile(0.0027 / (2.0 * static_cast<double>(cells)));
  cmp.per_cell_ok = true;
  double l1 = 0.0, l1_budget = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    const double dev = std::abs(sim.behavior.table()[c] - reference.table()[c]);
    const double se = sim.stderr_table[c];
    cmp.max_cell_deviation = std::max(cmp.max_cell_deviation, dev);
    if (se > 0.0) cmp.max_cell_sigma = std::max(cmp.max_cell_sigma, dev / se);
    if (dev > 3.0 * se + atol) ++cmp.cells_beyond_3se;
    if (dev > cmp.cell_threshold_sigma * se + atol) cmp.per_cell_ok = false;
    l1 += dev;
    l1_budget += se;
  }
  cmp.tv_distance = 0.5 * l1 / static_cast<double>(jx);
  cmp.tv_budget = 0.5 * l1_budget / static_cast<double>(jx);
  cmp.tv_ok = cmp.tv_distance <= 3.0 * cmp.tv_budget + atol;

  const double wdev = std::abs(sim.weight_mean - sim.normalization);
  cmp.weight_sigma = sim.weight_se > 0.0 ? wdev / sim.weight_se : (wdev > atol ? 1e300 : 0.0);
  cmp.weight_ok = wdev <= 3.0 * sim.weight_se + atol;

  cmp.all_ok = cmp.per_cell_ok && cmp.tv_ok && cmp.weight_ok;
  return cmp;
}

}  // namespace starlocal
