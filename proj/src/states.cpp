#include "starlocal/states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "starlocal/errors.hpp"
#include "starlocal/indexing.hpp"

namespace starlocal {

void validate_family(const FamilyParams& p) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.theta))
    throw ArgumentError("FamilyParams: non-finite parameter");
  if (p.alpha < 0.0 || p.alpha > 1.0)
    throw ArgumentError("FamilyParams: alpha outside [0, 1]");
  // Small slack so pi/4 given to a few decimals still counts as in-domain.
  if (p.theta < 0.0 || p.theta > M_PI / 4.0 + 1e-3)
    throw ArgumentError("FamilyParams: theta outside [0, pi/4]");
}

DensityMatrix rho_family(const FamilyParams& p) {
  validate_family(p);
  const double a = p.alpha;
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  ComplexMatrix m(4, 4);
  m(0, 0) = 0.5 * (1.0 + a) * c * c;
  m(1, 1) = 0.5 * (1.0 - a) * c * c;
  m(2, 2) = 0.5 * (1.0 - a) * s * s;
  m(3, 3) = 0.5 * (1.0 + a) * s * s;
  m(0, 3) = a * c * s;
  m(3, 0) = a * c * s;
  return DensityMatrix(std::move(m), {2, 2});
}

bool is_entangled_family(const FamilyParams& p) {
  validate_family(p);
  return p.theta > 0.0 && p.alpha > 1.0 / 3.0;
}

double unsteerability_bound(double alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0)
    throw ArgumentError("unsteerability_bound: alpha outside [0, 1]");
  if (alpha == 0.0) return -std::numeric_limits<double>::infinity();
  return (2.0 * alpha - 1.0) / ((2.0 - alpha) * alpha * alpha * alpha);
}

bool is_unsteerable_family(const FamilyParams& p) {
  validate_family(p);
  if (p.alpha == 0.0) return true;
  const double c2 = std::cos(2.0 * p.theta);
  return c2 * c2 >= unsteerability_bound(p.alpha) - tolerances().unsteerable_slack;
}

double saturating_theta(double alpha) {
  const double b = unsteerability_bound(alpha);
  if (!(b >= 0.0 && b <= 1.0))
    throw ArgumentError("saturating_theta: no theta saturates the condition at this alpha");
  // cos^2(2t) is monotone in c = cos(2t) on [0, 1]; bisect c^2 - b.
  const Tolerances& tol = tolerances();
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < tol.bisect_max_iter && hi - lo > tol.bisect_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid * mid - b >= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  const double c = 0.5 * (lo + hi);
  return 0.5 * std::acos(std::min(1.0, std::max(0.0, c)));
}

Ket ghz_ket(std::size_t n) {
  if (n < 2) throw ArgumentError("ghz_ket: need at least 2 qubits");
  const std::size_t dim = radix_product(std::vector<std::size_t>(n, 2));
  std::vector<cplx> amp(dim, cplx(0.0, 0.0));
  amp[0] = amp[dim - 1] = 1.0 / std::sqrt(2.0);
  return Ket(std::move(amp));
}

std::vector<ComplexMatrix> ghz_projector_map(std::size_t n) {
  if (n < 2) throw ArgumentError("ghz_projector_map: need at least 2 qubits");
  const std::size_t dim = radix_product(std::vector<std::size_t>(n, 2));
  ComplexMatrix f(1, dim);
  f(0, 0) = 1.0;
  f(0, dim - 1) = 1.0;
  return {std::move(f)};
}

NetworkSpec NetworkSpec::uniform(std::size_t n, const DensityMatrix& arm,
                                 std::vector<ComplexMatrix> center_map, bool keep_center) {
  NetworkSpec s;
  s.n_parties = n;
  s.arm_states.assign(n, arm);
  s.center_map = std::move(center_map);
  s.keep_center = keep_center;
  return s;
}

void validate_network(const NetworkSpec& spec) {
  if (spec.n_parties < 2) throw ArgumentError("NetworkSpec: need at least 2 parties");
  if (spec.arm_states.size() != spec.n_parties)
    throw ArgumentError("NetworkSpec: arm count does not match party count");
  std::size_t d_b = 1;
  for (const auto& arm : spec.arm_states) {
    if (arm.n_subsystems() != 2)
      throw ArgumentError("NetworkSpec: every arm must be bipartite");
    if (d_b > tolerances().max_matrix_side / arm.dims()[1])
      throw SizeError("NetworkSpec: center dimension exceeds cap");
    d_b *= arm.dims()[1];
  }
  if (spec.center_map.empty()) throw ArgumentError("NetworkSpec: empty center map");
  const std::size_t d_out = spec.center_map.front().rows();
  for (const auto& k : spec.center_map) {
    if (k.cols() != d_b)
      throw ArgumentError("NetworkSpec: center map input dim must match joint center dim");
    if (k.rows() != d_out) throw ArgumentError("NetworkSpec: center map shapes differ");
    if (!k.all_finite()) throw ArgumentError("NetworkSpec: non-finite center map entry");
  }
  if (d_out == 0) throw ArgumentError("NetworkSpec: zero-dimensional center output");
}

namespace {

struct SparseEntry {
  std::size_t out;                  // output row of the Kraus operator
  std::vector<std::size_t> digits;  // per-arm center digit of the column
  cplx value;
};

// Sum over all Kraus operators of (number of nonzeros)^2 — the per-cell
// work of the block-product route.
std::size_t block_route_cost(const NetworkSpec& spec) {
  std::size_t cost = 0;
  for (const auto& k : spec.center_map) {
    std::size_t nnz = 0;
    for (const cplx& v : k.data())
      if (v != cplx(0.0, 0.0)) ++nnz;
    cost += nnz * nnz;
  }
  return cost;
}

StarState star_network_state_blocks(const NetworkSpec& spec, ExecPolicy policy) {
  const std::size_t n = spec.n_parties;
  std::vector<std::size_t> a_dims(n), b_dims(n);
  for (std::size_t i = 0; i < n; ++i) {
    a_dims[i] = spec.arm_states[i].dims()[0];
    b_dims[i] = spec.arm_states[i].dims()[1];
  }
  const std::size_t side_a = radix_product(a_dims);
  const std::size_t d_out = spec.center_map.front().rows();
  const bool keep = spec.keep_center && d_out >= 2;
  const std::size_t side = keep ? side_a * d_out : side_a;
  if (side > tolerances().max_matrix_side)
    throw SizeError("star_network_state: output exceeds size cap");

  // Flatten each Kraus operator into its nonzero entries, with the
  // center column pre-split into per-arm digits.
  std::vector<std::vector<SparseEntry>> sparse(spec.center_map.size());
  std::vector<std::size_t> digits(n);
  for (std::size_t k = 0; k < spec.center_map.size(); ++k) {
    const ComplexMatrix& op = spec.center_map[k];
    for (std::size_t o = 0; o < op.rows(); ++o)
      for (std::size_t c = 0; c < op.cols(); ++c) {
        if (op(o, c) == cplx(0.0, 0.0)) continue;
        digits_of(c, b_dims, digits);
        sparse[k].push_back(SparseEntry{o, digits, op(o, c)});
      }
  }

  ComplexMatrix out(side, side);
  const long long rows = static_cast<long long>(side);
  const bool par = policy == ExecPolicy::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (long long row = 0; row < rows; ++row) {
    std::vector<std::size_t> ra(n), ca(n);
    const std::size_t ro = keep ? static_cast<std::size_t>(row) % d_out : 0;
    digits_of(keep ? static_cast<std::size_t>(row) / d_out : static_cast<std::size_t>(row),
              a_dims, ra);
    for (std::size_t col = 0; col < side; ++col) {
      const std::size_t co = keep ? col % d_out : 0;
      digits_of(keep ? col / d_out : col, a_dims, ca);
      cplx acc = 0.0;
      for (const auto& entries : sparse) {
        for (const auto& er : entries) {
          if (keep && er.out != ro) continue;
          for (const auto& ec : entries) {
            if (keep && ec.out != co) continue;
            if (!keep && er.out != ec.out) continue;  // center traced out
            cplx prod = er.value * std::conj(ec.value);
            for (std::size_t i = 0; i < n && prod != cplx(0.0, 0.0); ++i) {
              const ComplexMatrix& arm = spec.arm_states[i].matrix();
              prod *= arm(ra[i] * b_dims[i] + er.digits[i], ca[i] * b_dims[i] + ec.digits[i]);
            }
            acc += prod;
          }
        }
      }
      out(static_cast<std::size_t>(row), col) = acc;
    }
  }

  double norm = 0.0;
  for (std::size_t i = 0; i < side; ++i) norm += out(i, i).real();
  if (norm < tolerances().map_weight_floor)
    throw DegenerateError("star_network_state: center map annihilated the state");
  out *= cplx(1.0 / norm, 0.0);

  std::vector<std::size_t> dims = a_dims;
  if (keep) dims.push_back(d_out);
  return StarState{DensityMatrix(std::move(out), std::move(dims)), norm};
}

}  // namespace

StarState star_network_state(const NetworkSpec& spec, ExecPolicy policy) {
  validate_network(spec);
  // The block-product route is exact whenever the center map is sparse
  // enough to enumerate entry pairs; otherwise fall back to the dense
  // tensor-product route.
  if (block_route_cost(spec) <= 4096) return star_network_state_blocks(spec, policy);
  return star_network_state_dense(spec);
}

StarState star_network_state_dense(const NetworkSpec& spec) {
  validate_network(spec);
  const std::size_t n = spec.n_parties;
  ComplexMatrix full = spec.arm_states[0].matrix();
  std::vector<std::size_t> dims = spec.arm_states[0].dims();
  for (std::size_t i = 1; i < n; ++i) {
    if (full.rows() > tolerances().max_matrix_side / spec.arm_states[i].side())
      throw SizeError("star_network_state_dense: tensor product exceeds size cap");
    full = kron(full, spec.arm_states[i].matrix());
    dims.push_back(spec.arm_states[i].dims()[0]);
    dims.push_back(spec.arm_states[i].dims()[1]);
  }
  // Subsystem order is A1,B1,A2,B2,...; the center block is the odd
  // positions, and apply_kraus leaves the As first, center output last.
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < n; ++i) targets.push_back(2 * i + 1);
  KrausResult r = apply_kraus(DensityMatrix::unchecked(std::move(full), std::move(dims)),
                              spec.center_map, targets);

  const std::size_t d_out = spec.center_map.front().rows();
  std::vector<std::size_t> out_dims = r.dims;
  ComplexMatrix out = std::move(r.unnormalized);
  if (!spec.keep_center && d_out >= 2) {
    DensityMatrix tmp = DensityMatrix::unchecked(out * cplx(1.0 / r.weight, 0.0), out_dims);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i + 1 < out_dims.size(); ++i) keep.push_back(i);
    DensityMatrix traced = partial_trace(tmp, keep);
    return StarState{DensityMatrix(traced.matrix(), traced.dims()), r.weight};
  }
  out *= cplx(1.0 / r.weight, 0.0);
  return StarState{DensityMatrix(std::move(out), std::move(out_dims)), r.weight};
}

XMatrixState::XMatrixState(std::size_t n_qubits, std::vector<double> diagonal, cplx corner)
    : n_(n_qubits), diag_(std::move(diagonal)), corner_(corner) {
  if (n_ < 2) throw ArgumentError("XMatrixState: need at least 2 qubits");
  const std::size_t dim = radix_product(std::vector<std::size_t>(n_, 2));
  if (diag_.size() != dim) throw ArgumentError("XMatrixState: diagonal length != 2^n");
  double sum = 0.0;
  for (double d : diag_) {
    if (!std::isfinite(d) || d < -1e-12) throw ArgumentError("XMatrixState: negative diagonal");
    sum += d;
  }
  if (std::abs(sum - 1.0) > tolerances().unit_trace)
    throw ArgumentError("XMatrixState: diagonal does not sum to 1");
  if (std::norm(corner_) > diag_.front() * diag_.back() + 1e-10)
    throw ArgumentError("XMatrixState: corner violates positivity");
}

DensityMatrix XMatrixState::to_density() const {
  const std::size_t dim = diag_.size();
  ComplexMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = diag_[i];
  m(0, dim - 1) = corner_;
  m(dim - 1, 0) = std::conj(corner_);
  return DensityMatrix(std::move(m), std::vector<std::size_t>(n_, 2));
}

double gamma_weight(std::size_t n, std::size_t m, const FamilyParams& p) {
  if (m > n) throw ArgumentError("gamma_weight: m > n");
  const double c2 = std::cos(p.theta) * std::cos(p.theta);
  const double s2 = std::sin(p.theta) * std::sin(p.theta);
  const double hi = 0.5 * (1.0 + p.alpha), lo = 0.5 * (1.0 - p.alpha);
  const double nm = static_cast<double>(n - m), mm = static_cast<double>(m);
  return std::pow(c2, nm) * std::pow(s2, mm) *
         (std::pow(hi, nm) * std::pow(lo, mm) + std::pow(hi, mm) * std::pow(lo, nm));
}

double x_matrix_normalization(std::size_t n, const FamilyParams& p) {
  const double ac2 = p.alpha * std::cos(2.0 * p.theta);
  const double nn = static_cast<double>(n);
  return std::pow(0.5 * (1.0 + ac2), nn) + std::pow(0.5 * (1.0 - ac2), nn);
}

XMatrixState x_matrix_state(std::size_t n, const FamilyParams& p) {
  if (n < 2) throw ArgumentError("x_matrix_state: need at least 2 qubits");
  validate_family(p);
  const std::size_t dim = radix_product(std::vector<std::size_t>(n, 2));
  const double trace = x_matrix_normalization(n, p);
  std::vector<double> diag(dim);
  for (std::size_t idx = 0; idx < dim; ++idx)
    diag[idx] = gamma_weight(n, static_cast<std::size_t>(std::popcount(idx)), p) / trace;
  const double corner =
      std::pow(p.alpha * std::cos(p.theta) * std::sin(p.theta), static_cast<double>(n)) / trace;
  return XMatrixState(n, std::move(diag), cplx(corner, 0.0));
}

DensityMatrix rho_gme_qutrit(std::size_t n, const FamilyParams& p) {
  if (n < 2) throw ArgumentError("rho_gme_qutrit: need at least 2 parties");
  validate_family(p);
  const std::vector<std::size_t> qutrit_dims(n, 3);
  const std::size_t side = radix_product(qutrit_dims);
  if (side > tolerances().max_matrix_side)
    throw SizeError("rho_gme_qutrit: dimension exceeds cap");

  const DensityMatrix full = x_matrix_state(n, p).to_density();
  // Marginals on the first j parties; the state is permutation symmetric,
  // so these serve for every size-j subset.
  std::vector<ComplexMatrix> marginal(n);
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<std::size_t> keep(j);
    for (std::size_t i = 0; i < j; ++i) keep[i] = i;
    marginal[j] = partial_trace(full, keep).matrix();
  }

  ComplexMatrix out(side, side);
  const std::size_t qdim = full.side();

  // Embed a 2^j matrix living on the parties in `mask` (other parties
  // pinned to level 2) into the 3^n matrix.
  std::vector<std::size_t> rdig(n), cdig(n);
  auto embed = [&](const ComplexMatrix& m, std::size_t mask) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << (n - 1 - i))) members.push_back(i);
    const std::size_t sub = m.rows();
    for (std::size_t r = 0; r < sub; ++r) {
      for (std::size_t c = 0; c < sub; ++c) {
        const cplx v = m(r, c);
        if (v == cplx(0.0, 0.0)) continue;
        for (std::size_t i = 0; i < n; ++i) rdig[i] = cdig[i] = 2;
        for (std::size_t b = 0; b < members.size(); ++b) {
          rdig[members[b]] = (r >> (members.size() - 1 - b)) & 1u;
          cdig[members[b]] = (c >> (members.size() - 1 - b)) & 1u;
        }
        out(index_of(rdig, qutrit_dims), index_of(cdig, qutrit_dims)) += v;
      }
    }
  };

  embed(full.matrix(), qdim - 1);  // all parties on the qubit levels
  ComplexMatrix one(1, 1);
  one(0, 0) = 1.0;
  embed(one, 0);  // the all-|2> term
  for (std::size_t mask = 1; mask + 1 < qdim; ++mask) {
    const auto j = static_cast<std::size_t>(std::popcount(mask));
    embed(marginal[j], mask);
  }

  out *= cplx(1.0 / static_cast<double>(qdim), 0.0);
  return DensityMatrix(std::move(out), qutrit_dims);
}

FilterResult apply_local_filter(const DensityMatrix& rho, double eps) {
  if (!std::isfinite(eps) || eps <= 0.0 || eps > 1.0)
    throw ArgumentError("apply_local_filter: eps outside (0, 1]");
  const auto& dims = rho.dims();
  const std::size_t n = dims.size();
  const std::size_t side = rho.side();
  auto g = [eps](std::size_t level) { return level == 0 ? eps : (level == 1 ? 1.0 : 0.0); };

  std::vector<double> row_factor(side);
  std::vector<std::size_t> dg(n);
  for (std::size_t r = 0; r < side; ++r) {
    digits_of(r, dims, dg);
    double f = 1.0;
    for (std::size_t i = 0; i < n; ++i) f *= g(dg[i]);
    row_factor[r] = f;
  }

  ComplexMatrix out(side, side);
  double weight = 0.0;
  for (std::size_t r = 0; r < side; ++r) {
    if (row_factor[r] == 0.0) continue;
    for (std::size_t c = 0; c < side; ++c) {
      if (row_factor[c] == 0.0) continue;
      out(r, c) = rho.matrix()(r, c) * (row_factor[r] * row_factor[c]);
    }
    weight += out(r, r).real();
  }
  if (weight < tolerances().map_weight_floor)
    throw DegenerateError("apply_local_filter: filter annihilated the state");
  out *= cplx(1.0 / weight, 0.0);
  return FilterResult{DensityMatrix(std::move(out), dims), weight};
}

XMatrixState analytic_filtered_state(std::size_t n, const FamilyParams& p) {
  if (n < 2) throw ArgumentError("analytic_filtered_state: need at least 2 qubits");
  validate_family(p);
  const double hi = 0.5 * (1.0 + p.alpha), lo = 0.5 * (1.0 - p.alpha);
  const std::size_t dim = radix_product(std::vector<std::size_t>(n, 2));
  std::vector<double> diag(dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const auto m = static_cast<double>(std::popcount(idx));
    const double nm = static_cast<double>(n) - m;
    diag[idx] = 0.5 * (std::pow(hi, nm) * std::pow(lo, m) + std::pow(hi, m) * std::pow(lo, nm));
  }
  const double corner = 0.5 * std::pow(p.alpha, static_cast<double>(n));
  return XMatrixState(n, std::move(diag), cplx(corner, 0.0));
}

double analytic_filtered_fidelity(std::size_t n, double alpha) {
  if (n < 2) throw ArgumentError("analytic_filtered_fidelity: need at least 2 qubits");
  if (alpha < 0.0 || alpha > 1.0)
    throw ArgumentError("analytic_filtered_fidelity: alpha outside [0, 1]");
  const double nn = static_cast<double>(n);
  return 0.5 * (std::pow(alpha, nn) + std::pow(0.5 * (1.0 + alpha), nn) +
                std::pow(0.5 * (1.0 - alpha), nn));
}

ProjectionResult project_qubit_subspace(const DensityMatrix& rho) {
  const auto& dims = rho.dims();
  const std::size_t n = dims.size();
  std::vector<std::size_t> sel;
  std::vector<std::size_t> dg(n);
  for (std::size_t idx = 0; idx < rho.side(); ++idx) {
    digits_of(idx, dims, dg);
    bool ok = true;
    for (std::size_t d : dg) ok = ok && d <= 1;
    if (ok) sel.push_back(idx);
  }
  ComplexMatrix out(sel.size(), sel.size());
  double weight = 0.0;
  for (std::size_t i = 0; i < sel.size(); ++i) {
    for (std::size_t j = 0; j < sel.size(); ++j) out(i, j) = rho.matrix()(sel[i], sel[j]);
    weight += out(i, i).real();
  }
  if (weight < tolerances().map_weight_floor)
    throw DegenerateError("project_qubit_subspace: no support on the qubit subspace");
  out *= cplx(1.0 / weight, 0.0);
  return ProjectionResult{DensityMatrix(std::move(out), std::vector<std::size_t>(n, 2)), weight};
}

}  // namespace starlocal
