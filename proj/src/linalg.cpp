#include "starlocal/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "starlocal/errors.hpp"
#include "starlocal/indexing.hpp"

namespace starlocal {

DensityMatrix::DensityMatrix(ComplexMatrix m, std::vector<std::size_t> dims,
                             const Tolerances& tol) {
  if (m.rows() != m.cols()) throw ArgumentError("DensityMatrix: matrix not square");
  if (dims.empty()) throw ArgumentError("DensityMatrix: no subsystems");
  for (std::size_t d : dims)
    if (d < 2) throw ArgumentError("DensityMatrix: subsystem dimension < 2");
  if (m.rows() > tol.max_matrix_side) throw SizeError("DensityMatrix: side exceeds cap");
  if (radix_product(dims) != m.rows())
    throw ArgumentError("DensityMatrix: dims do not factor the matrix side");
  if (!m.all_finite()) throw ArgumentError("DensityMatrix: non-finite entry");
  if (m.hermiticity_defect() > tol.hermiticity)
    throw ArgumentError("DensityMatrix: not Hermitian within tolerance");
  const cplx tr = m.trace();
  if (std::abs(tr - cplx(1.0, 0.0)) > tol.unit_trace)
    throw ArgumentError("DensityMatrix: trace differs from 1");
  if (hermitian_eigen_min(m, tol) < tol.psd_floor)
    throw ArgumentError("DensityMatrix: negative eigenvalue beyond tolerance");
  mat_ = std::move(m);
  dims_ = std::move(dims);
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix m, std::vector<std::size_t> dims) {
  DensityMatrix r;
  r.mat_ = std::move(m);
  r.dims_ = std::move(dims);
  return r;
}

DensityMatrix DensityMatrix::pure(const Ket& psi, std::vector<std::size_t> dims,
                                  const Tolerances& tol) {
  if (std::abs(psi.norm() - 1.0) > tol.ket_norm)
    throw ArgumentError("DensityMatrix::pure: ket not normalized");
  if (radix_product(dims) != psi.dim())
    throw ArgumentError("DensityMatrix::pure: dims do not factor the ket dimension");
  return unchecked(psi.outer(), std::move(dims));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& keep) {
  const auto& dims = rho.dims();
  const std::size_t n = dims.size();
  if (keep.empty()) throw ArgumentError("partial_trace: empty keep list");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= n) throw ArgumentError("partial_trace: keep index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw ArgumentError("partial_trace: keep indices must be strictly ascending");
  }

  std::vector<bool> kept(n, false);
  for (std::size_t k : keep) kept[k] = true;
  std::vector<std::size_t> keep_dims, trace_dims, traced;
  for (std::size_t i = 0; i < n; ++i)
    (kept[i] ? keep_dims : trace_dims).push_back(dims[i]);
  for (std::size_t i = 0; i < n; ++i)
    if (!kept[i]) traced.push_back(i);

  const std::size_t side_k = radix_product(keep_dims);
  const std::size_t side_t = radix_product(trace_dims);
  ComplexMatrix out(side_k, side_k);

  std::vector<std::size_t> dk(keep.size()), dt(traced.size()), full(n);
  std::vector<std::size_t> dl(keep.size());
  for (std::size_t rk = 0; rk < side_k; ++rk) {
    digits_of(rk, keep_dims, dk);
    for (std::size_t ck = 0; ck < side_k; ++ck) {
      digits_of(ck, keep_dims, dl);
      cplx acc = 0.0;
      for (std::size_t t = 0; t < side_t; ++t) {
        digits_of(t, trace_dims, dt);
        for (std::size_t i = 0; i < keep.size(); ++i) full[keep[i]] = dk[i];
        for (std::size_t i = 0; i < traced.size(); ++i) full[traced[i]] = dt[i];
        const std::size_t r = index_of(full, dims);
        for (std::size_t i = 0; i < keep.size(); ++i) full[keep[i]] = dl[i];
        const std::size_t c = index_of(full, dims);
        acc += rho.matrix()(r, c);
      }
      out(rk, ck) = acc;
    }
  }

  const double dtr = std::abs(out.trace() - rho.matrix().trace());
  if (dtr > tolerances().trace_preserve)
    throw SolverError("partial_trace: trace not preserved");
  return DensityMatrix::unchecked(std::move(out), std::move(keep_dims));
}

KrausResult apply_kraus(const DensityMatrix& rho, const std::vector<ComplexMatrix>& ops,
                        const std::vector<std::size_t>& targets, const Tolerances& tol) {
  const auto& dims = rho.dims();
  const std::size_t n = dims.size();
  if (ops.empty()) throw ArgumentError("apply_kraus: no operators");
  if (targets.empty()) throw ArgumentError("apply_kraus: empty target list");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= n) throw ArgumentError("apply_kraus: target index out of range");
    if (i > 0 && targets[i] <= targets[i - 1])
      throw ArgumentError("apply_kraus: target indices must be strictly ascending");
  }

  std::vector<bool> is_target(n, false);
  for (std::size_t t : targets) is_target[t] = true;
  std::vector<std::size_t> target_dims, rest_dims;
  for (std::size_t i = 0; i < n; ++i)
    (is_target[i] ? target_dims : rest_dims).push_back(dims[i]);
  const std::size_t d_t = radix_product(target_dims);
  const std::size_t d_u = rest_dims.empty() ? 1 : radix_product(rest_dims);

  const std::size_t d_out = ops[0].rows();
  for (const auto& k : ops) {
    if (k.rows() != d_out || k.cols() != d_t)
      throw ArgumentError("apply_kraus: operator shape mismatch");
    if (!k.all_finite()) throw ArgumentError("apply_kraus: non-finite operator entry");
  }
  if (d_out == 0) throw ArgumentError("apply_kraus: zero-dimensional output");
  const std::size_t side_in = rho.side();
  const std::size_t side_out = d_u * d_out;
  if (side_out > tol.max_matrix_side) throw SizeError("apply_kraus: output exceeds size cap");

  // Precompute the (untouched, target) split of every full index.
  std::vector<std::size_t> u_of(side_in), t_of(side_in), dg(n);
  for (std::size_t idx = 0; idx < side_in; ++idx) {
    digits_of(idx, dims, dg);
    std::size_t u = 0, t = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (is_target[i])
        t = t * dims[i] + dg[i];
      else
        u = u * dims[i] + dg[i];
    }
    u_of[idx] = u;
    t_of[idx] = t;
  }

  ComplexMatrix out(side_out, side_out);
  ComplexMatrix tmp(side_out, side_in);
  for (const auto& k : ops) {
    std::fill(tmp.data().begin(), tmp.data().end(), cplx(0.0, 0.0));
    for (std::size_t r = 0; r < side_in; ++r) {
      for (std::size_t o = 0; o < d_out; ++o) {
        const cplx coef = k(o, t_of[r]);
        if (coef == cplx(0.0, 0.0)) continue;
        const std::size_t ro = u_of[r] * d_out + o;
        for (std::size_t c = 0; c < side_in; ++c) tmp(ro, c) += coef * rho.matrix()(r, c);
      }
    }
    for (std::size_t c = 0; c < side_in; ++c) {
      for (std::size_t o = 0; o < d_out; ++o) {
        const cplx coef = std::conj(k(o, t_of[c]));
        if (coef == cplx(0.0, 0.0)) continue;
        const std::size_t co = u_of[c] * d_out + o;
        for (std::size_t ro = 0; ro < side_out; ++ro) out(ro, co) += tmp(ro, c) * coef;
      }
    }
  }

  const double weight = out.trace().real();
  if (weight < tol.map_weight_floor)
    throw DegenerateError("apply_kraus: map annihilated the state");

  std::vector<std::size_t> out_dims = rest_dims;
  if (d_out >= 2) out_dims.push_back(d_out);
  return KrausResult{std::move(out), std::move(out_dims), weight};
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi for Hermitian matrices.  Each rotation is a phase twist
// making the (p,q) entry real followed by a real Givens rotation zeroing
// it; convergence is quadratic once the off-diagonal mass is small.

namespace {

double offdiag_norm(const ComplexMatrix& a) {
  double s = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * std::norm(a(p, q));
  return std::sqrt(s);
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) throw ArgumentError("hermitian_eigenvalues: not square");
  if (m.hermiticity_defect() > tol.hermiticity)
    throw ArgumentError("hermitian_eigenvalues: matrix not Hermitian");
  const std::size_t n = m.rows();

  // Work on the Hermitian part so roundoff in the input cannot drift.
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));

  double off = offdiag_norm(a);
  int sweep = 0;
  for (; sweep < tol.jacobi_max_sweeps && off > tol.jacobi_offdiag; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const cplx phase = apq / mag;  // a(p,q) = mag * phase
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Unitary R: R(p,p)=c, R(p,q)=s, R(q,p)=-s*conj(phase),
        // R(q,q)=c*conj(phase); update A <- R^dag A R.
        const cplx rqp = -s * std::conj(phase);
        const cplx rqq = c * std::conj(phase);
        for (std::size_t i = 0; i < n; ++i) {
          const cplx aip = a(i, p), aiq = a(i, q);
          a(i, p) = aip * c + aiq * rqp;
          a(i, q) = aip * s + aiq * rqq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const cplx apj = a(p, j), aqj = a(q, j);
          a(p, j) = c * apj + std::conj(rqp) * aqj;
          a(q, j) = s * apj + std::conj(rqq) * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
    off = offdiag_norm(a);
  }
  if (off > tol.jacobi_offdiag)
    throw SolverError("hermitian_eigenvalues: Jacobi sweeps exhausted before convergence");

  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

double hermitian_eigen_min(const ComplexMatrix& m, const Tolerances& tol) {
  return hermitian_eigenvalues(m, tol).front();
}

double fidelity_with_pure(const DensityMatrix& rho, const Ket& psi, const Tolerances& tol) {
  if (psi.dim() != rho.side()) throw ArgumentError("fidelity_with_pure: dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > tol.ket_norm)
    throw ArgumentError("fidelity_with_pure: ket not normalized");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < psi.dim(); ++i) {
    if (psi[i] == cplx(0.0, 0.0)) continue;
    for (std::size_t j = 0; j < psi.dim(); ++j)
      acc += std::conj(psi[i]) * rho.matrix()(i, j) * psi[j];
  }
  return acc.real();
}

}  // namespace starlocal
