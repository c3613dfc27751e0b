#include "starlocal/complex_matrix.hpp"

#include <cmath>
#include <cstdlib>

#include "starlocal/errors.hpp"

namespace starlocal {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

cplx ComplexMatrix::trace() const {
  if (rows_ != cols_) throw ArgumentError("trace: matrix not square");
  cplx t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ArgumentError("matrix add: shape mismatch");
  ComplexMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
  return r;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ArgumentError("matrix sub: shape mismatch");
  ComplexMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
  return r;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& o) const {
  if (cols_ != o.rows_) throw ArgumentError("matrix mul: inner dimension mismatch");
  ComplexMatrix r(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const cplx a = (*this)(i, k);
      if (a == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

ComplexMatrix ComplexMatrix::operator*(cplx s) const {
  ComplexMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] * s;
  return r;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ArgumentError("matrix add: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw ArgumentError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i)
    m = std::max(m, std::abs(data_[i] - o.data_[i]));
  return m;
}

double ComplexMatrix::hermiticity_defect() const {
  if (rows_ != cols_) throw ArgumentError("hermiticity_defect: matrix not square");
  double m = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j)
      m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return m;
}

bool ComplexMatrix::all_finite() const {
  for (const cplx& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

Ket Ket::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw ArgumentError("Ket::basis: index out of range");
  std::vector<cplx> a(dim, cplx(0.0, 0.0));
  a[index] = 1.0;
  return Ket(std::move(a));
}

double Ket::norm() const {
  double s = 0.0;
  for (const cplx& v : amp_) s += std::norm(v);
  return std::sqrt(s);
}

ComplexMatrix Ket::outer() const {
  const std::size_t n = amp_.size();
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (amp_[i] == cplx(0.0, 0.0)) continue;
    for (std::size_t j = 0; j < n; ++j) m(i, j) = amp_[i] * std::conj(amp_[j]);
  }
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ia = 0; ia < a.rows(); ++ia)
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
      const cplx av = a(ia, ja);
      if (av == cplx(0.0, 0.0)) continue;
      for (std::size_t ib = 0; ib < b.rows(); ++ib)
        for (std::size_t jb = 0; jb < b.cols(); ++jb)
          r(ia * b.rows() + ib, ja * b.cols() + jb) = av * b(ib, jb);
    }
  return r;
}

}  // namespace starlocal
