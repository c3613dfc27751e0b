#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace starlocal {

using cplx = std::complex<double>;

// Dense row-major complex matrix.  Just storage plus the handful of
// operations the library actually needs; nothing clever.
class ComplexMatrix {
 public:
  ComplexMatrix() : rows_(0), cols_(0) {}
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }

  ComplexMatrix adjoint() const;
  cplx trace() const;

  ComplexMatrix operator+(const ComplexMatrix& o) const;
  ComplexMatrix operator-(const ComplexMatrix& o) const;
  ComplexMatrix operator*(const ComplexMatrix& o) const;  // matrix product
  ComplexMatrix operator*(cplx s) const;
  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

  // Largest |a_ij - b_ij|; matrices must have equal shape.
  double max_abs_diff(const ComplexMatrix& o) const;
  // Largest |a_ij - conj(a_ji)| over all entries (0 for exactly Hermitian).
  double hermiticity_defect() const;
  bool all_finite() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<cplx> data_;
};

// Pure state vector.  Dimension is amplitudes().size().
class Ket {
 public:
  Ket() = default;
  explicit Ket(std::vector<cplx> amplitudes) : amp_(std::move(amplitudes)) {}
  static Ket basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return amp_.size(); }
  cplx& operator[](std::size_t i) { return amp_[i]; }
  const cplx& operator[](std::size_t i) const { return amp_[i]; }

  double norm() const;
  // |psi><psi| without normalizing first.
  ComplexMatrix outer() const;

 private:
  std::vector<cplx> amp_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace starlocal
