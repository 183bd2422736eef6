#pragma once

#include <cstddef>
#include <vector>

#include "naesat/real.hpp"

namespace naesat {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const std::vector<Real>& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Real& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Real& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix transpose() const;
  Matrix operator*(const Matrix& o) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix scaled(const Real& s) const;

  Real max_abs() const;
  Real max_asymmetry() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

Matrix kron(const Matrix& a, const Matrix& b);

// Gauss-Jordan with partial pivoting; throws std::runtime_error if singular.
Matrix inverse(const Matrix& a);

struct EigenResult {
  std::vector<Real> values;  // ascending
  Matrix vectors;            // column j pairs with values[j]
};

// Cyclic Jacobi rotations for a symmetric matrix.
EigenResult jacobi_eigen(const Matrix& sym, int max_sweeps = 100);

// D^{1/2} M D^{-1/2} for diagonal weights d.
Matrix conjugate_by_sqrt(const Matrix& m, const std::vector<Real>& d);

Real min_singular_value(const Matrix& a);

}  // namespace naesat
