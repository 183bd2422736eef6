#include "naesat/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace naesat {

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Real(1);
  return m;
}

Matrix Matrix::diagonal(const std::vector<Real>& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("matrix product: shape mismatch");
  Matrix r(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t l = 0; l < cols_; ++l) {
      const Real& a = (*this)(i, l);
      if (a.is_zero()) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        if (o(l, j).is_zero()) continue;
        r(i, j) += a * o(l, j);
      }
    }
  }
  return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix sum: shape mismatch");
  Matrix r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix difference: shape mismatch");
  Matrix r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
  return r;
}

Matrix Matrix::scaled(const Real& s) const {
  Matrix r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] * s;
  return r;
}

Real Matrix::max_abs() const {
  Real m(0);
  for (const auto& x : data_) m = max(m, abs(x));
  return m;
}

Real Matrix::max_asymmetry() const {
  Real m(0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j) m = max(m, abs((*this)(i, j) - (*this)(j, i)));
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j).is_zero()) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q) r(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
    }
  return r;
}

Matrix inverse(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("inverse: matrix not square");
  Matrix w = a;
  Matrix inv = Matrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    Real best = abs(w(c, c));
    for (std::size_t r = c + 1; r < n; ++r) {
      Real v = abs(w(r, c));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best.is_zero()) throw std::runtime_error("inverse: singular matrix");
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(w(c, j), w(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    }
    Real p = w(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      w(c, j) /= p;
      inv(c, j) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || w(r, c).is_zero()) continue;
      Real f = w(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        if (!w(c, j).is_zero()) w(r, j) -= f * w(c, j);
        if (!inv(c, j).is_zero()) inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

EigenResult jacobi_eigen(const Matrix& sym, int max_sweeps) {
  const std::size_t n = sym.rows();
  if (sym.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix not square");
  Matrix a = sym;
  Matrix v = Matrix::identity(n);
  const Real eps = ldexp(Real(1), -(Real::default_bits() - 2));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Real off(0);
    Real diag(0);
    for (std::size_t i = 0; i < n; ++i) {
      diag += a(i, i) * a(i, i);
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    }
    if (off.is_zero() || off <= eps * eps * diag) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q).is_zero()) continue;
        Real theta = (a(q, q) - a(p, p)) / (Real(2) * a(p, q));
        Real t = Real(theta.sign() >= 0 ? 1 : -1) / (abs(theta) + sqrt(theta * theta + Real(1)));
        Real c = Real(1) / sqrt(t * t + Real(1));
        Real s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          Real akp = a(k, p);
          Real akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          Real apk = a(p, k);
          Real aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          Real vkp = v(k, p);
          Real vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  EigenResult r;
  r.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    r.values.push_back(a(order[j], order[j]));
    for (std::size_t i = 0; i < n; ++i) r.vectors(i, j) = v(i, order[j]);
  }
  return r;
}

Matrix conjugate_by_sqrt(const Matrix& m, const std::vector<Real>& d) {
  Matrix r(m.rows(), m.cols());
  std::vector<Real> s;
  s.reserve(d.size());
  for (const auto& x : d) s.push_back(sqrt(x));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = s[i] * m(i, j) / s[j];
  return r;
}

Real min_singular_value(const Matrix& a) {
  EigenResult e = jacobi_eigen(a.transpose() * a);
  Real lo = e.values.front();
  return lo.sign() > 0 ? sqrt(lo) : Real(0);
}

}  // namespace naesat
