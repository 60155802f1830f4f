#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fell/config.hpp"

namespace fell {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

/// Dense complex matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, Vector data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw InvalidArgument("Matrix: entry count does not match shape");
  }
  Matrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InvalidArgument("Matrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  /// Single column holding v.
  static Matrix column(std::span<const Complex> v) {
    return Matrix(v.size(), 1, Vector(v.begin(), v.end()));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Complex> entries() const { return data_; }
  std::span<Complex> entries() { return data_; }

  Vector col(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  void set_col(std::size_t j, std::span<const Complex> v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  Matrix adjoint() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }
  Matrix transpose() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }
  Matrix conjugate() const {
    Matrix r(*this);
    for (auto& z : r.data_) z = std::conj(z);
    return r;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
  }
  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, Complex s) { return a *= s; }
  friend Matrix operator*(Complex s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) { return a *= -1.0; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw InvalidArgument("Matrix product: inner dimensions differ");
    Matrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend Vector operator*(const Matrix& a, std::span<const Complex> v) {
    if (a.cols_ != v.size()) throw InvalidArgument("Matrix-vector product: dimension mismatch");
    Vector r(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) r[i] += a(i, j) * v[j];
    return r;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidArgument("Matrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

// ---------------------------------------------------------------------------
// Vector helpers

inline Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

inline double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("max_abs_diff: shape mismatch");
  return max_abs_diff(a.entries(), b.entries());
}

/// Flatten a matrix to a vector (row-major).
inline Vector vec(const Matrix& m) { return Vector(m.entries().begin(), m.entries().end()); }

// ---------------------------------------------------------------------------
// Factorizations

/// Solves A X = B for square A by LU with partial pivoting.
inline Matrix solve(Matrix a, Matrix b) {
  const std::size_t n = a.rows();
  if (!a.square() || b.rows() != n) throw InvalidArgument("solve: shape mismatch");
  const double scale = std::max(1.0, a.max_abs());
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= 1e-14 * scale) throw NumericalError("solve: matrix is singular");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = a(i, k) / a(k, k);
      if (f == Complex{}) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex s = b(k, j);
      for (std::size_t i = k + 1; i < n; ++i) s -= a(k, i) * b(i, j);
      b(k, j) = s / a(k, k);
    }
  }
  return b;
}

inline Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows())); }

/// Lower-triangular L with A = L L*. Throws when A is not numerically
/// positive definite.
inline Matrix cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  if (!a.square()) throw InvalidArgument("cholesky: matrix not square");
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) throw NumericalError("cholesky: matrix not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

/// Result of column-pivoted modified Gram-Schmidt on a set of vectors.
struct SpanBasis {
  std::vector<std::size_t> pivots;  // indices of a maximal independent subset, in pick order
  std::vector<Vector> orthonormal;  // orthonormal basis of the span, aligned with pivots
  std::size_t rank() const { return pivots.size(); }
};

/// Column-pivoted Gram-Schmidt with one reorthogonalization pass. A vector
/// whose residual falls to rel_tol times the largest input norm is treated
/// as dependent.
inline SpanBasis span_basis(const std::vector<Vector>& vectors, double rel_tol) {
  SpanBasis out;
  if (vectors.empty()) return out;
  std::vector<Vector> work = vectors;
  double scale = 0.0;
  for (const auto& v : work) scale = std::max(scale, norm2(v));
  if (scale == 0.0) return out;
  std::vector<bool> used(work.size(), false);
  while (true) {
    std::size_t best = work.size();
    double best_norm = rel_tol * scale;
    for (std::size_t k = 0; k < work.size(); ++k) {
      if (used[k]) continue;
      const double nk = norm2(work[k]);
      if (nk > best_norm) {
        best_norm = nk;
        best = k;
      }
    }
    if (best == work.size()) break;
    used[best] = true;
    Vector q = work[best];
    for (const auto& prev : out.orthonormal) {
      const Complex c = dot(prev, q);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] -= c * prev[i];
    }
    const double nq = norm2(q);
    if (nq <= rel_tol * scale) continue;
    for (auto& z : q) z /= nq;
    for (std::size_t k = 0; k < work.size(); ++k) {
      if (used[k]) continue;
      const Complex c = dot(q, work[k]);
      for (std::size_t i = 0; i < q.size(); ++i) work[k][i] -= c * q[i];
    }
    out.pivots.push_back(best);
    out.orthonormal.push_back(std::move(q));
  }
  return out;
}

inline std::size_t numerical_rank(const std::vector<Vector>& vectors, double rel_tol) {
  return span_basis(vectors, rel_tol).rank();
}

/// Least-squares solution of min ||A x - b|| for A with independent columns
/// (thin QR by Gram-Schmidt). Returns the coefficients and the residual norm.
struct LeastSquares {
  Vector coeffs;
  double residual = 0.0;
};

class ColumnSpace {
 public:
  ColumnSpace() = default;
  explicit ColumnSpace(const std::vector<Vector>& columns) : n_(columns.size()) {
    if (columns.empty()) return;
    dim_ = columns.front().size();
    r_ = Matrix(n_, n_);
    for (std::size_t j = 0; j < n_; ++j) {
      Vector q = columns[j];
      // two passes of classical Gram-Schmidt
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t k = 0; k < j; ++k) {
          const Complex c = dot(q_[k], q);
          r_(k, j) += c;
          for (std::size_t i = 0; i < dim_; ++i) q[i] -= c * q_[k][i];
        }
      const double nq = norm2(q);
      const double scale = std::max(1e-300, norm2(columns[j]));
      if (nq <= 1e-12 * scale) throw InvalidArgument("ColumnSpace: columns are linearly dependent");
      for (auto& z : q) z /= nq;
      r_(j, j) = nq;
      q_.push_back(std::move(q));
    }
  }

  std::size_t size() const { return n_; }

  LeastSquares solve(std::span<const Complex> b) const {
    LeastSquares out;
    out.coeffs.assign(n_, 0.0);
    Vector rhs(n_);
    Vector residual(b.begin(), b.end());
    for (std::size_t k = 0; k < n_; ++k) {
      rhs[k] = dot(q_[k], residual);
      for (std::size_t i = 0; i < dim_; ++i) residual[i] -= rhs[k] * q_[k][i];
    }
    // second projection pass for accuracy
    for (std::size_t k = 0; k < n_; ++k) {
      const Complex c = dot(q_[k], residual);
      rhs[k] += c;
      for (std::size_t i = 0; i < dim_; ++i) residual[i] -= c * q_[k][i];
    }
    for (std::size_t k = n_; k-- > 0;) {
      Complex s = rhs[k];
      for (std::size_t i = k + 1; i < n_; ++i) s -= r_(k, i) * out.coeffs[i];
      out.coeffs[k] = s / r_(k, k);
    }
    out.residual = norm2(residual);
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<Vector> q_;
  Matrix r_;
};

}  // namespace fell
