#pragma once

// Finite-dimensional C*-algebra primitives over dense complex matrices.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fell/config.hpp"
#include "fell/matrix.hpp"

namespace fell {

inline double hermitian_defect(const Matrix& m) {
  double d = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
  return d;
}

inline bool is_hermitian(const Matrix& m, double tol) {
  return m.square() && hermitian_defect(m) <= tol * (1.0 + m.max_abs());
}

struct HermitianEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k is the eigenvector for values[k]
};

/// Cyclic Jacobi for Hermitian matrices. Each rotation first removes the
/// phase of the pivot, then applies a real Givens rotation.
inline HermitianEigen hermitian_eigen(const Matrix& m, const Tolerances& tol = default_tolerances) {
  if (!m.square()) throw InvalidArgument("hermitian_eigen: matrix not square");
  if (!m.all_finite()) throw InvalidArgument("hermitian_eigen: non-finite entries");
  if (!is_hermitian(m, tol.hermitian)) throw InvalidArgument("hermitian_eigen: matrix is not Hermitian");
  const std::size_t n = m.rows();
  Matrix a = (m + m.adjoint()) * 0.5;
  Matrix v = Matrix::identity(n);
  const double fro = a.frobenius_norm();

  auto off_mass = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < tol.eig_max_sweeps; ++sweep) {
    if (off_mass() <= tol.eig_offdiag * fro) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const Complex phase = apq / mag;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // U restricted to (p,q) = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
        const Complex u00 = c, u01 = s;
        const Complex u10 = -s * std::conj(phase), u11 = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {  // A <- A U (columns)
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * u00 + akq * u10;
          a(k, q) = akp * u01 + akq * u11;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- U* A (rows)
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(u00) * apk + std::conj(u10) * aqk;
          a(q, k) = std::conj(u01) * apk + std::conj(u11) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * u00 + vkq * u10;
          v(k, q) = vkp * u01 + vkq * u11;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  HermitianEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }

  const Matrix recon = out.vectors * Matrix::diagonal(out.values) * out.vectors.adjoint();
  const double residual = (m - recon).frobenius_norm();
  if (sweep == tol.eig_max_sweeps || residual > tol.eig_residual * (1.0 + m.frobenius_norm())) {
    throw NumericalError("hermitian_eigen: no convergence after " + std::to_string(sweep) +
                         " sweeps, reconstruction residual " + std::to_string(residual));
  }
  return out;
}

inline std::vector<double> hermitian_eigenvalues(const Matrix& m, const Tolerances& tol = default_tolerances) {
  return hermitian_eigen(m, tol).values;
}

/// Largest singular value, as sqrt(max eig(M* M)).
inline double operator_norm(const Matrix& m, const Tolerances& tol = default_tolerances) {
  if (m.empty()) return 0.0;
  Matrix g = m.adjoint() * m;
  g = (g + g.adjoint()) * 0.5;
  const auto ev = hermitian_eigenvalues(g, tol);
  return std::sqrt(std::max(0.0, ev.back()));
}

inline bool is_positive(const Matrix& m, double tol) {
  if (!m.square()) throw InvalidArgument("is_positive: matrix not square");
  if (m.empty()) return true;
  if (!is_hermitian(m, tol)) return false;
  const auto ev = hermitian_eigenvalues((m + m.adjoint()) * 0.5);
  return ev.front() >= -tol;
}

/// Positive square root via eigendecomposition; slightly negative
/// eigenvalues (within the positivity tolerance) are clamped to zero.
inline Matrix positive_sqrt(const Matrix& m, const Tolerances& tol = default_tolerances) {
  if (!is_positive(m, tol.positivity)) throw InvalidArgument("positive_sqrt: input is not positive");
  if (m.empty()) return m;
  const auto eig = hermitian_eigen((m + m.adjoint()) * 0.5, tol);
  std::vector<double> roots(eig.values.size());
  std::transform(eig.values.begin(), eig.values.end(), roots.begin(),
                 [](double x) { return std::sqrt(std::max(0.0, x)); });
  Matrix s = eig.vectors * Matrix::diagonal(roots) * eig.vectors.adjoint();
  s = (s + s.adjoint()) * 0.5;
  const double residual = (s * s - m).frobenius_norm();
  if (residual > tol.sqrt_residual * (1.0 + m.frobenius_norm()))
    throw NumericalError("positive_sqrt: reconstruction residual " + std::to_string(residual));
  return s;
}

/// A *-subalgebra of M_n given by a linear basis. Closure under product and
/// adjoint, and the existence of a unit, are verified at construction.
class MatrixStarAlgebra {
 public:
  MatrixStarAlgebra() = default;

  MatrixStarAlgebra(std::size_t ambient_dim, std::vector<Matrix> basis, std::vector<std::size_t> blocks = {},
                    const Tolerances& tol = default_tolerances)
      : ambient_dim_(ambient_dim), basis_(std::move(basis)), blocks_(std::move(blocks)) {
    std::vector<Vector> cols;
    for (const auto& b : basis_) {
      if (b.rows() != ambient_dim_ || b.cols() != ambient_dim_)
        throw InvalidArgument("MatrixStarAlgebra: basis element has wrong shape");
      if (!b.all_finite()) throw InvalidArgument("MatrixStarAlgebra: non-finite basis entry");
      cols.push_back(vec(b));
    }
    if (numerical_rank(cols, tol.rank) != basis_.size())
      throw InvalidArgument("MatrixStarAlgebra: basis is linearly dependent");
    span_ = ColumnSpace(cols);

    product_.assign(dim() * dim(), {});
    star_.assign(dim(), {});
    for (std::size_t i = 0; i < dim(); ++i) {
      star_[i] = coords_checked(basis_[i].adjoint(), tol, "adjoint");
      for (std::size_t j = 0; j < dim(); ++j)
        product_[i * dim() + j] = coords_checked(basis_[i] * basis_[j], tol, "product");
    }
    unit_coords_ = find_unit(tol);
  }

  /// Direct sum of full matrix algebras M_{n_1} + ... + M_{n_k}, block
  /// diagonal in M_{sum n_i}, with the matrix-unit basis in block order.
  static MatrixStarAlgebra from_blocks(const std::vector<std::size_t>& blocks) {
    std::size_t n = 0;
    for (auto b : blocks) n += b;
    std::vector<Matrix> basis;
    std::size_t offset = 0;
    for (auto b : blocks) {
      for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < b; ++j) {
          Matrix e(n, n);
          e(offset + i, offset + j) = 1.0;
          basis.push_back(std::move(e));
        }
      offset += b;
    }
    return MatrixStarAlgebra(n, std::move(basis), blocks);
  }

  static MatrixStarAlgebra full(std::size_t n) { return from_blocks({n}); }
  static MatrixStarAlgebra scalars() { return from_blocks({1}); }

  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<Matrix>& basis() const { return basis_; }
  /// Block sizes when built by from_blocks; empty otherwise.
  const std::vector<std::size_t>& blocks() const { return blocks_; }

  Matrix to_matrix(std::span<const Complex> coords) const {
    if (coords.size() != dim()) throw InvalidArgument("MatrixStarAlgebra: coordinate length mismatch");
    Matrix m(ambient_dim_, ambient_dim_);
    for (std::size_t i = 0; i < dim(); ++i)
      if (coords[i] != Complex{}) m += basis_[i] * coords[i];
    return m;
  }

  /// Least-squares coordinates of m together with the projection residual.
  LeastSquares project(const Matrix& m) const {
    if (m.rows() != ambient_dim_ || m.cols() != ambient_dim_)
      throw InvalidArgument("MatrixStarAlgebra: matrix has wrong shape");
    if (dim() == 0) return {Vector{}, m.frobenius_norm()};
    return span_.solve(vec(m));
  }

  bool contains(const Matrix& m, const Tolerances& tol = default_tolerances) const {
    return project(m).residual <= tol.membership * (1.0 + m.frobenius_norm());
  }

  Vector coords(const Matrix& m, const Tolerances& tol = default_tolerances) const {
    return coords_checked(m, tol, "element");
  }

  /// Structure constants: basis_i * basis_j expanded in the basis.
  const Vector& product_coords(std::size_t i, std::size_t j) const { return product_[i * dim() + j]; }
  /// basis_i^* expanded in the basis.
  const Vector& star_coords(std::size_t i) const { return star_[i]; }

  const Vector& unit_coords() const { return unit_coords_; }
  Matrix unit() const { return to_matrix(unit_coords_); }

  /// Faithful normalized trace on the algebra (ambient trace / ambient dim).
  Complex trace(const Matrix& m) const {
    return ambient_dim_ == 0 ? Complex{} : m.trace() / static_cast<double>(ambient_dim_);
  }

 private:
  Vector coords_checked(const Matrix& m, const Tolerances& tol, const char* what) const {
    auto ls = project(m);
    if (ls.residual > tol.membership * (1.0 + m.frobenius_norm()))
      throw InvalidArgument(std::string("MatrixStarAlgebra: ") + what + " does not lie in the algebra (residual " +
                            std::to_string(ls.residual) + ")");
    return ls.coeffs;
  }

  Vector find_unit(const Tolerances& tol) const {
    const std::size_t k = dim();
    if (k == 0) return {};
    // Solve sum_i c_i (b_i b_j) = b_j and sum_i c_i (b_j b_i) = b_j for all j.
    const std::size_t m2 = ambient_dim_ * ambient_dim_;
    std::vector<Vector> cols(k, Vector(2 * k * m2));
    Vector rhs(2 * k * m2);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < k; ++i) {
        const Matrix left = basis_[i] * basis_[j];
        const Matrix right = basis_[j] * basis_[i];
        std::copy(left.entries().begin(), left.entries().end(), cols[i].begin() + (2 * j) * m2);
        std::copy(right.entries().begin(), right.entries().end(), cols[i].begin() + (2 * j + 1) * m2);
      }
      std::copy(basis_[j].entries().begin(), basis_[j].entries().end(), rhs.begin() + (2 * j) * m2);
      std::copy(basis_[j].entries().begin(), basis_[j].entries().end(), rhs.begin() + (2 * j + 1) * m2);
    }
    auto ls = ColumnSpace(cols).solve(rhs);
    if (ls.residual > tol.membership * (1.0 + norm2(rhs)))
      throw InvalidArgument("MatrixStarAlgebra: span has no unit");
    return ls.coeffs;
  }

  std::size_t ambient_dim_ = 0;
  std::vector<Matrix> basis_;
  std::vector<std::size_t> blocks_;
  ColumnSpace span_;
  std::vector<Vector> product_;
  std::vector<Vector> star_;
  Vector unit_coords_;
};

/// ||a||^2 1_A - a*a, which is positive for every a in A.
inline Matrix cstar_defect(const MatrixStarAlgebra& alg, const Matrix& a, const Tolerances& tol = default_tolerances) {
  if (!alg.contains(a, tol)) throw InvalidArgument("cstar_defect: element does not lie in the algebra");
  const double n = operator_norm(a, tol);
  return alg.unit() * (n * n) - a.adjoint() * a;
}

}  // namespace fell
