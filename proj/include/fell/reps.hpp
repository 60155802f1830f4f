#pragma once

// *-representations of the convolution algebra: validation, norm dominance,
// and the extension of a pre-representation on a spanning subspace to a
// bounded representation.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fell/convalg.hpp"
#include "fell/report.hpp"

namespace fell {

/// A linear map from sections to square matrices, given by the images of
/// the basis sections in flat order.
struct StarRepresentation {
  AlgebraRef algebra;
  std::size_t hilbert_dim = 0;
  std::vector<Matrix> images;

  Matrix action(const Section& f) const {
    if (f.algebra() != algebra) throw InvalidArgument("StarRepresentation: section belongs to another bundle");
    Matrix m(hilbert_dim, hilbert_dim);
    const Vector c = f.flat();
    for (std::size_t k = 0; k < c.size(); ++k)
      if (c[k] != Complex{}) m += images[k] * c[k];
    return m;
  }
};

inline StarRepresentation as_star_representation(const AlgebraRef& alg) {
  const auto& rep = regular_representation(alg);
  return {alg, rep.hilbert_dim, rep.basis_images};
}

inline StarRepresentation direct_sum(const StarRepresentation& a, const StarRepresentation& b) {
  if (a.algebra != b.algebra) throw InvalidArgument("direct_sum: representations of different algebras");
  StarRepresentation out{a.algebra, a.hilbert_dim + b.hilbert_dim, {}};
  for (std::size_t k = 0; k < a.images.size(); ++k) {
    Matrix m(out.hilbert_dim, out.hilbert_dim);
    m.set_block(0, 0, a.images[k]);
    m.set_block(a.hilbert_dim, a.hilbert_dim, b.images[k]);
    out.images.push_back(std::move(m));
  }
  return out;
}

/// pi compressed by an isometry V (columns orthonormal): V* pi(.) V.
inline StarRepresentation compress(const StarRepresentation& pi, const Matrix& V) {
  if (V.rows() != pi.hilbert_dim) throw InvalidArgument("compress: isometry has wrong row count");
  StarRepresentation out{pi.algebra, V.cols(), {}};
  const Matrix Vs = V.adjoint();
  for (const auto& m : pi.images) out.images.push_back(Vs * m * V);
  return out;
}

/// Orthonormal basis (as columns) of the range of an orthogonal projection.
inline Matrix range_isometry(const Matrix& P, const Tolerances& tol = default_tolerances) {
  std::vector<Vector> cols;
  for (std::size_t j = 0; j < P.cols(); ++j) cols.push_back(P.col(j));
  const auto sb = span_basis(cols, 1e-8);
  Matrix V(P.rows(), sb.rank());
  for (std::size_t k = 0; k < sb.rank(); ++k) V.set_col(k, sb.orthonormal[k]);
  (void)tol;
  return V;
}

/// Right multiplication by a projection p in the unit fiber A_x, acting on
/// the fibers with source x, in the regular representation's orthonormal
/// coordinates. It commutes with the left action and is self-adjoint, so its
/// range is a reducing subspace.
inline Matrix right_projection(const AlgebraRef& alg, Element x, const Vector& p_coords) {
  const auto& B = alg->bundle();
  const auto& G = B.groupoid;
  const std::size_t n = alg->total_dim();
  Matrix raw(n, n);
  for (Element g = 0; g < G.size(); ++g) {
    if (G.source(g) != x) continue;
    for (std::size_t j = 0; j < alg->dim(g); ++j) {
      Vector e(alg->dim(g));
      e[j] = 1.0;
      const Vector r = multiply_coords(B, g, x, e, p_coords);
      for (std::size_t i = 0; i < r.size(); ++i) raw(alg->offset(g) + i, alg->offset(g) + j) = r[i];
    }
  }
  const auto& rep = alg->regular_rep();
  return rep.to_orthonormal * raw * rep.from_orthonormal;
}

/// A nonzero spectral projection of a random self-adjoint element of A_x.
inline Vector random_unit_projection(const AlgebraRef& alg, Element x, std::mt19937_64& rng) {
  const auto& A = alg->bundle().unit_algebra(x);
  if (A.dim() == 0) return {};
  const Matrix a = A.to_matrix(detail::random_coords(A.dim(), rng));
  const Matrix h = (a + a.adjoint()) * 0.5;
  const auto eig = hermitian_eigen(h);
  std::size_t k = 0;
  for (std::size_t i = 1; i < eig.values.size(); ++i)
    if (std::abs(eig.values[i]) > std::abs(eig.values[k])) k = i;
  Matrix P(h.rows(), h.cols());
  for (std::size_t i = 0; i < eig.values.size(); ++i)
    if (std::abs(eig.values[i] - eig.values[k]) < 1e-8) {
      const Vector v = eig.vectors.col(i);
      for (std::size_t r = 0; r < v.size(); ++r)
        for (std::size_t c = 0; c < v.size(); ++c) P(r, c) += v[r] * std::conj(v[c]);
    }
  return A.coords(P);
}

/// Compression of lambda to the reducing subspace cut out by a projection
/// of A_x.
inline StarRepresentation block_compression(const AlgebraRef& alg, Element x, const Vector& p_coords) {
  return compress(as_star_representation(alg), range_isometry(right_projection(alg, x, p_coords)));
}

// ---------------------------------------------------------------------------
// Validation

struct RepresentationCheckOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  Tolerances tol = default_tolerances;
  /// Check that pi(unit section) = 1. Compressions to reducing subspaces
  /// satisfy this; arbitrary *-homomorphisms need not.
  bool require_nondegenerate = true;
};

/// Multiplicative, involutive and nondegenerate on basis sections, plus the
/// norm bounds ||pi(f)|| <= ||f||_I and, for f on one bisection,
/// ||pi(f)|| <= ||f||_inf.
inline Report validate_representation(const StarRepresentation& pi, const RepresentationCheckOptions& opt = {}) {
  Report rep;
  const auto& alg = pi.algebra;
  const std::size_t n = alg->total_dim();
  const auto& tol = opt.tol;
  if (pi.images.size() != n) {
    rep.add("shape", "expected " + std::to_string(n) + " basis images, got " + std::to_string(pi.images.size()));
    return rep;
  }
  for (const auto& m : pi.images)
    if (m.rows() != pi.hilbert_dim || m.cols() != pi.hilbert_dim) {
      rep.add("shape", "basis image has wrong size");
      return rep;
    }

  std::vector<Section> basis;
  for (std::size_t k = 0; k < n; ++k) {
    const auto [g, i] = alg->unflatten(k);
    basis.push_back(Section::basis(alg, g, i));
  }
  for (std::size_t a = 0; a < n && rep.ok(); ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const Matrix lhs = pi.action(convolve(basis[a], basis[b]));
      const Matrix rhs = pi.images[a] * pi.images[b];
      if (max_abs_diff(lhs, rhs) > tol.homomorphism * (1.0 + lhs.max_abs() + rhs.max_abs())) {
        rep.add("multiplicative", "basis pair (" + std::to_string(a) + "," + std::to_string(b) + ")");
        break;
      }
    }
  for (std::size_t a = 0; a < n; ++a) {
    const Matrix lhs = pi.action(involute(basis[a]));
    if (max_abs_diff(lhs, pi.images[a].adjoint()) > tol.homomorphism * (1.0 + lhs.max_abs())) {
      rep.add("involutive", "basis section " + std::to_string(a));
      break;
    }
  }
  if (opt.require_nondegenerate) {
    const Matrix pu = pi.action(unit_section(alg));
    if (max_abs_diff(pu, Matrix::identity(pi.hilbert_dim)) > tol.homomorphism)
      rep.add("nondegenerate", "pi(unit section) != identity");
  }

  std::mt19937_64 rng(opt.seed);
  auto bound_checks = [&](const Section& f, bool on_bisection, const std::string& what) {
    const double pf = operator_norm(pi.action(f), tol);
    const double in = i_norm(f);
    if (pf > in + tol.dominance * (1.0 + in)) rep.add("i_norm_bound", what);
    if (on_bisection) {
      const double sn = sup_norm(f);
      if (pf > sn + tol.dominance * (1.0 + sn)) rep.add("bisection_bound", what);
    }
  };
  for (std::size_t a = 0; a < n; ++a) bound_checks(basis[a], true, "basis section " + std::to_string(a));
  const auto& G = alg->groupoid();
  for (std::size_t t = 0; t < opt.samples && n > 0; ++t) {
    bound_checks(random_section(alg, rng), false, "sample " + std::to_string(t));
    const auto U = random_bisection(G, rng);
    bound_checks(random_section_on(alg, U.elements(), rng), true, "bisection sample " + std::to_string(t));
  }
  return rep;
}

/// A representation that passed validate_representation.
class ValidatedRepresentation {
 public:
  static ValidatedRepresentation validate(StarRepresentation pi, const RepresentationCheckOptions& opt = {}) {
    const auto rep = validate_representation(pi, opt);
    if (!rep.ok())
      throw InvalidArgument("unvalidated representation: " + rep.findings.front().check + " (" +
                            rep.findings.front().witness + ")");
    return ValidatedRepresentation(std::move(pi));
  }
  const StarRepresentation& get() const { return pi_; }

 private:
  explicit ValidatedRepresentation(StarRepresentation pi) : pi_(std::move(pi)) {}
  StarRepresentation pi_;
};

/// (||pi(f)||, full_norm(f)); the first never exceeds the second.
inline std::pair<double, double> dominance_check(const ValidatedRepresentation& pi, const Section& f) {
  return {operator_norm(pi.get().action(f)), full_norm(f)};
}

inline std::pair<double, double> dominance_check(const StarRepresentation& pi, const Section& f,
                                                 const RepresentationCheckOptions& opt = {}) {
  return dominance_check(ValidatedRepresentation::validate(pi, opt), f);
}

/// n * ||f||_inf, where n counts the cover members meeting supp(f). Writing
/// f as the sum of its restrictions to those members bounds every
/// representation, and hence the full norm, by this value.
inline double bisection_decomposition_bound(const Section& f, const std::vector<Bisection>& cover) {
  std::size_t meeting = 0;
  const auto supp = f.support();
  for (auto g : supp)
    if (std::none_of(cover.begin(), cover.end(), [g](const Bisection& U) { return U.contains(g); }))
      throw InvalidArgument("bisection_decomposition_bound: cover misses element " + std::to_string(g) +
                            " of the support");
  for (const auto& U : cover)
    if (std::any_of(supp.begin(), supp.end(), [&U](Element g) { return U.contains(g); })) ++meeting;
  return static_cast<double>(meeting) * sup_norm(f);
}

// ---------------------------------------------------------------------------
// Pre-representations

/// An algebra homomorphism into linear maps of H0 = span(h0_basis), on the
/// Hilbert space C^hilbert_dim with the standard inner product. `action[k]`
/// is the matrix of L(basis section k) in h0_basis coordinates.
struct PreRepresentation {
  std::size_t hilbert_dim = 0;
  Matrix h0_basis;  // hilbert_dim x k, independent columns
  std::vector<Matrix> action;

  Matrix act(const Section& f) const {
    const std::size_t k = h0_basis.cols();
    Matrix m(k, k);
    const Vector c = f.flat();
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] != Complex{}) m += action[i] * c[i];
    return m;
  }
};

/// Restriction of a representation to H0 = span(V): L(f) = V^-1 pi(f) V.
/// V must be square and invertible, since H0 contains the dense subspace
/// H00 and is therefore all of H at finite dimension.
inline PreRepresentation restrict_to_pre_representation(const StarRepresentation& pi, const Matrix& V) {
  if (V.rows() != pi.hilbert_dim || !V.square())
    throw InvalidArgument("restrict_to_pre_representation: H0 basis must span the whole space");
  const Matrix Vinv = inverse(V);
  PreRepresentation L{pi.hilbert_dim, V, {}};
  for (const auto& m : pi.images) L.action.push_back(Vinv * m * V);
  return L;
}

/// The three defining conditions, checked on basis sections: homomorphism,
/// adjointability <eta, L(f) xi> = <L(f*) eta, xi>, and nondegeneracy
/// span{L(f) xi} = H.
inline Report validate_pre_representation(const PreRepresentation& L, const AlgebraRef& alg,
                                          const Tolerances& tol = default_tolerances) {
  Report rep;
  const std::size_t n = alg->total_dim(), k = L.h0_basis.cols();
  if (L.h0_basis.rows() != L.hilbert_dim || L.action.size() != n) {
    rep.add("shape", "pre-representation data does not match the algebra");
    return rep;
  }
  for (const auto& m : L.action)
    if (m.rows() != k || m.cols() != k) {
      rep.add("shape", "action matrix has wrong size");
      return rep;
    }
  std::vector<Section> basis;
  for (std::size_t a = 0; a < n; ++a) {
    const auto [g, i] = alg->unflatten(a);
    basis.push_back(Section::basis(alg, g, i));
  }
  for (std::size_t a = 0; a < n && rep.ok(); ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const Matrix lhs = L.act(convolve(basis[a], basis[b]));
      const Matrix rhs = L.action[a] * L.action[b];
      if (max_abs_diff(lhs, rhs) > tol.homomorphism * (1.0 + lhs.max_abs() + rhs.max_abs())) {
        rep.add("homomorphism", "basis pair (" + std::to_string(a) + "," + std::to_string(b) + ")");
        break;
      }
    }
  const Matrix gv = L.h0_basis.adjoint() * L.h0_basis;
  for (std::size_t a = 0; a < n; ++a) {
    const Matrix lhs = gv * L.action[a];
    const Matrix rhs = L.act(involute(basis[a])).adjoint() * gv;
    if (max_abs_diff(lhs, rhs) > tol.homomorphism * (1.0 + lhs.max_abs() + rhs.max_abs())) {
      rep.add("adjointability", "basis section " + std::to_string(a));
      break;
    }
  }
  std::vector<Vector> spanning;
  for (std::size_t a = 0; a < n; ++a) {
    const Matrix w = L.h0_basis * L.action[a];
    for (std::size_t j = 0; j < k; ++j) spanning.push_back(w.col(j));
  }
  if (numerical_rank(spanning, tol.rank) != L.hilbert_dim)
    rep.add("nondegeneracy", "span{L(f) xi} is a proper subspace");
  return rep;
}

/// Extends a pre-representation to a representation M. On the spanning set
/// H00 = {L(f) xi} the operator M(h) is defined by M(h) L(f) xi = L(h*f) xi,
/// solved on a maximal independent subset and checked on the rest. Each M(h)
/// is checked against ||M(h)|| <= p ||h||_inf (p = 1 for basis sections,
/// which live on a single arrow) and ||M(h)|| <= full_norm(h), and against
/// M(h) = L(h) on H0.
inline StarRepresentation extend_pre_representation(const PreRepresentation& L, const AlgebraRef& alg,
                                                    const Tolerances& tol = default_tolerances) {
  const auto check = validate_pre_representation(L, alg, tol);
  if (!check.ok())
    throw InvalidArgument("extend_pre_representation: invalid pre-representation: " + check.findings.front().check +
                          " (" + check.findings.front().witness + ")");
  const std::size_t n = alg->total_dim(), k = L.h0_basis.cols(), H = L.hilbert_dim;

  std::vector<Section> basis;
  for (std::size_t a = 0; a < n; ++a) {
    const auto [g, i] = alg->unflatten(a);
    basis.push_back(Section::basis(alg, g, i));
  }
  // Spanning vectors L(f_a) xi_j, flattened as (a, j).
  std::vector<Vector> spanning;
  for (std::size_t a = 0; a < n; ++a) {
    const Matrix w = L.h0_basis * L.action[a];
    for (std::size_t j = 0; j < k; ++j) spanning.push_back(w.col(j));
  }
  const auto sb = span_basis(spanning, tol.rank);
  if (sb.rank() != H) throw InvalidArgument("extend_pre_representation: H00 is a proper subspace");
  Matrix W(H, H);
  for (std::size_t c = 0; c < H; ++c) W.set_col(c, spanning[sb.pivots[c]]);
  const Matrix Winv = inverse(W);

  StarRepresentation M{alg, H, {}};
  for (std::size_t c = 0; c < n; ++c) {
    // Images L(h * f_a) xi_j for every spanning vector.
    std::vector<Vector> images;
    images.reserve(spanning.size());
    for (std::size_t a = 0; a < n; ++a) {
      const Matrix y = L.h0_basis * L.act(convolve(basis[c], basis[a]));
      for (std::size_t j = 0; j < k; ++j) images.push_back(y.col(j));
    }
    Matrix Y(H, H);
    for (std::size_t col = 0; col < H; ++col) Y.set_col(col, images[sb.pivots[col]]);
    const Matrix Mc = Y * Winv;

    for (std::size_t s = 0; s < spanning.size(); ++s) {
      const Vector lhs = Mc * spanning[s];
      if (max_abs_diff(lhs, images[s]) > tol.well_defined * (1.0 + norm2(images[s])))
        throw InvalidArgument("extend_pre_representation: M(h) is not well defined on H00 (basis section " +
                              std::to_string(c) + ")");
    }
    const double mn = operator_norm(Mc, tol);
    const double sn = sup_norm(basis[c]);
    if (mn > sn + tol.dominance * (1.0 + sn))
      throw InternalInconsistency("extend_pre_representation: ||M(h)|| exceeds the bisection bound");
    const double fn = full_norm(basis[c]);
    if (mn > fn + tol.dominance * (1.0 + fn))
      throw InternalInconsistency("extend_pre_representation: ||M(h)|| exceeds the full norm");
    if (max_abs_diff(Mc * L.h0_basis, L.h0_basis * L.action[c]) > tol.well_defined * (1.0 + Mc.max_abs()))
      throw InternalInconsistency("extend_pre_representation: M(h) does not restrict to L(h) on H0");
    M.images.push_back(Mc);
  }
  return M;
}

}  // namespace fell
