#pragma once

// The convolution *-algebra of compactly supported sections of a Fell bundle
// over a finite groupoid, its I-norm, uniform norm and full C*-norm.
//
// The full norm is the operator norm in the left regular representation on
// the direct sum of fibers with inner product <a,b> = tau_{s(g)}(a* b). The
// convolution algebra is a finite-dimensional *-algebra and this
// representation is faithful (lambda(f) applied to the unit section is f), so
// it carries the unique C*-norm.

#include <memory>
#include <mutex>
#include <random>
#include <vector>

#include "fell/bundle.hpp"
#include "fell/config.hpp"
#include "fell/groupoid.hpp"
#include "fell/matalg.hpp"

namespace fell {

struct RegularRep;

/// A bundle frozen for use as the carrier of sections. Holds the lazily
/// built regular representation.
class ConvolutionAlgebra {
 public:
  explicit ConvolutionAlgebra(FellBundle bundle) : bundle_(std::move(bundle)) {
    offsets_.resize(bundle_.size() + 1, 0);
    for (Element g = 0; g < bundle_.size(); ++g) offsets_[g + 1] = offsets_[g] + bundle_.dim.at(g);
  }

  const FellBundle& bundle() const { return bundle_; }
  const FiniteGroupoid& groupoid() const { return bundle_.groupoid; }
  std::size_t size() const { return bundle_.size(); }
  std::size_t dim(Element g) const { return bundle_.dim[g]; }

  /// Total dimension: sum of fiber dimensions.
  std::size_t total_dim() const { return offsets_.back(); }
  /// Index of basis section (g, i) in the flat coordinate vector.
  std::size_t flat_index(Element g, std::size_t i) const { return offsets_[g] + i; }
  std::size_t offset(Element g) const { return offsets_[g]; }
  std::pair<Element, std::size_t> unflatten(std::size_t k) const {
    Element g = 0;
    while (offsets_[g + 1] <= k) ++g;
    return {g, k - offsets_[g]};
  }

  /// Built once on first use; safe for concurrent readers.
  const RegularRep& regular_rep() const;

 private:
  FellBundle bundle_;
  std::vector<std::size_t> offsets_;
  mutable std::once_flag rep_once_;
  mutable std::unique_ptr<RegularRep> rep_;
};

using AlgebraRef = std::shared_ptr<const ConvolutionAlgebra>;

inline AlgebraRef make_algebra(FellBundle bundle) { return std::make_shared<const ConvolutionAlgebra>(std::move(bundle)); }

/// An element of Cc(G; A): one coordinate vector per groupoid element.
class Section {
 public:
  Section() = default;
  explicit Section(AlgebraRef alg) : alg_(std::move(alg)) {
    values_.resize(alg_->size());
    for (Element g = 0; g < alg_->size(); ++g) values_[g].assign(alg_->dim(g), 0.0);
  }

  static Section basis(const AlgebraRef& alg, Element g, std::size_t i) {
    Section s(alg);
    s.values_.at(g).at(i) = 1.0;
    return s;
  }
  static Section from_flat(const AlgebraRef& alg, std::span<const Complex> flat) {
    if (flat.size() != alg->total_dim()) throw InvalidArgument("Section: flat vector has wrong length");
    Section s(alg);
    for (Element g = 0; g < alg->size(); ++g)
      for (std::size_t i = 0; i < alg->dim(g); ++i) s.values_[g][i] = flat[alg->flat_index(g, i)];
    return s;
  }

  const AlgebraRef& algebra() const { return alg_; }
  const Vector& at(Element g) const { return values_.at(g); }
  Complex& coord(Element g, std::size_t i) { return values_.at(g).at(i); }
  void set(Element g, Vector v) {
    if (v.size() != alg_->dim(g)) throw InvalidArgument("Section: value has wrong fiber dimension");
    values_.at(g) = std::move(v);
  }

  Vector flat() const {
    Vector out;
    out.reserve(alg_->total_dim());
    for (const auto& v : values_) out.insert(out.end(), v.begin(), v.end());
    return out;
  }

  /// Elements carrying a nonzero value.
  std::vector<Element> support() const {
    std::vector<Element> out;
    for (Element g = 0; g < values_.size(); ++g)
      if (std::any_of(values_[g].begin(), values_[g].end(), [](Complex z) { return z != Complex{}; }))
        out.push_back(g);
    return out;
  }

  Section& operator+=(const Section& o) {
    same_algebra(o);
    for (Element g = 0; g < values_.size(); ++g)
      for (std::size_t i = 0; i < values_[g].size(); ++i) values_[g][i] += o.values_[g][i];
    return *this;
  }
  Section& operator-=(const Section& o) {
    same_algebra(o);
    for (Element g = 0; g < values_.size(); ++g)
      for (std::size_t i = 0; i < values_[g].size(); ++i) values_[g][i] -= o.values_[g][i];
    return *this;
  }
  Section& operator*=(Complex s) {
    for (auto& v : values_)
      for (auto& z : v) z *= s;
    return *this;
  }
  friend Section operator+(Section a, const Section& b) { return a += b; }
  friend Section operator-(Section a, const Section& b) { return a -= b; }
  friend Section operator*(Complex s, Section a) { return a *= s; }
  friend Section operator*(Section a, Complex s) { return a *= s; }

  void same_algebra(const Section& o) const {
    if (alg_ != o.alg_) throw InvalidArgument("Section: operands belong to different bundles");
  }

 private:
  AlgebraRef alg_;
  std::vector<Vector> values_;
};

inline double max_abs_diff(const Section& a, const Section& b) {
  a.same_algebra(b);
  return max_abs_diff(a.flat(), b.flat());
}

/// (f*g)(c) = sum over factorizations c = ab of f(a) g(b).
inline Section convolve(const Section& f, const Section& g) {
  f.same_algebra(g);
  const auto& alg = f.algebra();
  const auto& B = alg->bundle();
  const auto& G = B.groupoid;
  Section out(alg);
  for (Element a = 0; a < G.size(); ++a) {
    if (alg->dim(a) == 0) continue;
    const auto& fa = f.at(a);
    if (std::all_of(fa.begin(), fa.end(), [](Complex z) { return z == Complex{}; })) continue;
    for (Element b = 0; b < G.size(); ++b) {
      if (!G.composable(a, b) || alg->dim(b) == 0) continue;
      const Element ab = *G.compose(a, b);
      const Vector p = multiply_coords(B, a, b, fa, g.at(b));
      for (std::size_t k = 0; k < p.size(); ++k) out.coord(ab, k) += p[k];
    }
  }
  return out;
}

inline Section operator*(const Section& f, const Section& g) { return convolve(f, g); }

/// f*(c) = f(c^-1)*.
inline Section involute(const Section& f) {
  const auto& alg = f.algebra();
  const auto& B = alg->bundle();
  Section out(alg);
  for (Element g = 0; g < alg->size(); ++g) {
    if (alg->dim(g) == 0) continue;
    out.set(B.groupoid.inverse(g), star_coords(B, g, f.at(g)));
  }
  return out;
}

inline double fiber_norm_at(const Section& f, Element g) {
  return fiber_norm(f.algebra()->bundle(), FiberElement{g, f.at(g)});
}

/// max over units x of the larger of sum_{r(c)=x} ||f(c)|| and sum_{s(c)=x} ||f(c)||.
inline double i_norm(const Section& f) {
  const auto& G = f.algebra()->groupoid();
  std::vector<double> by_range(G.size(), 0.0), by_source(G.size(), 0.0);
  for (Element g = 0; g < G.size(); ++g) {
    if (f.algebra()->dim(g) == 0) continue;
    const double n = fiber_norm_at(f, g);
    by_range[G.range(g)] += n;
    by_source[G.source(g)] += n;
  }
  double out = 0.0;
  for (auto u : G.units()) out = std::max({out, by_range[u], by_source[u]});
  return out;
}

inline double sup_norm(const Section& f) {
  double out = 0.0;
  for (Element g = 0; g < f.algebra()->size(); ++g)
    if (f.algebra()->dim(g) > 0) out = std::max(out, fiber_norm_at(f, g));
  return out;
}

/// The unit 1_{A_x} over every unit x; the multiplicative identity of Cc(G; A).
inline Section unit_section(const AlgebraRef& alg) {
  Section u(alg);
  for (auto x : alg->groupoid().units()) u.set(x, alg->bundle().unit_algebra(x).unit_coords());
  return u;
}

inline bool supported_in(const Section& f, const Bisection& U) {
  for (auto g : f.support())
    if (!U.contains(g)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Left regular representation

struct RegularRep {
  std::size_t hilbert_dim = 0;
  Matrix gram;             // inner product on flat raw coordinates (block diagonal)
  Matrix to_orthonormal;   // L*, with gram = L L*
  Matrix from_orthonormal; // (L*)^-1
  std::vector<Matrix> basis_images;  // lambda(basis section k) in orthonormal coordinates

  Matrix action(const Section& f) const {
    Matrix m(hilbert_dim, hilbert_dim);
    const Vector c = f.flat();
    for (std::size_t k = 0; k < c.size(); ++k)
      if (c[k] != Complex{}) m += basis_images[k] * c[k];
    return m;
  }
};

inline RegularRep build_regular_rep(const ConvolutionAlgebra& alg, const Tolerances& tol = default_tolerances) {
  const auto& B = alg.bundle();
  const auto& G = B.groupoid;
  const std::size_t n = alg.total_dim();
  RegularRep rep;
  rep.hilbert_dim = n;
  rep.gram = Matrix(n, n);

  for (Element g = 0; g < G.size(); ++g) {
    const std::size_t d = alg.dim(g);
    if (d == 0) continue;
    const Element gi = G.inverse(g), s = G.source(g);
    const auto& fiber = B.unit_algebra(s);
    for (std::size_t i = 0; i < d; ++i) {
      Vector ei(d);
      ei[i] = 1.0;
      const Vector ei_star = star_coords(B, g, ei);
      for (std::size_t j = 0; j < d; ++j) {
        Vector ej(d);
        ej[j] = 1.0;
        const Matrix p = fiber.to_matrix(multiply_coords(B, gi, g, ei_star, ej));
        rep.gram(alg.offset(g) + i, alg.offset(g) + j) = fiber.trace(p);
      }
    }
  }
  if (!is_hermitian(rep.gram, 1e-10)) throw NumericalError("regular representation: Gram matrix is not Hermitian");
  rep.gram = (rep.gram + rep.gram.adjoint()) * 0.5;
  if (n > 0) {
    const auto ev = hermitian_eigenvalues(rep.gram, tol);
    if (ev.front() <= tol.gram_min_eig)
      throw NumericalError("regular representation: fiber inner product is degenerate (min eigenvalue " +
                           std::to_string(ev.front()) + ")");
  }
  const Matrix L = cholesky(rep.gram);
  rep.to_orthonormal = L.adjoint();
  rep.from_orthonormal = inverse(rep.to_orthonormal);

  rep.basis_images.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto [a, i] = alg.unflatten(k);
    Matrix raw(n, n);
    Vector ea(alg.dim(a));
    ea[i] = 1.0;
    for (Element b = 0; b < G.size(); ++b) {
      if (!G.composable(a, b)) continue;
      const Element ab = *G.compose(a, b);
      for (std::size_t j = 0; j < alg.dim(b); ++j) {
        Vector eb(alg.dim(b));
        eb[j] = 1.0;
        const Vector p = multiply_coords(B, a, b, ea, eb);
        for (std::size_t l = 0; l < p.size(); ++l) raw(alg.offset(ab) + l, alg.offset(b) + j) += p[l];
      }
    }
    rep.basis_images.push_back(rep.to_orthonormal * raw * rep.from_orthonormal);
  }
  return rep;
}

inline const RegularRep& ConvolutionAlgebra::regular_rep() const {
  std::call_once(rep_once_, [this] { rep_ = std::make_unique<RegularRep>(build_regular_rep(*this)); });
  return *rep_;
}

/// The regular representation of the algebra, with its *-homomorphism and
/// faithfulness properties asserted on basis sections.
inline const RegularRep& regular_representation(const AlgebraRef& alg, const Tolerances& tol = default_tolerances) {
  const auto& rep = alg->regular_rep();
  const std::size_t n = alg->total_dim();
  const Vector u = rep.to_orthonormal * unit_section(alg).flat();
  for (std::size_t a = 0; a < n; ++a) {
    const auto [g, i] = alg->unflatten(a);
    const Section da = Section::basis(alg, g, i);
    const Matrix& la = rep.basis_images[a];
    const double scale = 1.0 + la.max_abs();
    if (max_abs_diff(rep.action(involute(da)), la.adjoint()) > tol.homomorphism * scale)
      throw InternalInconsistency("regular representation: lambda(f*) != lambda(f)* on basis section " +
                                  std::to_string(a));
    Vector ea(n);
    ea[a] = 1.0;
    if (max_abs_diff(la * u, rep.to_orthonormal * ea) > tol.homomorphism * scale)
      throw InternalInconsistency("regular representation: lambda(f) u != f on basis section " + std::to_string(a));
    for (std::size_t b = 0; b < n; ++b) {
      const auto [h, j] = alg->unflatten(b);
      const Matrix lhs = rep.action(convolve(da, Section::basis(alg, h, j)));
      const Matrix rhs = la * rep.basis_images[b];
      if (max_abs_diff(lhs, rhs) > tol.homomorphism * scale * (1.0 + rep.basis_images[b].max_abs()))
        throw InternalInconsistency("regular representation: not multiplicative on basis pair (" + std::to_string(a) +
                                    "," + std::to_string(b) + ")");
    }
  }
  return rep;
}

/// The C*-norm: operator norm of lambda(f).
inline double full_norm(const Section& f) { return operator_norm(f.algebra()->regular_rep().action(f)); }

// ---------------------------------------------------------------------------
// Random sections

inline Section random_section(const AlgebraRef& alg, std::mt19937_64& rng) {
  Section s(alg);
  for (Element g = 0; g < alg->size(); ++g) s.set(g, detail::random_coords(alg->dim(g), rng));
  return s;
}

/// Random values on the elements of U, zero elsewhere.
inline Section random_section_on(const AlgebraRef& alg, const std::vector<Element>& support, std::mt19937_64& rng) {
  Section s(alg);
  for (auto g : support) s.set(g, detail::random_coords(alg->dim(g), rng));
  return s;
}

/// A random bisection grown greedily from a shuffled element order.
inline Bisection random_bisection(const FiniteGroupoid& G, std::mt19937_64& rng) {
  std::vector<Element> order(G.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Element> pick;
  const std::size_t want = 1 + rng() % G.size();
  for (auto g : order) {
    pick.push_back(g);
    if (!is_bisection(G, pick)) pick.pop_back();
    if (pick.size() == want) break;
  }
  return make_bisection(G, pick);
}

}  // namespace fell
