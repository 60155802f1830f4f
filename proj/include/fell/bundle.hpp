#pragma once

// Fell bundles over finite groupoids, stored as structure tensors over
// chosen fiber bases.
//
// Fibers over units are concrete matrix *-algebras. Fibers over arrows are
// coordinate spaces; the multiplication A_g x A_h -> A_{gh} is a bilinear
// tensor (plus an optional constant term, which must vanish in a genuine
// bundle) and the involution A_g -> A_{g^-1} is an antilinear map (plus an
// optional linear part, which must vanish). The optional parts exist so
// that records violating the axioms can be represented and diagnosed.

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fell/config.hpp"
#include "fell/groupoid.hpp"
#include "fell/matalg.hpp"
#include "fell/report.hpp"

namespace fell {

/// Coefficients of a bilinear map C^left x C^right -> C^out.
struct Tensor3 {
  std::size_t out = 0, left = 0, right = 0;
  Vector data;  // index (k * left + i) * right + j

  Tensor3() = default;
  Tensor3(std::size_t o, std::size_t l, std::size_t r) : out(o), left(l), right(r), data(o * l * r) {}

  Complex& at(std::size_t k, std::size_t i, std::size_t j) { return data[(k * left + i) * right + j]; }
  const Complex& at(std::size_t k, std::size_t i, std::size_t j) const { return data[(k * left + i) * right + j]; }
  bool well_formed() const { return data.size() == out * left * right; }
};

struct MultEntry {
  Element target = 0;  // declared carrier of the product
  Tensor3 coeffs;
  Vector offset;       // empty, or out-dimensional constant term
};

struct StarEntry {
  Element target = 0;  // declared carrier of the adjoint
  Matrix anti;         // a* = anti * conj(a) + linear * a
  Matrix linear;       // empty when absent
};

struct FiberElement {
  Element element = 0;
  Vector coords;
};

class FellBundle {
 public:
  FiniteGroupoid groupoid;
  std::vector<std::optional<MatrixStarAlgebra>> unit_fiber;  // indexed by element, set on units
  std::vector<std::size_t> dim;                              // fiber dimension per element
  std::map<std::pair<Element, Element>, MultEntry> mult;
  std::vector<StarEntry> star;

  std::size_t size() const { return groupoid.size(); }

  const MatrixStarAlgebra& unit_algebra(Element u) const {
    if (u >= unit_fiber.size() || !unit_fiber[u]) throw InvalidArgument("FellBundle: element is not a unit");
    return *unit_fiber[u];
  }

  const MultEntry& mult_entry(Element g, Element h) const {
    auto it = mult.find({g, h});
    if (it == mult.end())
      throw InvalidArgument("FellBundle: no multiplication data for (" + std::to_string(g) + "," + std::to_string(h) +
                            ")");
    return it->second;
  }

  FiberElement zero(Element g) const { return {g, Vector(dim.at(g))}; }
  FiberElement basis_element(Element g, std::size_t i) const {
    auto e = zero(g);
    e.coords.at(i) = 1.0;
    return e;
  }
};

// ---------------------------------------------------------------------------
// Fiber arithmetic

/// Raw coordinate multiplication through the (g,h) entry.
inline Vector multiply_coords(const FellBundle& B, Element g, Element h, std::span<const Complex> a,
                              std::span<const Complex> b) {
  const auto& e = B.mult_entry(g, h);
  const auto& t = e.coeffs;
  if (a.size() != t.left || b.size() != t.right) throw InvalidArgument("fiber_multiply: coordinate length mismatch");
  Vector r(t.out);
  for (std::size_t k = 0; k < t.out; ++k) {
    Complex s = e.offset.empty() ? Complex{} : e.offset[k];
    for (std::size_t i = 0; i < t.left; ++i) {
      if (a[i] == Complex{}) continue;
      for (std::size_t j = 0; j < t.right; ++j) s += t.at(k, i, j) * a[i] * b[j];
    }
    r[k] = s;
  }
  return r;
}

inline FiberElement fiber_multiply(const FellBundle& B, const FiberElement& a, const FiberElement& b) {
  const auto gh = B.groupoid.compose(a.element, b.element);
  if (!gh || !B.groupoid.composable(a.element, b.element))
    throw InvalidArgument("fiber_multiply: carriers " + std::to_string(a.element) + " and " +
                          std::to_string(b.element) + " are not composable");
  return {*gh, multiply_coords(B, a.element, b.element, a.coords, b.coords)};
}

inline Vector star_coords(const FellBundle& B, Element g, std::span<const Complex> a) {
  const auto& s = B.star.at(g);
  if (a.size() != s.anti.cols()) throw InvalidArgument("fiber_star: coordinate length mismatch");
  Vector conj_a(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) conj_a[i] = std::conj(a[i]);
  Vector r = s.anti * std::span<const Complex>(conj_a);
  if (!s.linear.empty()) {
    const Vector l = s.linear * a;
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += l[k];
  }
  return r;
}

inline FiberElement fiber_star(const FellBundle& B, const FiberElement& a) {
  return {B.groupoid.inverse(a.element), star_coords(B, a.element, a.coords)};
}

/// The matrix of an element of a unit fiber.
inline Matrix unit_matrix(const FellBundle& B, Element u, std::span<const Complex> coords) {
  return B.unit_algebra(u).to_matrix(coords);
}

namespace detail {

/// ||a||^2 computed as ||a* a|| in the source fiber (or the matrix norm on units).
inline double norm_squared_via_source(const FellBundle& B, const FiberElement& a, const Tolerances& tol) {
  const auto& G = B.groupoid;
  if (G.is_unit(a.element)) {
    const double n = operator_norm(unit_matrix(B, a.element, a.coords), tol);
    return n * n;
  }
  const auto as = fiber_star(B, a);
  const auto p = fiber_multiply(B, as, a);
  return operator_norm(unit_matrix(B, p.element, p.coords), tol);
}

inline double norm_squared_via_range(const FellBundle& B, const FiberElement& a, const Tolerances& tol) {
  const auto as = fiber_star(B, a);
  const auto p = fiber_multiply(B, a, as);
  return operator_norm(unit_matrix(B, p.element, p.coords), tol);
}

}  // namespace detail

/// Fiber norm sqrt(||a* a||), cross-checked against sqrt(||a a*||).
inline double fiber_norm(const FellBundle& B, const FiberElement& a, const Tolerances& tol = default_tolerances) {
  const double src = detail::norm_squared_via_source(B, a, tol);
  const double rng = detail::norm_squared_via_range(B, a, tol);
  const double na = std::sqrt(std::max(0.0, src));
  if (std::abs(na - std::sqrt(std::max(0.0, rng))) > tol.fiber_norm_agreement * (1.0 + na))
    throw NumericalError("fiber_norm: ||a* a|| and ||a a*|| disagree over element " + std::to_string(a.element));
  if (na == 0.0 && norm2(a.coords) > tol.structural)
    throw NumericalError("fiber_norm: degenerate fiber form over element " + std::to_string(a.element));
  return na;
}

/// Norm without the cross-check, for callers that already validated the bundle.
inline double fiber_norm_unchecked(const FellBundle& B, const FiberElement& a,
                                   const Tolerances& tol = default_tolerances) {
  return std::sqrt(std::max(0.0, detail::norm_squared_via_source(B, a, tol)));
}

// ---------------------------------------------------------------------------
// Axiom checking

struct AxiomResult {
  bool evaluated = false;
  bool pass = true;
  bool sampled = false;  // verdict rests on basis elements plus random samples
  std::string witness;
};

struct AxiomReport {
  std::array<AxiomResult, 10> axioms;  // axioms[k] is axiom k+1
  Report unit_fibers;                  // agreement of unit tensors with the matrix algebra

  bool ok() const {
    for (const auto& a : axioms)
      if (!a.pass) return false;
    return unit_fibers.ok();
  }
  bool fails(int axiom) const { return !axioms.at(axiom - 1).pass; }
  /// Smallest failing axiom number, 0 when all pass.
  int first_failure() const {
    for (int k = 0; k < 10; ++k)
      if (!axioms[k].pass) return k + 1;
    return 0;
  }

  void print(std::ostream& os) const {
    for (int k = 0; k < 10; ++k) {
      const auto& a = axioms[k];
      os << "axiom=" << (k + 1) << " status=" << (!a.evaluated ? "skipped" : a.pass ? "pass" : "fail")
         << " mode=" << (a.sampled ? "sampled" : "exact");
      if (!a.pass) os << " witness=" << a.witness;
      os << "\n";
    }
    for (const auto& f : unit_fibers.findings) os << "unit_fiber=fail witness=" << f.witness << "\n";
  }
};

namespace detail {

inline Vector random_coords(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (auto& z : v) z = Complex(u(rng), u(rng));
  return v;
}

inline std::string pair_str(Element g, std::size_t i, Element h, std::size_t j) {
  std::ostringstream os;
  os << "(" << g << ":" << i << "," << h << ":" << j << ")";
  return os.str();
}

inline void fail(AxiomResult& r, const std::string& w) {
  if (r.pass) r.witness = w;
  r.pass = false;
}

inline double mag(std::span<const Complex> v) {
  double m = 0.0;
  for (auto z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace detail

/// Checks each axiom of a Fell bundle. Structural and algebraic identities
/// (1, 2, 3, 5, 6, 7, 8) are checked on basis elements; the norm axioms (4, 9)
/// and positivity (10) on basis elements plus `samples` seeded random
/// elements, so their verdicts are sampling checks.
inline AxiomReport check_axioms(const FellBundle& B, double tol = 1e-9, std::size_t samples = 100,
                                std::uint64_t seed = 0) {
  using detail::fail;
  AxiomReport rep;
  const auto& G = B.groupoid;
  const std::size_t n = G.size();
  std::mt19937_64 rng(seed);
  Tolerances ntol = default_tolerances;

  auto close = [tol](std::span<const Complex> x, std::span<const Complex> y) {
    return max_abs_diff(x, y) <= tol * (1.0 + std::max(detail::mag(x), detail::mag(y)));
  };

  // Axiom 1 (carrier of products) and shape sanity.
  auto& a1 = rep.axioms[0];
  a1.evaluated = true;
  bool shapes_ok = B.dim.size() == n && B.unit_fiber.size() == n && B.star.size() == n;
  if (!shapes_ok) fail(a1, "per-element arrays have wrong length");
  if (shapes_ok) {
    for (auto u : G.units())
      if (!B.unit_fiber[u] || B.unit_fiber[u]->dim() != B.dim[u]) {
        fail(a1, "unit " + std::to_string(u) + " fiber dimension disagrees with its algebra");
        shapes_ok = false;
      }
    for (Element g = 0; g < n; ++g)
      for (Element h = 0; h < n; ++h) {
        const bool composable = G.composable(g, h);
        auto it = B.mult.find({g, h});
        if (!composable) {
          if (it != B.mult.end()) fail(a1, "multiplication given for non-composable pair (" + std::to_string(g) + "," +
                                                std::to_string(h) + ")");
          continue;
        }
        const auto gh = G.compose(g, h);
        if (it == B.mult.end() || !gh) {
          fail(a1, "missing multiplication for (" + std::to_string(g) + "," + std::to_string(h) + ")");
          shapes_ok = false;
          continue;
        }
        const auto& e = it->second;
        if (e.target != *gh)
          fail(a1, "m(A_" + std::to_string(g) + ",A_" + std::to_string(h) + ") declared over " +
                       std::to_string(e.target) + ", expected " + std::to_string(*gh));
        if (!e.coeffs.well_formed() || e.coeffs.out != B.dim[*gh] || e.coeffs.left != B.dim[g] ||
            e.coeffs.right != B.dim[h] || (!e.offset.empty() && e.offset.size() != B.dim[*gh])) {
          fail(a1, "multiplication tensor shape for (" + std::to_string(g) + "," + std::to_string(h) + ")");
          shapes_ok = false;
        }
      }
  }

  // Axiom 5 (carrier of adjoints) and involution shapes.
  auto& a5 = rep.axioms[4];
  a5.evaluated = true;
  if (shapes_ok)
    for (Element g = 0; g < n; ++g) {
      const auto& s = B.star[g];
      const Element gi = G.inverse(g);
      if (s.target != gi)
        fail(a5, "A_" + std::to_string(g) + "^* declared over " + std::to_string(s.target) + ", expected " +
                     std::to_string(gi));
      if (s.anti.rows() != B.dim[gi] || s.anti.cols() != B.dim[g] ||
          (!s.linear.empty() && (s.linear.rows() != B.dim[gi] || s.linear.cols() != B.dim[g]))) {
        fail(a5, "involution shape over " + std::to_string(g));
        shapes_ok = false;
      }
    }
  if (!shapes_ok) return rep;  // remaining checks need consistent shapes

  auto mul = [&](Element g, Element h, std::span<const Complex> a, std::span<const Complex> b) {
    return multiply_coords(B, g, h, a, b);
  };
  auto st = [&](Element g, std::span<const Complex> a) { return star_coords(B, g, a); };
  auto basis = [&](Element g, std::size_t i) {
    Vector v(B.dim[g]);
    v[i] = 1.0;
    return v;
  };

  std::vector<std::pair<Element, Element>> pairs;
  for (Element g = 0; g < n; ++g)
    for (Element h = 0; h < n; ++h)
      if (G.composable(g, h)) pairs.emplace_back(g, h);

  // Axiom 2: bilinearity, on basis elements with complex scalars and on samples.
  auto& a2 = rep.axioms[1];
  a2.evaluated = true;
  for (auto [g, h] : pairs) {
    const Vector za(B.dim[g]), zb(B.dim[h]);
    const Vector z0 = mul(g, h, za, zb);
    if (!close(z0, Vector(z0.size()))) {
      fail(a2, "m(0,0) != 0 on " + detail::pair_str(g, 0, h, 0));
      continue;
    }
    for (std::size_t t = 0; t < 4 && a2.pass; ++t) {
      const Vector a = detail::random_coords(B.dim[g], rng), a2v = detail::random_coords(B.dim[g], rng);
      const Vector b = detail::random_coords(B.dim[h], rng), b2v = detail::random_coords(B.dim[h], rng);
      const Complex lam(0.3, -1.7);
      Vector comb_a(a.size()), comb_b(b.size());
      for (std::size_t i = 0; i < a.size(); ++i) comb_a[i] = lam * a[i] + a2v[i];
      for (std::size_t j = 0; j < b.size(); ++j) comb_b[j] = lam * b[j] + b2v[j];
      const Vector lhs1 = mul(g, h, comb_a, b);
      Vector rhs1 = mul(g, h, a, b), r1b = mul(g, h, a2v, b);
      for (std::size_t k = 0; k < rhs1.size(); ++k) rhs1[k] = lam * rhs1[k] + r1b[k];
      const Vector lhs2 = mul(g, h, a, comb_b);
      Vector rhs2 = mul(g, h, a, b), r2b = mul(g, h, a, b2v);
      for (std::size_t k = 0; k < rhs2.size(); ++k) rhs2[k] = lam * rhs2[k] + r2b[k];
      if (!close(lhs1, rhs1) || !close(lhs2, rhs2)) fail(a2, "bilinearity on (" + std::to_string(g) + "," +
                                                             std::to_string(h) + ")");
    }
  }

  // Axiom 3: associativity on all basis triples over composable triples.
  auto& a3 = rep.axioms[2];
  a3.evaluated = true;
  for (auto [g, h] : pairs) {
    const Element gh = *G.compose(g, h);
    for (Element k = 0; k < n; ++k) {
      if (!G.composable(h, k)) continue;
      const Element hk = *G.compose(h, k);
      for (std::size_t i = 0; i < B.dim[g]; ++i)
        for (std::size_t j = 0; j < B.dim[h]; ++j) {
          const Vector ab = mul(g, h, basis(g, i), basis(h, j));
          for (std::size_t l = 0; l < B.dim[k]; ++l) {
            const Vector c = basis(k, l);
            const Vector lhs = mul(gh, k, ab, c);
            const Vector rhs = mul(g, hk, basis(g, i), mul(h, k, basis(h, j), c));
            if (!close(lhs, rhs))
              fail(a3, "(" + std::to_string(g) + ":" + std::to_string(i) + "," + std::to_string(h) + ":" +
                           std::to_string(j) + "," + std::to_string(k) + ":" + std::to_string(l) + ")");
          }
        }
    }
  }

  auto norm_sq = [&](Element g, const Vector& a) {
    return detail::norm_squared_via_source(B, {g, a}, ntol);
  };

  // Axiom 4: ||ab|| <= ||a|| ||b||.
  auto& a4 = rep.axioms[3];
  a4.evaluated = true;
  a4.sampled = true;
  auto check4 = [&](Element g, Element h, const Vector& a, const Vector& b, const std::string& w) {
    const Element gh = *G.compose(g, h);
    const double lhs = std::sqrt(std::max(0.0, norm_sq(gh, mul(g, h, a, b))));
    const double rhs = std::sqrt(std::max(0.0, norm_sq(g, a))) * std::sqrt(std::max(0.0, norm_sq(h, b)));
    if (lhs > rhs + tol * (1.0 + rhs)) fail(a4, w);
  };
  for (auto [g, h] : pairs)
    for (std::size_t i = 0; i < B.dim[g]; ++i)
      for (std::size_t j = 0; j < B.dim[h]; ++j) check4(g, h, basis(g, i), basis(h, j), detail::pair_str(g, i, h, j));
  if (!pairs.empty())
    for (std::size_t t = 0; t < samples; ++t) {
      auto [g, h] = pairs[rng() % pairs.size()];
      check4(g, h, detail::random_coords(B.dim[g], rng), detail::random_coords(B.dim[h], rng),
             "sample " + std::to_string(t) + " on (" + std::to_string(g) + "," + std::to_string(h) + ")");
    }

  // Axiom 6: conjugate linearity of the involution.
  auto& a6 = rep.axioms[5];
  a6.evaluated = true;
  const Complex im(0.0, 1.0);
  for (Element g = 0; g < n; ++g)
    for (std::size_t i = 0; i < B.dim[g]; ++i) {
      Vector ie = basis(g, i);
      ie[i] = im;
      Vector expect = st(g, basis(g, i));
      for (auto& z : expect) z *= -im;
      if (!close(st(g, ie), expect)) fail(a6, "(i e)^* != -i e^* for " + std::to_string(g) + ":" + std::to_string(i));
      if (!close(st(g, Vector(B.dim[g])), Vector(B.dim[G.inverse(g)])))
        fail(a6, "0^* != 0 over " + std::to_string(g));
    }

  // Axiom 7: (a*)* = a.
  auto& a7 = rep.axioms[6];
  a7.evaluated = true;
  for (Element g = 0; g < n; ++g)
    for (std::size_t i = 0; i < B.dim[g]; ++i)
      if (!close(st(G.inverse(g), st(g, basis(g, i))), basis(g, i)))
        fail(a7, "(e^*)^* != e for " + std::to_string(g) + ":" + std::to_string(i));

  // Axiom 8: (ab)* = b* a*.
  auto& a8 = rep.axioms[7];
  a8.evaluated = true;
  for (auto [g, h] : pairs) {
    const Element gh = *G.compose(g, h);
    for (std::size_t i = 0; i < B.dim[g]; ++i)
      for (std::size_t j = 0; j < B.dim[h]; ++j) {
        const Vector lhs = st(gh, mul(g, h, basis(g, i), basis(h, j)));
        const Vector rhs = mul(G.inverse(h), G.inverse(g), st(h, basis(h, j)), st(g, basis(g, i)));
        if (!close(lhs, rhs)) fail(a8, detail::pair_str(g, i, h, j));
      }
  }

  // Axioms 9 and 10 share the element set: basis, pairwise Gram combinations, samples.
  std::vector<std::pair<Element, Vector>> elems;
  for (Element g = 0; g < n; ++g) {
    for (std::size_t i = 0; i < B.dim[g]; ++i) {
      elems.emplace_back(g, basis(g, i));
      for (std::size_t j = i + 1; j < B.dim[g]; ++j) {
        Vector p = basis(g, i), q = basis(g, i);
        p[j] = 1.0;
        q[j] = im;
        elems.emplace_back(g, p);
        elems.emplace_back(g, q);
      }
    }
  }
  std::vector<Element> nonzero;
  for (Element g = 0; g < n; ++g)
    if (B.dim[g] > 0) nonzero.push_back(g);
  if (!nonzero.empty())
    for (std::size_t t = 0; t < samples; ++t) {
      const Element g = nonzero[rng() % nonzero.size()];
      elems.emplace_back(g, detail::random_coords(B.dim[g], rng));
    }

  auto& a9 = rep.axioms[8];
  auto& a10 = rep.axioms[9];
  a9.evaluated = a10.evaluated = true;
  a9.sampled = a10.sampled = true;
  for (const auto& [g, a] : elems) {
    const Element gi = G.inverse(g);
    const Vector as = st(g, a);
    const Vector left = mul(gi, g, as, a);   // a* a over s(g)
    const Vector right = mul(g, gi, a, as);  // a a* over r(g)
    const Matrix lm = unit_matrix(B, G.source(g), left);
    const Matrix rm = unit_matrix(B, G.range(g), right);
    const double nl = operator_norm(lm, ntol), nr = operator_norm(rm, ntol);
    std::ostringstream w;
    w << "element over " << g;
    if (G.is_unit(g)) {
      const double na = operator_norm(unit_matrix(B, g, a), ntol);
      const double na2 = na * na;
      if (std::abs(nl - na2) > tol * (1.0 + na2) || std::abs(nr - na2) > tol * (1.0 + na2))
        fail(a9, w.str() + ": ||a*a||=" + std::to_string(nl) + " ||aa*||=" + std::to_string(nr) +
                     " ||a||^2=" + std::to_string(na2));
    } else if (std::abs(nl - nr) > tol * (1.0 + std::max(nl, nr))) {
      fail(a9, w.str() + ": ||a*a||=" + std::to_string(nl) + " ||aa*||=" + std::to_string(nr));
    }
    if (!is_positive(lm, tol * (1.0 + lm.max_abs()))) fail(a10, w.str() + ": a*a is not positive");
  }

  // Unit fibers: the tensors must reproduce the concrete matrix algebra.
  for (auto u : G.units()) {
    const auto& alg = B.unit_algebra(u);
    for (std::size_t i = 0; i < alg.dim(); ++i) {
      if (!close(st(u, basis(u, i)), alg.star_coords(i)))
        rep.unit_fibers.add("unit_fiber", "involution of basis " + std::to_string(i) + " over unit " + std::to_string(u));
      for (std::size_t j = 0; j < alg.dim(); ++j)
        if (!close(mul(u, u, basis(u, i), basis(u, j)), alg.product_coords(i, j)))
          rep.unit_fibers.add("unit_fiber", "product " + detail::pair_str(u, i, u, j));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Saturation

struct SaturationResult {
  bool saturated = true;
  std::optional<std::pair<Element, Element>> witness;  // first pair with A_g A_h not spanning A_gh
  std::size_t rank = 0;
  std::size_t target_dim = 0;
};

/// A_g . A_h spans A_{gh} for every composable pair, tested by the rank of
/// the basis products.
inline SaturationResult is_saturated(const FellBundle& B, double tol = 1e-9) {
  const auto& G = B.groupoid;
  for (Element g = 0; g < G.size(); ++g)
    for (Element h = 0; h < G.size(); ++h) {
      if (!G.composable(g, h)) continue;
      const Element gh = *G.compose(g, h);
      const std::size_t d = B.dim[gh];
      if (d == 0) continue;
      std::vector<Vector> prods;
      for (std::size_t i = 0; i < B.dim[g]; ++i)
        for (std::size_t j = 0; j < B.dim[h]; ++j) {
          Vector a(B.dim[g]), b(B.dim[h]);
          a[i] = 1.0;
          b[j] = 1.0;
          prods.push_back(multiply_coords(B, g, h, a, b));
        }
      const std::size_t r = numerical_rank(prods, tol);
      if (r < d) return {false, std::make_pair(g, h), r, d};
    }
  return {};
}

}  // namespace fell
