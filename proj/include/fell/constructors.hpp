#pragma once

// Builders for the standard Fell bundles: trivial line bundles, bundles
// concentrated on the unit space, linking bundles of Hilbert bimodules and
// bundles of partial group actions.

#include <string>
#include <vector>

#include "fell/bundle.hpp"

namespace fell {

/// A bundle realized inside matrices: the fiber over g is a subspace of
/// n_{r(g)} x n_{s(g)} matrices, multiplication is the matrix product and the
/// involution is the conjugate transpose. Products and adjoints must land
/// back in the declared fibers.
struct ConcreteModel {
  FiniteGroupoid groupoid;
  std::vector<std::optional<MatrixStarAlgebra>> unit_fiber;  // per element, set on units
  std::vector<std::vector<Matrix>> arrow_basis;              // per element; ignored on units
};

namespace detail {

inline Vector project_rect(const std::vector<Matrix>& basis, const ColumnSpace& space, const Matrix& m,
                           const Tolerances& tol, const std::string& what) {
  if (basis.empty()) {
    if (m.frobenius_norm() > tol.membership) throw InvalidArgument(what + ": product leaves its fiber (fiber is zero)");
    return {};
  }
  auto ls = space.solve(vec(m));
  if (ls.residual > tol.membership * (1.0 + m.frobenius_norm()))
    throw InvalidArgument(what + ": residual " + std::to_string(ls.residual));
  return ls.coeffs;
}

}  // namespace detail

inline FellBundle build_concrete_bundle(const ConcreteModel& model, const Tolerances& tol = default_tolerances) {
  const auto& G = model.groupoid;
  const std::size_t n = G.size();
  if (model.unit_fiber.size() != n || model.arrow_basis.size() != n)
    throw InvalidArgument("build_concrete_bundle: per-element arrays have wrong length");

  std::vector<std::vector<Matrix>> basis(n);
  for (Element g = 0; g < n; ++g) {
    if (G.is_unit(g)) {
      if (!model.unit_fiber[g]) throw InvalidArgument("build_concrete_bundle: unit " + std::to_string(g) + " has no algebra");
      basis[g] = model.unit_fiber[g]->basis();
    } else {
      basis[g] = model.arrow_basis[g];
      const std::size_t rows = model.unit_fiber[G.range(g)]->ambient_dim();
      const std::size_t cols = model.unit_fiber[G.source(g)]->ambient_dim();
      for (const auto& m : basis[g])
        if (m.rows() != rows || m.cols() != cols)
          throw InvalidArgument("build_concrete_bundle: fiber over " + std::to_string(g) + " has wrong matrix shape");
    }
  }
  std::vector<ColumnSpace> spaces(n);
  for (Element g = 0; g < n; ++g) {
    std::vector<Vector> cols;
    for (const auto& m : basis[g]) cols.push_back(vec(m));
    if (numerical_rank(cols, tol.rank) != cols.size())
      throw InvalidArgument("build_concrete_bundle: fiber basis over " + std::to_string(g) + " is dependent");
    if (!cols.empty()) spaces[g] = ColumnSpace(cols);
  }

  FellBundle B;
  B.groupoid = G;
  B.unit_fiber = model.unit_fiber;
  for (Element g = 0; g < n; ++g)
    if (!G.is_unit(g)) B.unit_fiber[g].reset();
  B.dim.resize(n);
  for (Element g = 0; g < n; ++g) B.dim[g] = basis[g].size();

  for (Element g = 0; g < n; ++g)
    for (Element h = 0; h < n; ++h) {
      if (!G.composable(g, h)) continue;
      const auto gh = G.compose(g, h);
      if (!gh) throw InvalidArgument("build_concrete_bundle: groupoid table missing a composable pair");
      MultEntry e;
      e.target = *gh;
      e.coeffs = Tensor3(B.dim[*gh], B.dim[g], B.dim[h]);
      for (std::size_t i = 0; i < B.dim[g]; ++i)
        for (std::size_t j = 0; j < B.dim[h]; ++j) {
          const auto c = detail::project_rect(basis[*gh], spaces[*gh], basis[g][i] * basis[h][j], tol,
                                              "product A_" + std::to_string(g) + " A_" + std::to_string(h));
          for (std::size_t k = 0; k < c.size(); ++k) e.coeffs.at(k, i, j) = c[k];
        }
      B.mult.emplace(std::make_pair(g, h), std::move(e));
    }

  B.star.resize(n);
  for (Element g = 0; g < n; ++g) {
    const Element gi = G.inverse(g);
    StarEntry s;
    s.target = gi;
    s.anti = Matrix(B.dim[gi], B.dim[g]);
    for (std::size_t i = 0; i < B.dim[g]; ++i)
      s.anti.set_col(i, detail::project_rect(basis[gi], spaces[gi], basis[g][i].adjoint(), tol,
                                             "adjoint of A_" + std::to_string(g)));
    B.star[g] = std::move(s);
  }
  return B;
}

/// Every fiber a copy of the algebra D with its own product and adjoint:
/// the bundle whose algebra is C*(G) tensor D.
inline FellBundle build_constant_fiber_bundle(const FiniteGroupoid& G, const MatrixStarAlgebra& D) {
  ConcreteModel m;
  m.groupoid = G;
  m.unit_fiber.resize(G.size());
  m.arrow_basis.resize(G.size());
  for (Element g = 0; g < G.size(); ++g) {
    if (G.is_unit(g))
      m.unit_fiber[g] = D;
    else
      m.arrow_basis[g] = D.basis();
  }
  return build_concrete_bundle(m);
}

/// Every fiber C, product of scalars, conjugation as involution.
inline FellBundle build_trivial_line_bundle(const FiniteGroupoid& G) {
  return build_constant_fiber_bundle(G, MatrixStarAlgebra::scalars());
}

/// The given algebras over the units, zero fibers over every other arrow.
inline FellBundle build_unit_bundle(const FiniteGroupoid& G, const std::vector<MatrixStarAlgebra>& fibers) {
  if (fibers.size() != G.units().size()) throw InvalidArgument("build_unit_bundle: need one algebra per unit");
  ConcreteModel m;
  m.groupoid = G;
  m.unit_fiber.resize(G.size());
  m.arrow_basis.resize(G.size());
  for (std::size_t k = 0; k < G.units().size(); ++k) m.unit_fiber[G.units()[k]] = fibers[k];
  return build_concrete_bundle(m);
}

/// Bimodule data for a linking bundle: X is a space of m x n matrices with
/// A acting on the left and B on the right; inner products are
/// <x,y>_B = x* y and _A<x,y> = x y*.
struct RectangularBimodule {
  std::vector<Matrix> basis;
};

/// Bundle over the pair groupoid on {0,1} with fibers A, X, X*, B over
/// (0,0), (0,1), (1,0), (1,1). An element of X* is stored as the n x m
/// matrix y = x*, so x . y = _A<x, y*> = x y and y . x = <y*, x>_B = y x.
inline FellBundle build_linking_bundle(const MatrixStarAlgebra& A, const MatrixStarAlgebra& Bk,
                                       const RectangularBimodule& X) {
  const FiniteGroupoid G = pair_groupoid(2);
  ConcreteModel m;
  m.groupoid = G;
  m.unit_fiber.resize(4);
  m.arrow_basis.resize(4);
  m.unit_fiber[pair_element(2, 0, 0)] = A;
  m.unit_fiber[pair_element(2, 1, 1)] = Bk;
  for (const auto& x : X.basis) {
    if (x.rows() != A.ambient_dim() || x.cols() != Bk.ambient_dim())
      throw InvalidArgument("build_linking_bundle: bimodule matrices have wrong shape");
    m.arrow_basis[pair_element(2, 0, 1)].push_back(x);
    m.arrow_basis[pair_element(2, 1, 0)].push_back(x.adjoint());
  }
  try {
    return build_concrete_bundle(m);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("build_linking_bundle: bimodule compatibility failure: ") + e.what());
  }
}

/// A partial action of a finite group on a matrix *-algebra A: ideals D_g
/// (sub-*-algebras of A in the same ambient space) and *-isomorphisms
/// theta_g: D_{g^-1} -> D_g given on basis coordinates.
struct PartialAction {
  FiniteGroupoid group;
  MatrixStarAlgebra algebra;
  std::vector<MatrixStarAlgebra> ideals;  // indexed by group element
  std::vector<Matrix> theta;              // theta[g] : coords(D_{g^-1}) -> coords(D_g)
};

/// Empty report iff the data is a partial action: D_e = A, theta_e = id,
/// each D_g an ideal, each theta_g a *-isomorphism inverse to theta_{g^-1},
/// and theta_g theta_h = theta_gh wherever the left side is defined.
inline Report validate_partial_action(const PartialAction& pa, const Tolerances& tol = default_tolerances) {
  Report rep;
  const auto& G = pa.group;
  if (G.units().size() != 1) {
    rep.add("group", "acting groupoid must have exactly one unit");
    return rep;
  }
  const Element e = G.units().front();
  const std::size_t n = G.size();
  if (pa.ideals.size() != n || pa.theta.size() != n) {
    rep.add("shape", "need one ideal and one map per group element");
    return rep;
  }
  const std::size_t N = pa.algebra.ambient_dim();
  for (Element g = 0; g < n; ++g) {
    const Element gi = G.inverse(g);
    if (pa.ideals[g].ambient_dim() != N) rep.add("shape", "ideal " + std::to_string(g) + " has wrong ambient size");
    if (pa.theta[g].rows() != pa.ideals[g].dim() || pa.theta[g].cols() != pa.ideals[gi].dim())
      rep.add("shape", "theta_" + std::to_string(g) + " has wrong shape");
  }
  if (!rep.ok()) return rep;

  if (pa.ideals[e].dim() != pa.algebra.dim() ||
      std::any_of(pa.algebra.basis().begin(), pa.algebra.basis().end(),
                  [&](const Matrix& b) { return !pa.ideals[e].contains(b, tol); }))
    rep.add("identity_domain", "D_e != A");
  if (max_abs_diff(pa.theta[e], Matrix::identity(pa.ideals[e].dim())) > tol.structural)
    rep.add("identity_map", "theta_e != id");

  auto theta_apply = [&](Element g, std::span<const Complex> x) { return pa.theta[g] * x; };

  auto is_ideal = [&](const MatrixStarAlgebra& D) {
    for (const auto& a : pa.algebra.basis())
      for (const auto& d : D.basis())
        if (!D.contains(a * d, tol) || !D.contains(d * a, tol)) return false;
    return true;
  };
  for (Element g = 0; g < n; ++g)
    if (!is_ideal(pa.ideals[g])) rep.add("ideal", "D_" + std::to_string(g) + " is not an ideal of A");

  for (Element g = 0; g < n; ++g) {
    const Element gi = G.inverse(g);
    const auto& dom = pa.ideals[gi];
    for (std::size_t i = 0; i < dom.dim(); ++i) {
      Vector ei(dom.dim());
      ei[i] = 1.0;
      if (max_abs_diff(theta_apply(gi, theta_apply(g, ei)), ei) > tol.homomorphism)
        rep.add("inverse_maps", "theta_" + std::to_string(gi) + " theta_" + std::to_string(g) + " != id");
      const Vector adj = dom.star_coords(i);
      const Vector lhs = theta_apply(g, adj);
      Vector img = theta_apply(g, ei);
      const Vector rhs = pa.ideals[g].coords(pa.ideals[g].to_matrix(img).adjoint(), tol);
      if (max_abs_diff(lhs, rhs) > tol.homomorphism)
        rep.add("star_preserving", "theta_" + std::to_string(g) + " on basis " + std::to_string(i));
      for (std::size_t j = 0; j < dom.dim(); ++j) {
        Vector ej(dom.dim());
        ej[j] = 1.0;
        const Matrix prod = pa.ideals[g].to_matrix(theta_apply(g, ei)) * pa.ideals[g].to_matrix(theta_apply(g, ej));
        const Matrix img_prod = pa.ideals[g].to_matrix(theta_apply(g, dom.product_coords(i, j)));
        if (max_abs_diff(prod, img_prod) > tol.homomorphism)
          rep.add("multiplicative", "theta_" + std::to_string(g) + " on basis pair (" + std::to_string(i) + "," +
                                        std::to_string(j) + ")");
      }
    }
  }
  if (!rep.ok()) return rep;

  // theta_g theta_h = theta_gh on {x in D_{h^-1} : theta_h(x) in D_{g^-1}}.
  for (Element g = 0; g < n; ++g)
    for (Element h = 0; h < n; ++h) {
      const Element gi = G.inverse(g), hi = G.inverse(h), gh = *G.compose(g, h), ghi = G.inverse(gh);
      std::vector<Vector> prods;
      for (const auto& p : pa.ideals[h].basis())
        for (const auto& q : pa.ideals[gi].basis()) prods.push_back(vec(p * q));
      const auto meet = span_basis(prods, tol.rank);
      for (const auto& y : meet.orthonormal) {
        const Matrix ym(N, N, y);
        const Vector ycoords_h = pa.ideals[h].coords(ym, tol);
        const Vector x = theta_apply(hi, ycoords_h);  // x in D_{h^-1}
        const Matrix xm = pa.ideals[hi].to_matrix(x);
        if (!pa.ideals[ghi].contains(xm, tol)) {
          rep.add("composition_domain", "g=" + std::to_string(g) + " h=" + std::to_string(h));
          continue;
        }
        const Matrix lhs = pa.ideals[g].to_matrix(theta_apply(g, pa.ideals[gi].coords(ym, tol)));
        const Matrix rhs = pa.ideals[gh].to_matrix(theta_apply(gh, pa.ideals[ghi].coords(xm, tol)));
        if (max_abs_diff(lhs, rhs) > tol.homomorphism)
          rep.add("composition", "g=" + std::to_string(g) + " h=" + std::to_string(h));
      }
    }
  return rep;
}

/// Fell bundle of a partial action: fiber D_g over g, with
/// (a d_g)(b d_h) = theta_g(theta_{g^-1}(a) b) d_gh and
/// (a d_g)* = theta_{g^-1}(a*) d_{g^-1}.
inline FellBundle build_partial_action_bundle(const PartialAction& pa, const Tolerances& tol = default_tolerances) {
  const auto rep = validate_partial_action(pa, tol);
  if (!rep.ok())
    throw InvalidArgument("build_partial_action_bundle: partial-action axiom violated: " + rep.findings.front().check +
                          " (" + rep.findings.front().witness + ")");
  const auto& G = pa.group;
  const std::size_t n = G.size();
  const Element e = G.units().front();

  FellBundle B;
  B.groupoid = G;
  B.unit_fiber.assign(n, std::nullopt);
  B.unit_fiber[e] = pa.algebra;
  B.dim.resize(n);
  for (Element g = 0; g < n; ++g) B.dim[g] = pa.ideals[g].dim();
  // Unit fiber coordinates are taken in A's basis; D_e is re-expressed there.
  auto to_fiber = [&](Element g, const Matrix& m) {
    return g == e ? pa.algebra.coords(m, tol) : pa.ideals[g].coords(m, tol);
  };
  auto fiber_basis = [&](Element g) -> const std::vector<Matrix>& {
    return g == e ? pa.algebra.basis() : pa.ideals[g].basis();
  };

  for (Element g = 0; g < n; ++g)
    for (Element h = 0; h < n; ++h) {
      const Element gi = G.inverse(g), gh = *G.compose(g, h);
      MultEntry me;
      me.target = gh;
      me.coeffs = Tensor3(B.dim[gh], B.dim[g], B.dim[h]);
      for (std::size_t i = 0; i < B.dim[g]; ++i) {
        const Matrix a = fiber_basis(g)[i];
        const Matrix ta = pa.ideals[gi].to_matrix(pa.theta[gi] * pa.ideals[g].coords(a, tol));
        for (std::size_t j = 0; j < B.dim[h]; ++j) {
          const Matrix y = ta * fiber_basis(h)[j];
          const Matrix z = pa.ideals[g].to_matrix(pa.theta[g] * pa.ideals[gi].coords(y, tol));
          const Vector c = to_fiber(gh, z);
          for (std::size_t k = 0; k < c.size(); ++k) me.coeffs.at(k, i, j) = c[k];
        }
      }
      B.mult.emplace(std::make_pair(g, h), std::move(me));
    }

  B.star.resize(n);
  for (Element g = 0; g < n; ++g) {
    const Element gi = G.inverse(g);
    StarEntry s;
    s.target = gi;
    s.anti = Matrix(B.dim[gi], B.dim[g]);
    for (std::size_t i = 0; i < B.dim[g]; ++i) {
      const Matrix adj = fiber_basis(g)[i].adjoint();
      const Matrix img = pa.ideals[gi].to_matrix(pa.theta[gi] * pa.ideals[g].coords(adj, tol));
      s.anti.set_col(i, to_fiber(gi, img));
    }
    B.star[g] = std::move(s);
  }
  return B;
}

}  // namespace fell
