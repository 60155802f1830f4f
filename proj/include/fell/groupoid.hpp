#pragma once

// Finite groupoids given by a composition table, and the inverse semigroup
// of their bisections.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fell/config.hpp"
#include "fell/report.hpp"

namespace fell {

using Element = std::size_t;

class FiniteGroupoid {
 public:
  static constexpr Element undefined = static_cast<Element>(-1);

  FiniteGroupoid() = default;

  /// Extensional constructor. `compose_triples` lists (g, h, gh); the table
  /// is undefined everywhere else. Shapes are checked here; the groupoid
  /// laws are checked by validate_groupoid.
  FiniteGroupoid(std::size_t n, std::vector<Element> units, std::vector<Element> range, std::vector<Element> source,
                 std::vector<Element> inverse, const std::vector<std::array<Element, 3>>& compose_triples)
      : n_(n), units_(std::move(units)), range_(std::move(range)), source_(std::move(source)),
        inverse_(std::move(inverse)), table_(n * n, undefined), is_unit_(n, false) {
    if (range_.size() != n || source_.size() != n || inverse_.size() != n)
      throw InvalidArgument("FiniteGroupoid: range/source/inverse arrays must have one entry per element");
    for (auto u : units_) {
      check(u);
      if (is_unit_[u]) throw InvalidArgument("FiniteGroupoid: unit listed twice");
      is_unit_[u] = true;
    }
    std::sort(units_.begin(), units_.end());
    for (Element g = 0; g < n; ++g) {
      check(range_[g]);
      check(source_[g]);
      check(inverse_[g]);
    }
    for (const auto& [g, h, gh] : compose_triples) {
      check(g);
      check(h);
      check(gh);
      if (table_[g * n + h] != undefined) throw InvalidArgument("FiniteGroupoid: duplicate composition entry");
      table_[g * n + h] = gh;
    }
  }

  std::size_t size() const { return n_; }
  const std::vector<Element>& units() const { return units_; }
  bool is_unit(Element g) const { return is_unit_.at(g); }
  Element range(Element g) const { return range_.at(check(g)); }
  Element source(Element g) const { return source_.at(check(g)); }
  Element inverse(Element g) const { return inverse_.at(check(g)); }

  bool composable(Element g, Element h) const { return source(g) == range(h); }

  /// Table entry for (g, h); nullopt when the pair is not composable.
  std::optional<Element> compose(Element g, Element h) const {
    check(g);
    check(h);
    const Element r = table_[g * n_ + h];
    if (r == undefined) return std::nullopt;
    return r;
  }

  /// Raw table entry, `undefined` when absent. Does not consult r/s.
  Element table(Element g, Element h) const { return table_[check(g) * n_ + check(h)]; }

  std::vector<std::array<Element, 3>> compose_triples() const {
    std::vector<std::array<Element, 3>> out;
    for (Element g = 0; g < n_; ++g)
      for (Element h = 0; h < n_; ++h)
        if (table_[g * n_ + h] != undefined) out.push_back({g, h, table_[g * n_ + h]});
    return out;
  }

  /// Overwrites one table entry. Intended for building counterexamples.
  void set_table(Element g, Element h, Element gh) { table_[check(g) * n_ + check(h)] = gh; }

  const std::vector<Element>& range_map() const { return range_; }
  const std::vector<Element>& source_map() const { return source_; }
  const std::vector<Element>& inverse_map() const { return inverse_; }

 private:
  Element check(Element g) const {
    if (g >= n_) throw InvalidArgument("FiniteGroupoid: element index " + std::to_string(g) + " out of range");
    return g;
  }

  std::size_t n_ = 0;
  std::vector<Element> units_;
  std::vector<Element> range_, source_, inverse_;
  std::vector<Element> table_;
  std::vector<bool> is_unit_;
};

namespace detail {
inline std::string triple(Element a, Element b, Element c) {
  std::ostringstream os;
  os << "(" << a << "," << b << "," << c << ")";
  return os.str();
}
}  // namespace detail

/// Empty report iff every groupoid law holds. Each finding names the law and
/// a witness.
inline Report validate_groupoid(const FiniteGroupoid& G) {
  Report rep;
  const std::size_t n = G.size();
  for (Element g = 0; g < n; ++g) {
    if (!G.is_unit(G.range(g))) rep.add("range_is_unit", "element " + std::to_string(g));
    if (!G.is_unit(G.source(g))) rep.add("source_is_unit", "element " + std::to_string(g));
  }
  for (auto u : G.units()) {
    if (G.range(u) != u || G.source(u) != u) rep.add("unit_range_source", "unit " + std::to_string(u));
    if (G.inverse(u) != u) rep.add("unit_inverse", "unit " + std::to_string(u));
  }
  if (!rep.ok()) return rep;

  for (Element g = 0; g < n; ++g)
    for (Element h = 0; h < n; ++h) {
      const Element gh = G.table(g, h);
      const bool defined = gh != FiniteGroupoid::undefined;
      if (defined != G.composable(g, h)) {
        rep.add("composable_domain", detail::triple(g, h, gh));
        continue;
      }
      if (!defined) continue;
      if (G.range(gh) != G.range(g) || G.source(gh) != G.source(h))
        rep.add("range_source_of_product", detail::triple(g, h, gh));
    }
  if (!rep.ok()) return rep;

  for (Element g = 0; g < n; ++g) {
    const Element gi = G.inverse(g);
    if (G.inverse(gi) != g) rep.add("inverse_involutive", "element " + std::to_string(g));
    const auto a = G.compose(g, gi);
    const auto b = G.compose(gi, g);
    if (!a || *a != G.range(g))
      rep.add("inverse_law", detail::triple(g, gi, a.value_or(FiniteGroupoid::undefined)));
    if (!b || *b != G.source(g))
      rep.add("inverse_law", detail::triple(gi, g, b.value_or(FiniteGroupoid::undefined)));
    const auto left = G.compose(G.range(g), g);
    const auto right = G.compose(g, G.source(g));
    if (!left || *left != g) rep.add("unit_law", detail::triple(G.range(g), g, left.value_or(FiniteGroupoid::undefined)));
    if (!right || *right != g)
      rep.add("unit_law", detail::triple(g, G.source(g), right.value_or(FiniteGroupoid::undefined)));
  }

  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b) {
      const auto ab = G.compose(a, b);
      if (!ab) continue;
      for (Element c = 0; c < n; ++c) {
        const auto bc = G.compose(b, c);
        if (!bc) continue;
        const auto l = G.compose(*ab, c);
        const auto r = G.compose(a, *bc);
        if (!l || !r || *l != *r) rep.add("associativity", detail::triple(a, b, c));
      }
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Standard constructions

inline FiniteGroupoid trivial_group() { return FiniteGroupoid(1, {0}, {0}, {0}, {0}, {{0, 0, 0}}); }

/// Group from a Cayley table, identity at index 0.
inline FiniteGroupoid group_from_table(const std::vector<std::vector<Element>>& mult) {
  const std::size_t n = mult.size();
  std::vector<Element> inv(n, 0);
  std::vector<std::array<Element, 3>> triples;
  for (Element g = 0; g < n; ++g)
    for (Element h = 0; h < n; ++h) {
      triples.push_back({g, h, mult[g][h]});
      if (mult[g][h] == 0) inv[g] = h;
    }
  return FiniteGroupoid(n, {0}, std::vector<Element>(n, 0), std::vector<Element>(n, 0), inv, triples);
}

/// Z/m with element k standing for g^k.
inline FiniteGroupoid cyclic_group(std::size_t m) {
  if (m == 0) throw InvalidArgument("cyclic_group: order must be positive");
  std::vector<std::vector<Element>> t(m, std::vector<Element>(m));
  for (Element a = 0; a < m; ++a)
    for (Element b = 0; b < m; ++b) t[a][b] = (a + b) % m;
  return group_from_table(t);
}

/// Pair groupoid on {0..n-1}: element (i,j) has index i*n + j and
/// (i,j)(j,k) = (i,k).
inline FiniteGroupoid pair_groupoid(std::size_t n) {
  if (n == 0) throw InvalidArgument("pair_groupoid: need at least one point");
  const std::size_t N = n * n;
  std::vector<Element> units, r(N), s(N), inv(N);
  std::vector<std::array<Element, 3>> triples;
  for (Element i = 0; i < n; ++i) {
    units.push_back(i * n + i);
    for (Element j = 0; j < n; ++j) {
      r[i * n + j] = i * n + i;
      s[i * n + j] = j * n + j;
      inv[i * n + j] = j * n + i;
      for (Element k = 0; k < n; ++k) triples.push_back({i * n + j, j * n + k, i * n + k});
    }
  }
  return FiniteGroupoid(N, units, r, s, inv, triples);
}

inline Element pair_element(std::size_t n, std::size_t i, std::size_t j) { return i * n + j; }

/// Disjoint union; elements of `b` are shifted by a.size().
inline FiniteGroupoid disjoint_union(const FiniteGroupoid& a, const FiniteGroupoid& b) {
  const std::size_t na = a.size(), n = a.size() + b.size();
  std::vector<Element> units = a.units(), r = a.range_map(), s = a.source_map(), inv = a.inverse_map();
  for (auto u : b.units()) units.push_back(u + na);
  for (Element g = 0; g < b.size(); ++g) {
    r.push_back(b.range(g) + na);
    s.push_back(b.source(g) + na);
    inv.push_back(b.inverse(g) + na);
  }
  auto triples = a.compose_triples();
  for (auto t : b.compose_triples()) triples.push_back({t[0] + na, t[1] + na, t[2] + na});
  return FiniteGroupoid(n, units, r, s, inv, triples);
}

/// Direct product; element (g, h) has index g * b.size() + h.
inline FiniteGroupoid product(const FiniteGroupoid& a, const FiniteGroupoid& b) {
  const std::size_t nb = b.size(), n = a.size() * nb;
  auto idx = [nb](Element g, Element h) { return g * nb + h; };
  std::vector<Element> units, r(n), s(n), inv(n);
  for (auto u : a.units())
    for (auto v : b.units()) units.push_back(idx(u, v));
  for (Element g = 0; g < a.size(); ++g)
    for (Element h = 0; h < nb; ++h) {
      r[idx(g, h)] = idx(a.range(g), b.range(h));
      s[idx(g, h)] = idx(a.source(g), b.source(h));
      inv[idx(g, h)] = idx(a.inverse(g), b.inverse(h));
    }
  std::vector<std::array<Element, 3>> triples;
  for (auto ta : a.compose_triples())
    for (auto tb : b.compose_triples()) triples.push_back({idx(ta[0], tb[0]), idx(ta[1], tb[1]), idx(ta[2], tb[2])});
  return FiniteGroupoid(n, units, r, s, inv, triples);
}

// ---------------------------------------------------------------------------
// Bisections

/// A subset on which range and source are injective. Elements kept sorted.
class Bisection {
 public:
  Bisection() = default;

  const std::vector<Element>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  bool contains(Element g) const { return std::binary_search(elements_.begin(), elements_.end(), g); }

  friend bool operator==(const Bisection&, const Bisection&) = default;

 private:
  explicit Bisection(std::vector<Element> e) : elements_(std::move(e)) {}
  friend Bisection make_bisection(const FiniteGroupoid&, std::vector<Element>);
  friend Bisection assume_bisection(std::vector<Element>);
  std::vector<Element> elements_;
};

inline std::vector<Element> normalize_subset(std::vector<Element> s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline bool is_bisection(const FiniteGroupoid& G, const std::vector<Element>& subset) {
  std::set<Element> rs, ss;
  for (auto g : normalize_subset(subset)) {
    if (!rs.insert(G.range(g)).second) return false;
    if (!ss.insert(G.source(g)).second) return false;
  }
  return true;
}

inline Bisection make_bisection(const FiniteGroupoid& G, std::vector<Element> subset) {
  subset = normalize_subset(std::move(subset));
  if (!is_bisection(G, subset)) throw InvalidArgument("make_bisection: range or source is not injective on subset");
  return Bisection(std::move(subset));
}

/// Wraps a subset the caller already knows to be a bisection.
inline Bisection assume_bisection(std::vector<Element> s) { return Bisection(normalize_subset(std::move(s))); }

/// UV = { uv : (u,v) composable }. The result is re-checked to be a
/// bisection rather than trusted.
inline Bisection bisection_product(const FiniteGroupoid& G, const Bisection& U, const Bisection& V) {
  std::vector<Element> out;
  for (auto u : U.elements())
    for (auto v : V.elements())
      if (auto uv = G.compose(u, v)) out.push_back(*uv);
  out = normalize_subset(std::move(out));
  if (!is_bisection(G, out))
    throw InternalInconsistency("bisection_product: product of the given sets is not a bisection");
  return assume_bisection(std::move(out));
}

inline Bisection bisection_inverse(const FiniteGroupoid& G, const Bisection& U) {
  std::vector<Element> out;
  for (auto u : U.elements()) out.push_back(G.inverse(u));
  return assume_bisection(std::move(out));
}

/// r(U) as a subset of units.
inline Bisection bisection_range(const FiniteGroupoid& G, const Bisection& U) {
  std::vector<Element> out;
  for (auto u : U.elements()) out.push_back(G.range(u));
  return assume_bisection(std::move(out));
}

inline Bisection bisection_source(const FiniteGroupoid& G, const Bisection& U) {
  std::vector<Element> out;
  for (auto u : U.elements()) out.push_back(G.source(u));
  return assume_bisection(std::move(out));
}

inline std::vector<Bisection> singleton_cover(const FiniteGroupoid& G) {
  std::vector<Bisection> out;
  for (Element g = 0; g < G.size(); ++g) out.push_back(assume_bisection({g}));
  return out;
}

/// Every bisection of G, by brute-force subset enumeration (n <= 16).
inline std::vector<Bisection> all_bisections(const FiniteGroupoid& G) {
  if (G.size() > 16) throw InvalidArgument("all_bisections: groupoid too large to enumerate");
  std::vector<Bisection> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << G.size()); ++mask) {
    std::vector<Element> s;
    for (Element g = 0; g < G.size(); ++g)
      if (mask & (std::size_t{1} << g)) s.push_back(g);
    if (is_bisection(G, s)) out.push_back(assume_bisection(std::move(s)));
  }
  return out;
}

}  // namespace fell
