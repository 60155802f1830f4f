#pragma once

// Named example bundles: line bundles, unit bundles, linking bundles and
// partial-action bundles at small sizes.

#include <algorithm>
#include <charconv>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fell/constructors.hpp"
#include "fell/convalg.hpp"

namespace fell::gallery {

/// Arguments of the form `word` or `key=value`.
struct Params {
  std::vector<std::string> words;
  std::map<std::string, std::string> values;

  static Params parse(const std::vector<std::string>& args) {
    Params p;
    for (const auto& a : args) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) {
        p.words.push_back(a);
      } else {
        const std::string key = a.substr(0, eq);
        if (key.empty() || p.values.count(key)) throw InvalidArgument("bad or repeated parameter '" + a + "'");
        p.values[key] = a.substr(eq + 1);
      }
    }
    return p;
  }

  void allow(std::initializer_list<const char*> keys, std::size_t max_words) const {
    for (const auto& [k, v] : values)
      if (std::none_of(keys.begin(), keys.end(), [&k](const char* a) { return k == a; }))
        throw InvalidArgument("unknown parameter '" + k + "'");
    if (words.size() > max_words) throw InvalidArgument("unexpected argument '" + words[max_words] + "'");
  }

  std::size_t number(const std::string& key, std::size_t fallback, std::size_t lo, std::size_t hi) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    return parse_size(it->second, key, lo, hi);
  }

  static std::size_t parse_size(std::string_view s, const std::string& what, std::size_t lo, std::size_t hi) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v < lo || v > hi)
      throw InvalidArgument(what + " must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "], got '" + std::string(s) + "'");
    return v;
  }
};

/// `trivial`, `z<m>`, or `pair` (with n=).
inline FiniteGroupoid base_groupoid(const std::string& word, const Params& p) {
  if (word == "trivial") return trivial_group();
  if (word == "pair") return pair_groupoid(p.number("n", 2, 1, 8));
  if (word.size() > 1 && word[0] == 'z') return cyclic_group(Params::parse_size(word.substr(1), "cyclic order", 1, 32));
  throw InvalidArgument("unknown base groupoid '" + word + "' (expected trivial, z<m> or pair)");
}

/// `C`, `C2`, `M2`, `M<k>`, or a block list such as `1,2`.
inline MatrixStarAlgebra named_algebra(const std::string& name) {
  if (name == "C") return MatrixStarAlgebra::scalars();
  if (name.size() > 1 && name[0] == 'C')
    return MatrixStarAlgebra::from_blocks(
        std::vector<std::size_t>(Params::parse_size(name.substr(1), "fiber", 1, 8), 1));
  if (name.size() > 1 && name[0] == 'M') return MatrixStarAlgebra::full(Params::parse_size(name.substr(1), "fiber", 1, 6));
  std::vector<std::size_t> blocks;
  std::size_t start = 0;
  while (start <= name.size()) {
    const auto comma = name.find(',', start);
    const auto end = comma == std::string::npos ? name.size() : comma;
    blocks.push_back(Params::parse_size(std::string_view(name).substr(start, end - start), "block size", 1, 6));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return MatrixStarAlgebra::from_blocks(blocks);
}

inline FellBundle trivial(const Params& p) {
  p.allow({"n"}, 1);
  const std::string base = p.words.empty() ? "trivial" : p.words.front();
  return build_trivial_line_bundle(base_groupoid(base, p));
}

inline FellBundle pair(const Params& p) {
  p.allow({"n", "fiber"}, 0);
  const auto G = pair_groupoid(p.number("n", 2, 1, 8));
  auto it = p.values.find("fiber");
  return build_constant_fiber_bundle(G, named_algebra(it == p.values.end() ? "C" : it->second));
}

inline FellBundle unitbundle(const Params& p) {
  p.allow({"n", "fiber"}, 1);
  const std::string base = p.words.empty() ? "pair" : p.words.front();
  const auto G = base_groupoid(base, p);
  auto it = p.values.find("fiber");
  const auto A = named_algebra(it == p.values.end() ? "C" : it->second);
  return build_unit_bundle(G, std::vector<MatrixStarAlgebra>(G.units().size(), A));
}

inline std::vector<Matrix> matrix_units(std::size_t rows, std::size_t cols) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      Matrix e(rows, cols);
      e(i, j) = 1.0;
      out.push_back(std::move(e));
    }
  return out;
}

/// A = M_p, B = M_q, X = all p x q matrices.
inline FellBundle linking(std::size_t p, std::size_t q) {
  return build_linking_bundle(MatrixStarAlgebra::full(p), MatrixStarAlgebra::full(q), {matrix_units(p, q)});
}

inline FellBundle linking(const Params& p) {
  p.allow({"p", "q"}, 0);
  return linking(p.number("p", 1, 1, 4), p.number("q", 1, 1, 4));
}

/// The block matrix [[f(0,0), f(0,1)], [f(1,0), f(1,1)]] of a section of
/// linking(p, q).
inline Matrix linking_block_matrix(const Section& f, std::size_t p, std::size_t q) {
  Matrix out(p + q, p + q);
  auto place = [&](Element g, std::size_t r0, std::size_t c0, const std::vector<Matrix>& basis) {
    const Vector& c = f.at(g);
    Matrix m(basis.front().rows(), basis.front().cols());
    for (std::size_t k = 0; k < c.size(); ++k) m += basis[k] * c[k];
    out.set_block(r0, c0, m);
  };
  std::vector<Matrix> xstar;
  for (const auto& x : matrix_units(p, q)) xstar.push_back(x.adjoint());
  place(pair_element(2, 0, 0), 0, 0, matrix_units(p, p));
  place(pair_element(2, 0, 1), 0, p, matrix_units(p, q));
  place(pair_element(2, 1, 0), p, 0, xstar);
  place(pair_element(2, 1, 1), p, p, matrix_units(q, q));
  return out;
}

/// Sub-*-algebra of the diagonal algebra C^n spanned by the listed
/// diagonal positions.
inline MatrixStarAlgebra diagonal_ideal(std::size_t n, const std::vector<std::size_t>& positions) {
  std::vector<Matrix> basis;
  for (auto k : positions) {
    Matrix e(n, n);
    e(k, k) = 1.0;
    basis.push_back(std::move(e));
  }
  return MatrixStarAlgebra(n, std::move(basis), std::vector<std::size_t>(positions.size(), 1));
}

/// Z/2 acting on C^2 = diag(2):
///   halved: D_g = C + 0, theta_g = id
///   global: D_g = C^2, theta_g = id
///   swap:   D_g = C^2, theta_g exchanges the coordinates
/// and Z/m acting on C with D_g = 0 for g != e (`z<m>-degenerate`).
inline PartialAction partial_action(const std::string& name) {
  PartialAction pa;
  if (name == "z2-halved" || name == "z2-global" || name == "z2-swap") {
    pa.group = cyclic_group(2);
    pa.algebra = MatrixStarAlgebra::from_blocks({1, 1});
    const bool halved = name == "z2-halved";
    pa.ideals = {diagonal_ideal(2, {0, 1}), halved ? diagonal_ideal(2, {0}) : diagonal_ideal(2, {0, 1})};
    pa.theta = {Matrix::identity(2), halved ? Matrix::identity(1)
                                     : name == "z2-swap" ? Matrix{{0, 1}, {1, 0}}
                                                         : Matrix::identity(2)};
    return pa;
  }
  const std::string suffix = "-degenerate";
  if (name.size() > 1 + suffix.size() && name[0] == 'z' && name.ends_with(suffix)) {
    const std::size_t m =
        Params::parse_size(name.substr(1, name.size() - 1 - suffix.size()), "cyclic order", 1, 32);
    pa.group = cyclic_group(m);
    pa.algebra = MatrixStarAlgebra::scalars();
    pa.ideals.push_back(MatrixStarAlgebra::scalars());
    pa.theta.push_back(Matrix::identity(1));
    for (std::size_t g = 1; g < m; ++g) {
      pa.ideals.push_back(MatrixStarAlgebra(1, {}, {}));
      pa.theta.push_back(Matrix(0, 0));
    }
    return pa;
  }
  throw InvalidArgument("unknown partial action '" + name + "' (expected z2-halved, z2-global, z2-swap, z<m>-degenerate)");
}

inline FellBundle partial(const Params& p) {
  p.allow({}, 1);
  if (p.words.size() != 1) throw InvalidArgument("partial: expected exactly one action name");
  return build_partial_action_bundle(partial_action(p.words.front()));
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"trivial", "pair", "unitbundle", "linking", "partial"};
  return n;
}

inline FellBundle build(const std::string& name, const std::vector<std::string>& args) {
  const auto p = Params::parse(args);
  if (name == "trivial") return trivial(p);
  if (name == "pair") return pair(p);
  if (name == "unitbundle") return unitbundle(p);
  if (name == "linking") return linking(p);
  if (name == "partial") return partial(p);
  throw InvalidArgument("unknown example '" + name + "' (expected trivial, pair, unitbundle, linking, partial)");
}

}  // namespace fell::gallery
