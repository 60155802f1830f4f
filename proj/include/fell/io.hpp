#pragma once

// Bundle documents: a JSON text format for groupoids, bundles, named
// sections and representations. Emission is canonical (sorted keys, fixed
// indentation, 17 significant digits), so parse followed by emit reproduces
// canonical text byte for byte.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fell/bundle.hpp"
#include "fell/convalg.hpp"
#include "fell/reps.hpp"

namespace fell {

/// Syntax errors carry line and column (1-based); semantic errors carry the
/// JSON-pointer path of the offending value.
class ParseError : public InvalidArgument {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : InvalidArgument(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line), column_(column) {}
  ParseError(std::string path, const std::string& msg) : InvalidArgument(path + ": " + msg), path_(std::move(path)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& path() const { return path_; }

 private:
  std::size_t line_ = 0, column_ = 0;
  std::string path_;
};

struct NamedSection {
  std::string name;
  std::vector<Vector> values;  // per element, fiber coordinates
};

struct NamedRepresentation {
  std::string name;
  std::size_t hilbert_dim = 0;
  std::vector<Matrix> images;  // per flat basis index
};

struct BundleDocument {
  FiniteGroupoid groupoid;
  std::optional<FellBundle> bundle;
  std::vector<NamedSection> sections;
  std::vector<NamedRepresentation> representations;

  const NamedSection* find_section(const std::string& name) const {
    for (const auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  }
};

inline Section to_section(const AlgebraRef& alg, const NamedSection& s) {
  Section f(alg);
  for (Element g = 0; g < alg->size(); ++g) f.set(g, s.values.at(g));
  return f;
}

inline NamedSection from_section(const std::string& name, const Section& f) {
  NamedSection s{name, {}};
  for (Element g = 0; g < f.algebra()->size(); ++g) s.values.push_back(f.at(g));
  return s;
}

inline StarRepresentation to_representation(const AlgebraRef& alg, const NamedRepresentation& r) {
  if (r.images.size() != alg->total_dim())
    throw InvalidArgument("representation '" + r.name + "' has the wrong number of basis images");
  return {alg, r.hilbert_dim, r.images};
}

namespace io_detail {

using json = nlohmann::json;

inline std::string format_complex(Complex z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g", z.real(), z.imag());
  return buf;
}

inline bool parse_real(const std::string& s, double& out) {
  if (s.empty() || std::isspace(static_cast<unsigned char>(s.front()))) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

inline Complex parse_complex(const json& v, const std::string& path) {
  if (!v.is_string()) throw ParseError(path, "expected a string \"re,im\"");
  const auto s = v.get<std::string>();
  const auto comma = s.find(',');
  double re = 0, im = 0;
  if (comma == std::string::npos || !parse_real(s.substr(0, comma), re) || !parse_real(s.substr(comma + 1), im))
    throw ParseError(path, "malformed complex number '" + s + "'");
  return {re, im};
}

inline void require_keys(const json& obj, const std::string& path, std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional = {}) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  for (const char* k : required)
    if (!obj.contains(k)) throw ParseError(path, std::string("missing key '") + k + "'");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* r : required) known = known || k == r;
    for (const char* o : optional) known = known || k == o;
    if (!known) throw ParseError(path + "/" + k, "unknown key");
  }
}

inline const json& array_at(const json& obj, const char* key, const std::string& path) {
  const json& a = obj.at(key);
  if (!a.is_array()) throw ParseError(path + "/" + key, "expected an array");
  return a;
}

inline std::size_t index(const json& v, const std::string& path, std::size_t bound, const char* what) {
  if (!v.is_number_unsigned()) throw ParseError(path, std::string("expected a non-negative integer ") + what);
  const auto x = v.get<std::uint64_t>();
  if (x >= bound)
    throw ParseError(path, std::string(what) + " " + std::to_string(x) + " out of range (" + std::to_string(bound) +
                               " available)");
  return static_cast<std::size_t>(x);
}

inline std::vector<Element> element_list(const json& obj, const char* key, const std::string& path, std::size_t n) {
  std::vector<Element> out;
  const auto& a = array_at(obj, key, path);
  for (std::size_t i = 0; i < a.size(); ++i)
    out.push_back(index(a[i], path + "/" + key + "/" + std::to_string(i), n, "element"));
  return out;
}

/// Rows [i_1, ..., i_r, "re,im"] with each i_t < bounds[t].
template <std::size_t R>
std::vector<std::pair<std::array<std::size_t, R>, Complex>> sparse_entries(const json& a, const std::string& path,
                                                                              const std::array<std::size_t, R>& bounds) {
  if (!a.is_array()) throw ParseError(path, "expected an array");
  std::vector<std::pair<std::array<std::size_t, R>, Complex>> out;
  std::set<std::array<std::size_t, R>> seen;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const std::string p = path + "/" + std::to_string(t);
    if (!a[t].is_array() || a[t].size() != R + 1)
      throw ParseError(p, "expected " + std::to_string(R) + " indices followed by a complex value");
    std::array<std::size_t, R> idx{};
    for (std::size_t r = 0; r < R; ++r) idx[r] = index(a[t][r], p + "/" + std::to_string(r), bounds[r], "index");
    if (!seen.insert(idx).second) throw ParseError(p, "duplicate entry");
    out.emplace_back(idx, parse_complex(a[t][R], p + "/" + std::to_string(R)));
  }
  return out;
}

inline Matrix dense_matrix(const json& a, const std::string& path, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (const auto& [idx, z] : sparse_entries<2>(a, path, {rows, cols})) m(idx[0], idx[1]) = z;
  return m;
}

inline json sparse_matrix(const Matrix& m) {
  json a = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m(r, c) != Complex{}) a.push_back({r, c, format_complex(m(r, c))});
  return a;
}

/// Canonical text: objects one key per line in sorted order, arrays of
/// scalars on one line.
inline void canonical_dump(const json& j, std::string& out, std::size_t depth) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  auto flat = [](const json& a) {
    return std::all_of(a.begin(), a.end(), [](const json& x) { return x.is_primitive(); });
  };
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + json(k).dump() + ": ";
      canonical_dump(v, out, depth + 1);
    }
    out += "\n" + close + "}";
  } else if (j.is_array() && !flat(j)) {
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      canonical_dump(j[i], out, depth + 1);
    }
    out += "\n" + close + "]";
  } else if (j.is_array()) {
    out += "[";
    for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + j[i].dump();
    out += "]";
  } else {
    out += j.dump();
  }
}

inline FiniteGroupoid parse_groupoid(const json& j) {
  const std::string path = "/groupoid";
  require_keys(j, path, {"elements", "units", "range", "source", "inverse", "compose"});
  if (!j["elements"].is_number_unsigned()) throw ParseError(path + "/elements", "expected a non-negative integer");
  const std::size_t n = j["elements"].get<std::uint64_t>();
  if (n > 4096) throw ParseError(path + "/elements", "too many elements");
  const auto units = element_list(j, "units", path, n);
  const auto range = element_list(j, "range", path, n);
  const auto source = element_list(j, "source", path, n);
  const auto inverse = element_list(j, "inverse", path, n);
  for (const auto* key : {"range", "source", "inverse"})
    if (j[key].size() != n)
      throw ParseError(path + "/" + key, "expected " + std::to_string(n) + " entries, got " + std::to_string(j[key].size()));
  std::set<Element> unit_set;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (!unit_set.insert(units[i]).second) throw ParseError(path + "/units/" + std::to_string(i), "unit listed twice");
  std::vector<std::array<Element, 3>> triples;
  std::set<std::pair<Element, Element>> seen;
  const auto& c = array_at(j, "compose", path);
  for (std::size_t t = 0; t < c.size(); ++t) {
    const std::string p = path + "/compose/" + std::to_string(t);
    if (!c[t].is_array() || c[t].size() != 3) throw ParseError(p, "expected a triple [g, h, gh]");
    std::array<Element, 3> tr{};
    for (std::size_t r = 0; r < 3; ++r) tr[r] = index(c[t][r], p, n, "element");
    if (!seen.insert({tr[0], tr[1]}).second) throw ParseError(p, "duplicate composition entry");
    triples.push_back(tr);
  }
  return FiniteGroupoid(n, units, range, source, inverse, triples);
}

inline json emit_groupoid(const FiniteGroupoid& G) {
  json j;
  j["elements"] = G.size();
  j["units"] = G.units();
  j["range"] = G.range_map();
  j["source"] = G.source_map();
  j["inverse"] = G.inverse_map();
  json c = json::array();
  for (const auto& t : G.compose_triples()) c.push_back(t);
  j["compose"] = c;
  return j;
}

inline FellBundle parse_fibers(const json& j, const FiniteGroupoid& G) {
  const std::string path = "/fibers";
  require_keys(j, path, {"units", "dims", "mult", "star"});
  const std::size_t n = G.size();
  FellBundle B;
  B.groupoid = G;
  B.unit_fiber.assign(n, std::nullopt);

  const auto& dims = array_at(j, "dims", path);
  if (dims.size() != n) throw ParseError(path + "/dims", "expected " + std::to_string(n) + " entries");
  for (std::size_t g = 0; g < n; ++g) {
    const std::string p = path + "/dims/" + std::to_string(g);
    B.dim.push_back(index(dims[g], p, 4097, "dimension"));
  }

  const auto& units = array_at(j, "units", path);
  for (std::size_t t = 0; t < units.size(); ++t) {
    const std::string p = path + "/units/" + std::to_string(t);
    require_keys(units[t], p, {"unit", "blocks"});
    const Element u = index(units[t]["unit"], p + "/unit", n, "element");
    if (!G.is_unit(u)) throw ParseError(p + "/unit", "element " + std::to_string(u) + " is not a unit");
    if (B.unit_fiber[u]) throw ParseError(p + "/unit", "unit fiber given twice");
    const auto& bl = units[t]["blocks"];
    if (!bl.is_array()) throw ParseError(p + "/blocks", "expected an array");
    std::vector<std::size_t> blocks;
    for (std::size_t b = 0; b < bl.size(); ++b)
      blocks.push_back(index(bl[b], p + "/blocks/" + std::to_string(b), 65, "block size"));
    std::size_t d = 0;
    for (auto b : blocks) {
      if (b == 0) throw ParseError(p + "/blocks", "block sizes must be positive");
      d += b * b;
    }
    if (d != B.dim[u])
      throw ParseError(p + "/blocks", "blocks give dimension " + std::to_string(d) + " but dims lists " +
                                          std::to_string(B.dim[u]));
    B.unit_fiber[u] = MatrixStarAlgebra::from_blocks(blocks);
  }
  for (auto u : G.units())
    if (!B.unit_fiber[u]) throw ParseError(path + "/units", "missing algebra for unit " + std::to_string(u));

  const auto& mult = array_at(j, "mult", path);
  for (std::size_t t = 0; t < mult.size(); ++t) {
    const std::string p = path + "/mult/" + std::to_string(t);
    require_keys(mult[t], p, {"left", "right", "target", "coef"}, {"offset"});
    const Element g = index(mult[t]["left"], p + "/left", n, "element");
    const Element h = index(mult[t]["right"], p + "/right", n, "element");
    const Element k = index(mult[t]["target"], p + "/target", n, "element");
    if (B.mult.count({g, h})) throw ParseError(p, "duplicate multiplication entry");
    MultEntry me;
    me.target = k;
    me.coeffs = Tensor3(B.dim[k], B.dim[g], B.dim[h]);
    for (const auto& [idx, z] : sparse_entries<3>(mult[t]["coef"], p + "/coef", {B.dim[k], B.dim[g], B.dim[h]}))
      me.coeffs.at(idx[0], idx[1], idx[2]) = z;
    if (mult[t].contains("offset")) {
      me.offset.assign(B.dim[k], {});
      for (const auto& [idx, z] : sparse_entries<1>(mult[t]["offset"], p + "/offset", {B.dim[k]})) me.offset[idx[0]] = z;
    }
    B.mult.emplace(std::make_pair(g, h), std::move(me));
  }

  const auto& star = array_at(j, "star", path);
  B.star.resize(n);
  std::vector<bool> have(n, false);
  for (std::size_t t = 0; t < star.size(); ++t) {
    const std::string p = path + "/star/" + std::to_string(t);
    require_keys(star[t], p, {"source", "target", "anti"}, {"linear"});
    const Element g = index(star[t]["source"], p + "/source", n, "element");
    const Element k = index(star[t]["target"], p + "/target", n, "element");
    if (have[g]) throw ParseError(p, "duplicate star entry");
    have[g] = true;
    StarEntry s;
    s.target = k;
    s.anti = dense_matrix(star[t]["anti"], p + "/anti", B.dim[k], B.dim[g]);
    if (star[t].contains("linear")) s.linear = dense_matrix(star[t]["linear"], p + "/linear", B.dim[k], B.dim[g]);
    B.star[g] = std::move(s);
  }
  for (Element g = 0; g < n; ++g)
    if (!have[g]) throw ParseError(path + "/star", "missing star entry for element " + std::to_string(g));
  return B;
}

inline json emit_fibers(const FellBundle& B) {
  json j;
  json units = json::array();
  for (auto u : B.groupoid.units()) {
    const auto& A = B.unit_algebra(u);
    const auto canonical = MatrixStarAlgebra::from_blocks(A.blocks());
    if (A.blocks().empty() || A.basis() != canonical.basis())
      throw InvalidArgument("emit: unit fiber over " + std::to_string(u) +
                            " is not a block-diagonal algebra with the matrix-unit basis");
    units.push_back({{"unit", u}, {"blocks", A.blocks()}});
  }
  j["units"] = units;
  j["dims"] = B.dim;
  json mult = json::array();
  for (const auto& [gh, me] : B.mult) {
    json e;
    e["left"] = gh.first;
    e["right"] = gh.second;
    e["target"] = me.target;
    json coef = json::array();
    for (std::size_t k = 0; k < me.coeffs.out; ++k)
      for (std::size_t i = 0; i < me.coeffs.left; ++i)
        for (std::size_t jj = 0; jj < me.coeffs.right; ++jj)
          if (me.coeffs.at(k, i, jj) != Complex{}) coef.push_back({k, i, jj, format_complex(me.coeffs.at(k, i, jj))});
    e["coef"] = coef;
    if (!me.offset.empty()) {
      json off = json::array();
      for (std::size_t k = 0; k < me.offset.size(); ++k)
        if (me.offset[k] != Complex{}) off.push_back({k, format_complex(me.offset[k])});
      e["offset"] = off;
    }
    mult.push_back(e);
  }
  j["mult"] = mult;
  json star = json::array();
  for (Element g = 0; g < B.size(); ++g) {
    const auto& s = B.star.at(g);
    json e;
    e["source"] = g;
    e["target"] = s.target;
    e["anti"] = sparse_matrix(s.anti);
    if (!s.linear.empty()) e["linear"] = sparse_matrix(s.linear);
    star.push_back(e);
  }
  j["star"] = star;
  return j;
}

}  // namespace io_detail

inline BundleDocument parse_bundle_document(const std::string& text) {
  using io_detail::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based position of the offending character.
    const std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (auto pos = msg.find(", column "); pos != std::string::npos)
      if (auto colon = msg.find(": ", pos); colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ParseError(line, column, msg);
  }
  io_detail::require_keys(root, "", {"format_version", "groupoid"}, {"fibers", "sections", "representations"});
  if (root["format_version"] != "1") throw ParseError("/format_version", "unsupported format version");

  BundleDocument doc;
  doc.groupoid = io_detail::parse_groupoid(root["groupoid"]);
  if (root.contains("fibers")) doc.bundle = io_detail::parse_fibers(root["fibers"], doc.groupoid);

  if (root.contains("sections")) {
    if (!doc.bundle) throw ParseError("/sections", "sections need a fibers block");
    const auto& secs = root["sections"];
    if (!secs.is_array()) throw ParseError("/sections", "expected an array");
    std::set<std::string> names;
    for (std::size_t t = 0; t < secs.size(); ++t) {
      const std::string p = "/sections/" + std::to_string(t);
      io_detail::require_keys(secs[t], p, {"name", "values"});
      if (!secs[t]["name"].is_string()) throw ParseError(p + "/name", "expected a string");
      NamedSection s{secs[t]["name"].get<std::string>(), {}};
      if (!names.insert(s.name).second) throw ParseError(p + "/name", "duplicate section name '" + s.name + "'");
      for (Element g = 0; g < doc.groupoid.size(); ++g) s.values.emplace_back(doc.bundle->dim[g]);
      const auto& vals = secs[t]["values"];
      if (!vals.is_array()) throw ParseError(p + "/values", "expected an array");
      std::set<std::pair<std::size_t, std::size_t>> seen;
      for (std::size_t r = 0; r < vals.size(); ++r) {
        const std::string q = p + "/values/" + std::to_string(r);
        if (!vals[r].is_array() || vals[r].size() != 3) throw ParseError(q, "expected [element, index, \"re,im\"]");
        const Element g = io_detail::index(vals[r][0], q + "/0", doc.groupoid.size(), "element");
        const std::size_t i = io_detail::index(vals[r][1], q + "/1", doc.bundle->dim[g], "fiber index");
        if (!seen.insert({g, i}).second) throw ParseError(q, "duplicate entry");
        s.values[g][i] = io_detail::parse_complex(vals[r][2], q + "/2");
      }
      doc.sections.push_back(std::move(s));
    }
  }

  if (root.contains("representations")) {
    if (!doc.bundle) throw ParseError("/representations", "representations need a fibers block");
    std::size_t total = 0;
    for (auto d : doc.bundle->dim) total += d;
    const auto& reps = root["representations"];
    if (!reps.is_array()) throw ParseError("/representations", "expected an array");
    for (std::size_t t = 0; t < reps.size(); ++t) {
      const std::string p = "/representations/" + std::to_string(t);
      io_detail::require_keys(reps[t], p, {"name", "hilbert_dim", "images"});
      if (!reps[t]["name"].is_string()) throw ParseError(p + "/name", "expected a string");
      NamedRepresentation r{reps[t]["name"].get<std::string>(),
                            io_detail::index(reps[t]["hilbert_dim"], p + "/hilbert_dim", 4097, "dimension"),
                            {}};
      r.images.assign(total, Matrix(r.hilbert_dim, r.hilbert_dim));
      const auto& imgs = reps[t]["images"];
      if (!imgs.is_array()) throw ParseError(p + "/images", "expected an array");
      std::set<std::size_t> seen;
      for (std::size_t k = 0; k < imgs.size(); ++k) {
        const std::string q = p + "/images/" + std::to_string(k);
        if (!imgs[k].is_array() || imgs[k].size() != 2) throw ParseError(q, "expected [basis_index, entries]");
        const std::size_t b = io_detail::index(imgs[k][0], q + "/0", total, "basis index");
        if (!seen.insert(b).second) throw ParseError(q, "duplicate basis index");
        r.images[b] = io_detail::dense_matrix(imgs[k][1], q + "/1", r.hilbert_dim, r.hilbert_dim);
      }
      doc.representations.push_back(std::move(r));
    }
  }
  return doc;
}

inline std::string emit_bundle_document(const BundleDocument& doc) {
  using io_detail::json;
  json root;
  root["format_version"] = "1";
  root["groupoid"] = io_detail::emit_groupoid(doc.groupoid);
  if (doc.bundle) root["fibers"] = io_detail::emit_fibers(*doc.bundle);
  if (!doc.sections.empty()) {
    if (!doc.bundle) throw InvalidArgument("emit: sections need a bundle");
    json secs = json::array();
    for (const auto& s : doc.sections) {
      json vals = json::array();
      for (Element g = 0; g < s.values.size(); ++g)
        for (std::size_t i = 0; i < s.values[g].size(); ++i)
          if (s.values[g][i] != Complex{}) vals.push_back({g, i, io_detail::format_complex(s.values[g][i])});
      secs.push_back({{"name", s.name}, {"values", vals}});
    }
    root["sections"] = secs;
  }
  if (!doc.representations.empty()) {
    json reps = json::array();
    for (const auto& r : doc.representations) {
      json imgs = json::array();
      for (std::size_t k = 0; k < r.images.size(); ++k) {
        auto entries = io_detail::sparse_matrix(r.images[k]);
        if (!entries.empty()) imgs.push_back({k, entries});
      }
      reps.push_back({{"name", r.name}, {"hilbert_dim", r.hilbert_dim}, {"images", imgs}});
    }
    root["representations"] = reps;
  }
  std::string text;
  io_detail::canonical_dump(root, text, 0);
  return text + "\n";
}

inline BundleDocument make_document(const FellBundle& B) {
  BundleDocument doc;
  doc.groupoid = B.groupoid;
  doc.bundle = B;
  return doc;
}

}  // namespace fell
