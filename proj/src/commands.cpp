#include "fell/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace fell {

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_text_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace cmd_detail {

std::optional<BundleDocument> load(const std::string& path, std::ostream& err) {
  try {
    return parse_bundle_document(read_text_file(path));
  } catch (const InvalidArgument& e) {
    err << "error=input " << e.what() << "\n";
    return std::nullopt;
  }
}

bool check_bundle(const BundleDocument& doc, const CommandOptions& opt, std::ostream& out) {
  const auto grep = validate_groupoid(doc.groupoid);
  out << "groupoid=" << (grep.ok() ? "ok" : "fail") << "\n";
  for (const auto& f : grep.findings) out << "groupoid_violation=" << f.check << " witness=" << f.witness << "\n";
  if (!grep.ok()) return false;
  if (!doc.bundle) return true;
  const auto ax = check_axioms(*doc.bundle, opt.tol, opt.samples, opt.seed);
  ax.print(out);
  if (!ax.ok()) {
    if (int k = ax.first_failure()) {
      out << "first_failure=" << k << "\n";
      out << "witness=" << ax.axioms[k - 1].witness << "\n";
    }
    return false;
  }
  return true;
}

}  // namespace cmd_detail

int cmd_check(const std::string& path, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  const auto doc = cmd_detail::load(path, err);
  if (!doc) return exit_input;
  try {
    bool ok = cmd_detail::check_bundle(*doc, opt, out);
    if (ok && doc->bundle) {
      const auto sat = is_saturated(*doc->bundle, opt.tol);
      out << "saturated=" << (sat.saturated ? "true" : "false") << "\n";
      if (sat.witness)
        out << "saturation_witness=" << sat.witness->first << "," << sat.witness->second << " rank=" << sat.rank
            << " target_dim=" << sat.target_dim << "\n";
      if (!doc->representations.empty()) {
        const auto alg = make_algebra(*doc->bundle);
        for (const auto& r : doc->representations) {
          RepresentationCheckOptions ro;
          ro.samples = opt.samples;
          ro.seed = opt.seed;
          const auto rep = validate_representation(to_representation(alg, r), ro);
          out << "representation=" << r.name << " status=" << (rep.ok() ? "pass" : "fail") << "\n";
          for (const auto& f : rep.findings) out << "representation_violation=" << f.check << " witness=" << f.witness << "\n";
          ok = ok && rep.ok();
        }
      }
    }
    out << "result=" << (ok ? "ok" : "violation") << "\n";
    return ok ? exit_ok : exit_violation;
  } catch (const InvalidArgument& e) {
    err << "error=input " << e.what() << "\n";
    return exit_input;
  } catch (const Error& e) {
    err << "error=numerical " << e.what() << "\n";
    return exit_violation;
  }
}

int cmd_norm(const std::string& path, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  const auto doc = cmd_detail::load(path, err);
  if (!doc) return exit_input;
  if (!doc->bundle) {
    err << "error=input document has no fibers block\n";
    return exit_input;
  }
  std::vector<const NamedSection*> chosen;
  if (opt.section) {
    const auto* s = doc->find_section(*opt.section);
    if (!s) {
      err << "error=input no section named '" << *opt.section << "'\n";
      return exit_input;
    }
    chosen.push_back(s);
  } else {
    for (const auto& s : doc->sections) chosen.push_back(&s);
    if (chosen.empty()) {
      err << "error=input document has no sections\n";
      return exit_input;
    }
  }
  try {
    std::ostringstream discard;
    if (!cmd_detail::check_bundle(*doc, opt, discard)) {
      err << "error=violation bundle fails its axioms; run check for details\n";
      return exit_violation;
    }
    const auto alg = make_algebra(*doc->bundle);
    const auto& G = doc->groupoid;
    bool ok = true;
    for (const auto* s : chosen) {
      const Section f = to_section(alg, *s);
      const double sn = sup_norm(f), in = i_norm(f), fn = full_norm(f);
      const double residual = std::abs(full_norm(involute(f) * f) - fn * fn);
      const bool cstar_ok = residual <= 1e-7 * (1.0 + fn * fn);
      const bool on_bisection = is_bisection(G, f.support());
      out << "section=" << s->name << "\n";
      out << "norm_sup=" << format_real(sn) << "\n";
      out << "norm_i=" << format_real(in) << "\n";
      out << "norm_full=" << format_real(fn) << "\n";
      out << "cstar_residual=" << format_real(residual) << "\n";
      out << "cstar_identity=" << (cstar_ok ? "pass" : "fail") << "\n";
      out << "bisection_support=" << (on_bisection ? "true" : "false") << "\n";
      if (on_bisection) {
        const bool equal = std::abs(in - sn) <= 1e-12 * (1.0 + sn) && std::abs(fn - sn) <= 1e-8 * (1.0 + sn);
        out << "norms_equal=" << (equal ? "true" : "false") << "\n";
        ok = ok && equal;
      }
      const bool ordered = sn <= fn + 1e-7 * (1.0 + fn) && fn <= in + 1e-7 * (1.0 + in);
      if (!ordered) out << "norm_order=fail\n";
      ok = ok && cstar_ok && ordered;
    }
    return ok ? exit_ok : exit_violation;
  } catch (const InvalidArgument& e) {
    err << "error=input " << e.what() << "\n";
    return exit_input;
  } catch (const Error& e) {
    err << "error=numerical " << e.what() << "\n";
    return exit_violation;
  }
}

BundleDocument example_document(const std::string& name, const std::vector<std::string>& args) {
  BundleDocument doc = make_document(gallery::build(name, args));
  const auto alg = make_algebra(*doc.bundle);
  Section f(alg);
  for (Element g = 0; g < alg->size(); ++g)
    for (std::size_t i = 0; i < alg->dim(g); ++i)
      f.coord(g, i) = doc.groupoid.is_unit(g) ? Complex{1.0} : Complex{0.0, 1.0};
  doc.sections.push_back(from_section("unit", unit_section(alg)));
  doc.sections.push_back(from_section("zero", Section(alg)));
  doc.sections.push_back(from_section("f", f));
  return doc;
}

int cmd_example(const std::string& name, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    out << emit_bundle_document(example_document(name, args));
    return exit_ok;
  } catch (const InvalidArgument& e) {
    err << "error=input " << e.what() << "\n";
    return exit_input;
  }
}

FuzzCase generate_fuzz_case(std::uint64_t seed, std::size_t index, const FuzzLimits& lim) {
  std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(sq);
  auto uniform = [&rng](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  FuzzCase fc;
  fc.seed = seed;
  fc.index = index;
  fc.kind = static_cast<FuzzBundleKind>(uniform(0, 2));
  fc.diagonal_dim = uniform(1, std::max<std::size_t>(1, lim.max_fiber_dim));
  const std::size_t budget = std::max<std::size_t>(1, lim.max_elements);
  std::size_t used = 0;
  const std::size_t wanted = uniform(1, 3);
  for (std::size_t t = 0; t < wanted; ++t) {
    FuzzComponent c;
    c.is_pair = uniform(0, 1) == 1;
    c.size = c.is_pair ? uniform(1, 3) : uniform(1, 4);
    const std::size_t elements = c.is_pair ? c.size * c.size : c.size;
    if (used + elements > budget) {
      if (!fc.components.empty()) break;
      c = FuzzComponent{false, 1, {}};
    }
    used += c.is_pair ? c.size * c.size : c.size;
    const std::size_t units = c.is_pair ? c.size : 1;
    for (std::size_t u = 0; u < units; ++u) {
      std::vector<std::size_t> blocks;
      std::size_t d = 0;
      const std::size_t count = uniform(1, 2);
      for (std::size_t b = 0; b < count; ++b) {
        const std::size_t s = uniform(1, 2);
        if (d + s > std::max<std::size_t>(1, lim.max_fiber_dim)) break;
        blocks.push_back(s);
        d += s;
      }
      if (blocks.empty()) blocks.push_back(1);
      c.unit_blocks.push_back(blocks);
    }
    fc.components.push_back(std::move(c));
  }
  return fc;
}

Report run_invariants(const FellBundle& B, const CommandOptions& opt, std::uint64_t stream) {
  Report rep;
  rep.merge(validate_groupoid(B.groupoid));
  if (!rep.ok()) return rep;
  const auto ax = check_axioms(B, opt.tol, std::min<std::size_t>(opt.samples, 20), stream);
  if (!ax.ok()) {
    const int k = ax.first_failure();
    rep.add("axiom", k ? std::to_string(k) + ": " + ax.axioms[k - 1].witness : "unit fiber");
    return rep;
  }
  const auto alg = make_algebra(B);
  RepresentationCheckOptions ro;
  ro.samples = std::min<std::size_t>(opt.samples, 5);
  ro.seed = stream;
  const auto rr = validate_representation(as_star_representation(alg), ro);
  for (const auto& f : rr.findings) rep.add("regular_" + f.check, f.witness);

  std::mt19937_64 rng(stream);
  const auto& G = alg->groupoid();
  const std::size_t n = std::min<std::size_t>(opt.samples, 10);
  for (std::size_t t = 0; t < n; ++t) {
    const std::string w = "sample " + std::to_string(t);
    const Section f = random_section(alg, rng);
    const double sn = sup_norm(f), in = i_norm(f), fn = full_norm(f);
    const double ffn = full_norm(involute(f) * f);
    if (std::abs(ffn - fn * fn) > 1e-7 * (1.0 + fn * fn)) rep.add("cstar_identity", w);
    if (std::abs(full_norm(involute(f)) - fn) > 1e-9 * (1.0 + fn)) rep.add("adjoint_norm", w);
    if (sn > fn + 1e-7 * (1.0 + fn)) rep.add("sup_le_full", w);
    if (fn > in + 1e-7 * (1.0 + in)) rep.add("full_le_i", w);

    const auto U = random_bisection(G, rng);
    const Section h = random_section_on(alg, U.elements(), rng);
    const double hs = sup_norm(h);
    if (std::abs(full_norm(h) - hs) > 1e-8 * (1.0 + hs)) rep.add("bisection_full", w);
    if (std::abs(i_norm(h) - hs) > 1e-12 * (1.0 + hs)) rep.add("bisection_i", w);
    const Section hh = h * involute(h);
    if (!supported_in(hh, bisection_range(G, U))) rep.add("bisection_support", w);
    if (std::abs(sup_norm(hh) - hs * hs) > 1e-9 * (1.0 + hs * hs)) rep.add("bisection_square", w);
  }
  return rep;
}

FuzzCase minimize(FuzzCase fc, const CommandOptions& opt, std::uint64_t stream) {
  bool shrunk = true;
  while (shrunk && fc.components.size() > 1) {
    shrunk = false;
    for (std::size_t k = 0; k < fc.components.size(); ++k) {
      FuzzCase smaller = fc;
      smaller.components.erase(smaller.components.begin() + static_cast<std::ptrdiff_t>(k));
      bool fails = false;
      try {
        fails = !run_invariants(smaller.bundle(), opt, stream).ok();
      } catch (const Error&) {
        fails = true;
      }
      if (fails) {
        fc = std::move(smaller);
        shrunk = true;
        break;
      }
    }
  }
  return fc;
}

int cmd_fuzz(const CommandOptions& opt, std::size_t count, const FuzzLimits& lim, const std::string& repro_dir, std::ostream& out, std::ostream& err) {
  std::size_t passed = 0, failed = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const FuzzCase fc = generate_fuzz_case(opt.seed, i, lim);
    const std::uint64_t stream = opt.seed * 1000003ULL + i;
    Report rep;
    try {
      rep = run_invariants(fc.bundle(), opt, stream);
    } catch (const Error& e) {
      rep.add("exception", e.what());
    }
    if (rep.ok()) {
      ++passed;
      continue;
    }
    ++failed;
    const FuzzCase small = minimize(fc, opt, stream);
    out << "case=" << i << " status=fail check=" << rep.findings.front().check << " instance=\"" << fc.describe()
        << "\" minimized=\"" << small.describe() << "\"\n";
    try {
      std::filesystem::create_directories(repro_dir);
      const auto file = std::filesystem::path(repro_dir) /
                        ("fuzz_" + std::to_string(opt.seed) + "_" + std::to_string(i) + ".json");
      std::ofstream(file) << emit_bundle_document(make_document(small.bundle()));
      out << "repro=" << file.string() << "\n";
    } catch (const std::exception& e) {
      err << "error=io could not write reproduction file: " << e.what() << "\n";
    }
  }
  out << "fuzz_cases=" << count << " passed=" << passed << " failed=" << failed << "\n";
  return failed == 0 ? exit_ok : exit_violation;
}

}  // namespace fell
