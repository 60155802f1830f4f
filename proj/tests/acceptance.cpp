// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria (0 when all pass).

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "support/mutations.hpp"
#include "support/oracles.hpp"

using namespace fell;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Worst {
  double value = 0.0;
  void update(double x) { value = std::max(value, x); }
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

FiniteGroupoid s3() {
  const std::vector<std::array<int, 3>> perms{{0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}};
  std::vector<std::vector<Element>> table(6, std::vector<Element>(6));
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
      table[a][b] = static_cast<Element>(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  return group_from_table(table);
}

/// Every finite groupoid with at most `max_size` elements, up to
/// isomorphism, for max_size <= 6: disjoint unions of connected groupoids
/// pair(n) x H, where n^2 |H| <= 6 forces n = 1 (any group of order <= 6)
/// or n = 2 with H trivial.
std::vector<std::pair<std::string, FiniteGroupoid>> all_small_groupoids(std::size_t max_size) {
  const std::vector<std::pair<std::string, FiniteGroupoid>> connected{
      {"Z1", cyclic_group(1)}, {"Z2", cyclic_group(2)}, {"Z3", cyclic_group(3)},
      {"Z4", cyclic_group(4)}, {"V4", product(cyclic_group(2), cyclic_group(2))},
      {"Z5", cyclic_group(5)}, {"Z6", cyclic_group(6)}, {"S3", s3()},
      {"pair2", pair_groupoid(2)}};
  std::vector<std::pair<std::string, FiniteGroupoid>> out;
  std::function<void(std::size_t, std::size_t, std::string, std::optional<FiniteGroupoid>)> rec =
      [&](std::size_t start, std::size_t used, std::string name, std::optional<FiniteGroupoid> G) {
        if (G) out.emplace_back(name, *G);
        for (std::size_t k = start; k < connected.size(); ++k) {
          const auto& [cn, C] = connected[k];
          if (used + C.size() > max_size) continue;
          rec(k, used + C.size(), name.empty() ? cn : name + "+" + cn, G ? disjoint_union(*G, C) : C);
        }
      };
  rec(0, 0, "", std::nullopt);
  return out;
}

std::vector<std::size_t> random_blocks(std::mt19937_64& rng, std::size_t max_block, std::size_t max_count) {
  std::uniform_int_distribution<std::size_t> size(1, max_block), count(1, max_count);
  std::vector<std::size_t> b(count(rng));
  for (auto& x : b) x = size(rng);
  return b;
}

FiniteGroupoid random_small_groupoid(std::mt19937_64& rng) {
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: return pair_groupoid(2);
    case 1: return cyclic_group(std::uniform_int_distribution<std::size_t>(1, 3)(rng));
    case 2: return disjoint_union(cyclic_group(2), pair_groupoid(1));
    default: return disjoint_union(pair_groupoid(2), cyclic_group(1));
  }
}

// ---------------------------------------------------------------------------

Outcome matrix_algebra_oracle() {
  Worst w;
  std::size_t count = 0;
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto alg = make_algebra(build_trivial_line_bundle(pair_groupoid(n)));
    std::mt19937_64 rng(100 + n);
    for (int t = 0; t < 100; ++t, ++count) {
      const Section f = random_section(alg, rng);
      w.update(std::abs(full_norm(f) - oracle::pair_groupoid_norm(f, n)));
    }
  }
  return {w.value <= 1e-8, std::to_string(count) + " sections over pair(2..5), max |full - sigma_max| " + sci(w.value)};
}

Outcome group_algebra_oracle() {
  Worst w;
  std::size_t count = 0;
  for (std::size_t m = 2; m <= 6; ++m) {
    const auto alg = make_algebra(build_trivial_line_bundle(cyclic_group(m)));
    std::mt19937_64 rng(200 + m);
    for (int t = 0; t < 100; ++t, ++count) {
      const Section f = random_section(alg, rng);
      w.update(std::abs(full_norm(f) - oracle::cyclic_group_norm(f, m)));
    }
  }
  return {w.value <= 1e-8, std::to_string(count) + " sections over Z/2..Z/6, max |full - max_chi| " + sci(w.value)};
}

Outcome dominance() {
  const std::vector<FellBundle> bundles{
      gallery::linking(2, 1),
      gallery::partial(gallery::Params::parse({"z2-halved"})),
      build_unit_bundle(pair_groupoid(2), {MatrixStarAlgebra::full(2), MatrixStarAlgebra::scalars()}),
      build_constant_fiber_bundle(cyclic_group(2), MatrixStarAlgebra::from_blocks({1, 2})),
      build_trivial_line_bundle(pair_groupoid(3)),
  };
  std::size_t generated = 0, validated = 0, checks = 0;
  Worst excess, regular_gap;
  std::mt19937_64 rng(300);
  for (const auto& B : bundles) {
    const auto alg = make_algebra(B);
    const auto lambda = as_star_representation(alg);
    std::vector<std::pair<bool, StarRepresentation>> reps{{true, lambda}, {false, direct_sum(lambda, lambda)}};
    for (auto x : alg->groupoid().units()) {
      reps.push_back({false, block_compression(alg, x, alg->bundle().unit_algebra(x).unit_coords())});
      reps.push_back({false, block_compression(alg, x, random_unit_projection(alg, x, rng))});
    }
    reps.push_back({false, direct_sum(lambda, reps.back().second)});
    for (const auto& [is_regular, pi] : reps) {
      ++generated;
      RepresentationCheckOptions opt;
      opt.samples = 20;
      opt.seed = generated;
      if (!validate_representation(pi, opt).ok()) continue;
      ++validated;
      const auto valid = ValidatedRepresentation::validate(pi, opt);
      for (int t = 0; t < 100; ++t, ++checks) {
        const auto [a, b] = dominance_check(valid, random_section(alg, rng));
        excess.update(a - b);
        if (is_regular) regular_gap.update(std::abs(a - b));
      }
    }
  }
  const bool pass = validated == generated && excess.value <= 1e-7 && regular_gap.value <= 1e-9;
  return {pass, std::to_string(validated) + "/" + std::to_string(generated) + " representations validated, " +
                    std::to_string(checks) + " sections, max (||pi(f)|| - full) " + sci(excess.value) +
                    ", regular |gap| " + sci(regular_gap.value)};
}

Outcome bisection_equalities() {
  const std::vector<FellBundle> bundles{
      build_trivial_line_bundle(pair_groupoid(3)),
      gallery::linking(2, 2),
      gallery::partial(gallery::Params::parse({"z2-halved"})),
      build_constant_fiber_bundle(disjoint_union(pair_groupoid(2), cyclic_group(3)), MatrixStarAlgebra::from_blocks({1, 2})),
  };
  Worst full_dev, i_dev;
  std::size_t count = 0;
  std::mt19937_64 rng(400);
  for (const auto& B : bundles) {
    const auto alg = make_algebra(B);
    for (const auto& U : all_bisections(alg->groupoid())) {
      const Section f = random_section_on(alg, U.elements(), rng);
      const double s = sup_norm(f);
      full_dev.update(std::abs(full_norm(f) - s));
      i_dev.update(std::abs(i_norm(f) - s));
      ++count;
    }
  }
  return {full_dev.value <= 1e-8 && i_dev.value <= 1e-12,
          std::to_string(count) + " bisection sections, max |full - sup| " + sci(full_dev.value) + ", max |I - sup| " +
              sci(i_dev.value)};
}

Outcome unit_space_subalgebra() {
  Worst w;
  std::size_t count = 0;
  std::mt19937_64 rng(500);
  for (int config = 0; config < 20; ++config) {
    const auto G = random_small_groupoid(rng);
    FellBundle B;
    if (config % 2 == 0) {
      B = build_constant_fiber_bundle(G, MatrixStarAlgebra::from_blocks(random_blocks(rng, 3, 2)));
    } else {
      std::vector<MatrixStarAlgebra> fibers;
      for (std::size_t u = 0; u < G.units().size(); ++u)
        fibers.push_back(MatrixStarAlgebra::from_blocks(random_blocks(rng, 3, 2)));
      B = build_unit_bundle(G, fibers);
    }
    const auto alg = make_algebra(B);
    for (int t = 0; t < 5; ++t, ++count) {
      const Section f = random_section_on(alg, G.units(), rng);
      w.update(std::abs(full_norm(f) - sup_norm(f)));
    }
  }
  return {w.value <= 1e-8, std::to_string(count) + " unit-supported sections, max |full - sup| " + sci(w.value)};
}

Outcome singleton_bisections() {
  std::size_t groupoids = 0, checks = 0, containment_failures = 0;
  Worst w;
  std::mt19937_64 rng(600);
  auto run = [&](const AlgebraRef& alg) {
    const auto& G = alg->groupoid();
    const auto cover = singleton_cover(G);
    std::vector<Section> fs;
    for (const auto& U : cover) fs.push_back(random_section_on(alg, U.elements(), rng));
    for (std::size_t a = 0; a < cover.size(); ++a) {
      const Section& f = fs[a];
      const Section ffs = f * involute(f);
      if (!supported_in(ffs, bisection_range(G, cover[a]))) ++containment_failures;
      if (!supported_in(involute(f) * f, bisection_source(G, cover[a]))) ++containment_failures;
      if (!supported_in(involute(f), bisection_inverse(G, cover[a]))) ++containment_failures;
      const double s = sup_norm(f);
      w.update(std::abs(sup_norm(ffs) - s * s));
      for (std::size_t b = 0; b < cover.size(); ++b)
        if (!supported_in(f * fs[b], bisection_product(G, cover[a], cover[b]))) ++containment_failures;
      ++checks;
    }
  };
  for (const auto& [name, G] : all_small_groupoids(6)) {
    ++groupoids;
    run(make_algebra(build_trivial_line_bundle(G)));
    run(make_algebra(build_constant_fiber_bundle(G, MatrixStarAlgebra::full(2))));
  }
  for (std::size_t i = 0; i < 100; ++i) run(make_algebra(generate_fuzz_case(6, i).bundle()));
  return {containment_failures == 0 && w.value <= 1e-9,
          std::to_string(groupoids) + " groupoids (all with <= 6 elements) + 100 fuzz cases, " + std::to_string(checks) +
              " singleton bisections, containment failures " + std::to_string(containment_failures) +
              ", max |sup(ff*) - sup(f)^2| " + sci(w.value)};
}

Outcome linking_algebra() {
  Worst hom, norm;
  std::size_t rank_failures = 0;
  std::mt19937_64 rng(700);
  for (std::size_t p = 1; p <= 3; ++p)
    for (std::size_t q = 1; q <= 3; ++q) {
      const auto alg = make_algebra(gallery::linking(p, q));
      const std::size_t n = alg->total_dim();
      std::vector<Section> basis;
      std::vector<Vector> images;
      for (std::size_t k = 0; k < n; ++k) {
        const auto [g, i] = alg->unflatten(k);
        basis.push_back(Section::basis(alg, g, i));
        images.push_back(vec(gallery::linking_block_matrix(basis.back(), p, q)));
      }
      if (n != (p + q) * (p + q) || numerical_rank(images, 1e-10) != n) ++rank_failures;
      for (std::size_t a = 0; a < n; ++a) {
        const Matrix fa = gallery::linking_block_matrix(basis[a], p, q);
        hom.update(max_abs_diff(gallery::linking_block_matrix(involute(basis[a]), p, q), fa.adjoint()));
        for (std::size_t b = 0; b < n; ++b)
          hom.update(max_abs_diff(gallery::linking_block_matrix(basis[a] * basis[b], p, q),
                                  fa * gallery::linking_block_matrix(basis[b], p, q)));
      }
      for (int t = 0; t < 20; ++t) {
        const Section f = random_section(alg, rng);
        norm.update(std::abs(full_norm(f) - oracle::largest_singular_value(gallery::linking_block_matrix(f, p, q))));
      }
    }
  return {rank_failures == 0 && hom.value <= 1e-9 && norm.value <= 1e-8,
          "p,q in 1..3: bijectivity failures " + std::to_string(rank_failures) + ", *-homomorphism residual " +
              sci(hom.value) + ", max |full - ||block matrix||| " + sci(norm.value)};
}

Outcome partial_action_example() {
  const auto alg = make_algebra(gallery::partial(gallery::Params::parse({"z2-halved"})));
  // Brute-force check that psi(f) = (f(e)_q, f(e)_p + f(g), f(e)_p - f(g))
  // is a bijective *-homomorphism onto C^3.
  auto psi = [](const Section& f) {
    const Complex p = f.at(0)[0], q = f.at(0)[1], g = f.at(1)[0];
    return Vector{q, p + g, p - g};
  };
  Worst hom, norm;
  const std::size_t n = alg->total_dim();
  std::vector<Vector> images;
  for (std::size_t a = 0; a < n; ++a) {
    const auto [ga, ia] = alg->unflatten(a);
    const Section fa = Section::basis(alg, ga, ia);
    images.push_back(psi(fa));
    Vector conj_img = psi(fa);
    for (auto& z : conj_img) z = std::conj(z);
    hom.update(max_abs_diff(psi(involute(fa)), conj_img));
    for (std::size_t b = 0; b < n; ++b) {
      const auto [gb, ib] = alg->unflatten(b);
      const Section fb = Section::basis(alg, gb, ib);
      Vector prod = psi(fa);
      const Vector pb = psi(fb);
      for (std::size_t k = 0; k < 3; ++k) prod[k] *= pb[k];
      hom.update(max_abs_diff(psi(fa * fb), prod));
    }
  }
  const bool iso = n == 3 && numerical_rank(images, 1e-12) == 3 && hom.value <= 1e-12;
  std::mt19937_64 rng(800);
  for (int t = 0; t < 100; ++t) {
    const Section f = random_section(alg, rng);
    const Vector v = psi(f);
    norm.update(std::abs(full_norm(f) - std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])})));
  }
  return {iso && norm.value <= 1e-10, "dimension " + std::to_string(n) + ", C^3 isomorphism " + (iso ? "verified" : "FAILED") +
                                          ", 100 sections, max |full - formula| " + sci(norm.value)};
}

Outcome unit_bundle_example() {
  Worst w;
  std::size_t count = 0;
  std::mt19937_64 rng(900);
  for (int config = 0; config < 20; ++config) {
    const auto G = random_small_groupoid(rng);
    std::vector<MatrixStarAlgebra> fibers;
    for (std::size_t u = 0; u < G.units().size(); ++u)
      fibers.push_back(MatrixStarAlgebra::from_blocks(random_blocks(rng, 3, 2)));
    const auto B = build_unit_bundle(G, fibers);
    const auto alg = make_algebra(B);
    for (int t = 0; t < 5; ++t, ++count) {
      const Section f = random_section(alg, rng);
      double expect = 0;
      for (auto x : G.units()) expect = std::max(expect, operator_norm(B.unit_algebra(x).to_matrix(f.at(x))));
      w.update(std::abs(full_norm(f) - expect));
    }
  }
  return {w.value <= 1e-9, std::to_string(count) + " sections, max |full - max_x ||f(x)||| " + sci(w.value)};
}

Outcome pre_representation_round_trip() {
  const std::vector<FellBundle> bundles{
      gallery::linking(2, 1),
      gallery::partial(gallery::Params::parse({"z2-halved"})),
      build_unit_bundle(pair_groupoid(2), {MatrixStarAlgebra::full(2), MatrixStarAlgebra::scalars()}),
      build_trivial_line_bundle(cyclic_group(4)),
  };
  Worst w;
  std::size_t rejected = 0, mutated = 0;
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_invertible = [&](std::size_t n) {
    Matrix m(n, n);
    for (auto& z : m.entries()) z = {u(rng), u(rng)};
    return m + Matrix::identity(n) * 3.0;
  };
  for (const auto& B : bundles) {
    const auto alg = make_algebra(B);
    const auto lambda = as_star_representation(alg);
    for (const Matrix& V : {Matrix::identity(lambda.hilbert_dim), random_invertible(lambda.hilbert_dim)}) {
      const auto L = restrict_to_pre_representation(lambda, V);
      const auto M = extend_pre_representation(L, alg);
      for (std::size_t k = 0; k < M.images.size(); ++k) w.update(max_abs_diff(M.images[k], lambda.images[k]));

      auto bad = L;
      const Matrix S = random_invertible(lambda.hilbert_dim);
      const Matrix Si = inverse(S);
      for (auto& a : bad.action) a = Si * a * S;
      ++mutated;
      try {
        extend_pre_representation(bad, alg);
      } catch (const InvalidArgument& e) {
        if (std::string(e.what()).find("adjointability") != std::string::npos) ++rejected;
      }
    }
  }
  return {w.value <= 1e-9 && rejected == mutated,
          "max action deviation " + sci(w.value) + ", adjointability mutations rejected " + std::to_string(rejected) +
              "/" + std::to_string(mutated)};
}

Outcome axiom_sensitivity() {
  std::size_t correct = 0;
  std::string wrong;
  const auto ms = mutations::canned();
  for (const auto& m : ms) {
    const int got = check_axioms(m.bundle).first_failure();
    if (got == m.axiom)
      ++correct;
    else
      wrong += " [axiom " + std::to_string(m.axiom) + " reported as " + std::to_string(got) + "]";
  }
  return {correct == ms.size() && ms.size() == 10,
          std::to_string(correct) + "/" + std::to_string(ms.size()) + " mutations attributed to the right axiom" + wrong};
}

Outcome cstar_identity_on_fuzz_corpus() {
  Worst w;
  std::size_t sections = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto alg = make_algebra(generate_fuzz_case(0, i).bundle());
    std::mt19937_64 rng(1100 + i);
    for (int t = 0; t < 5; ++t, ++sections) {
      const Section f = random_section(alg, rng);
      const double fn = full_norm(f);
      w.update(std::abs(full_norm(involute(f) * f) - fn * fn) / (1.0 + fn * fn));
    }
  }
  return {w.value <= 1e-7, "200 fuzz instances (seed 0), " + std::to_string(sections) +
                               " sections, max |full(f*f) - full(f)^2| / (1 + full(f)^2) " + sci(w.value)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"matrix-algebra oracle (pair groupoid)", matrix_algebra_oracle},
      {"group-algebra oracle (Z/m)", group_algebra_oracle},
      {"representation dominance", dominance},
      {"bisection norm equalities", bisection_equalities},
      {"unit-space subalgebra", unit_space_subalgebra},
      {"singleton-bisection supports and squares", singleton_bisections},
      {"linking algebra", linking_algebra},
      {"partial-action example", partial_action_example},
      {"unit bundle example", unit_bundle_example},
      {"pre-representation round trip", pre_representation_round_trip},
      {"axiom-checker sensitivity", axiom_sensitivity},
      {"C*-identity on the fuzz corpus", cstar_identity_on_fuzz_corpus},
  };
  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto& [name, run] = criteria[k];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("criterion %2zu %s  %s: %s (%.2fs)\n", k + 1, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%zu/%zu criteria passed in %.2fs\n", criteria.size() - failures, criteria.size(), total);
  return failures;
}
