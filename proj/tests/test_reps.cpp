#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace fell;

namespace {

AlgebraRef linking_algebra() { return make_algebra(gallery::linking(2, 1)); }

Matrix random_invertible(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(n, n);
  for (auto& z : m.entries()) z = {u(rng), u(rng)};
  return m + Matrix::identity(n) * 3.0;
}

}  // namespace

TEST(ValidateRepresentation, RegularPasses) {
  const auto alg = linking_algebra();
  const auto rep = validate_representation(as_star_representation(alg));
  EXPECT_TRUE(rep.ok()) << rep;
}

TEST(ValidateRepresentation, PerturbedImageBreaksMultiplicativity) {
  const auto alg = linking_algebra();
  auto pi = as_star_representation(alg);
  pi.images[3](0, 0) += 1e-3;
  const auto rep = validate_representation(pi);
  EXPECT_TRUE(rep.has("multiplicative"));
  EXPECT_NE(rep.findings.front().witness.find("basis pair"), std::string::npos);
}

TEST(ValidateRepresentation, ZeroMapIsDegenerate) {
  const auto alg = linking_algebra();
  auto pi = as_star_representation(alg);
  for (auto& m : pi.images) m = Matrix(pi.hilbert_dim, pi.hilbert_dim);
  const auto rep = validate_representation(pi);
  EXPECT_TRUE(rep.has("nondegenerate"));
  EXPECT_FALSE(rep.has("multiplicative"));
}

TEST(ValidateRepresentation, WrongShapeReported) {
  const auto alg = linking_algebra();
  auto pi = as_star_representation(alg);
  pi.images.pop_back();
  EXPECT_TRUE(validate_representation(pi).has("shape"));
}

TEST(Dominance, RegularAttainsFullNorm) {
  const auto alg = linking_algebra();
  const auto pi = ValidatedRepresentation::validate(as_star_representation(alg));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto [a, b] = dominance_check(pi, random_section(alg, rng));
    EXPECT_NEAR(a, b, 1e-9);
  }
}

TEST(Dominance, DirectSumAttainsFullNorm) {
  const auto alg = linking_algebra();
  const auto lambda = as_star_representation(alg);
  const auto pi = ValidatedRepresentation::validate(direct_sum(lambda, lambda));
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto [a, b] = dominance_check(pi, random_section(alg, rng));
    EXPECT_NEAR(a, b, 1e-9);
  }
}

TEST(Dominance, BlockCompressionIsBounded) {
  // C^2 + M_2 fiber over Z/2: compress to the range of right multiplication
  // by the projection onto the C^2 block.
  const auto alg = make_algebra(build_constant_fiber_bundle(cyclic_group(2), MatrixStarAlgebra::from_blocks({1, 1, 2})));
  std::mt19937_64 rng(3);
  const auto& A = alg->bundle().unit_algebra(0);
  Matrix p(4, 4);
  p(0, 0) = 1.0;
  p(1, 1) = 1.0;
  const auto pi = block_compression(alg, 0, A.coords(p));
  EXPECT_EQ(pi.hilbert_dim, 4u);  // A p = C^2 in each of the two fibers
  const auto valid = ValidatedRepresentation::validate(pi);
  bool strict = false;
  for (int t = 0; t < 50; ++t) {
    const Section f = random_section(alg, rng);
    const auto [a, b] = dominance_check(valid, f);
    EXPECT_LE(a, b + 1e-7);
    strict = strict || a < b - 1e-3;
  }
  EXPECT_TRUE(strict);
}

TEST(Dominance, RandomSpectralProjection) {
  const auto alg = make_algebra(gallery::linking(2, 2));
  std::mt19937_64 rng(4);
  const Element x = pair_element(2, 0, 0);
  const auto pi = block_compression(alg, x, random_unit_projection(alg, x, rng));
  EXPECT_TRUE(validate_representation(pi).ok());
  for (int t = 0; t < 20; ++t) {
    const Section f = random_section(alg, rng);
    EXPECT_LE(operator_norm(pi.action(f)), full_norm(f) + 1e-7);
  }
}

TEST(Dominance, UnvalidatedRepresentationRejected) {
  const auto alg = linking_algebra();
  auto pi = as_star_representation(alg);
  pi.images[0] *= 2.0;
  EXPECT_THROW(dominance_check(pi, unit_section(alg)), InvalidArgument);
}

TEST(BisectionBound, Examples) {
  const auto alg = make_algebra(build_trivial_line_bundle(pair_groupoid(2)));
  const auto& G = alg->groupoid();
  Section ones(alg);
  for (Element g = 0; g < 4; ++g) ones.coord(g, 0) = 1.0;
  EXPECT_DOUBLE_EQ(bisection_decomposition_bound(ones, singleton_cover(G)), 4.0);
  EXPECT_NEAR(full_norm(ones), 2.0, 1e-12);

  EXPECT_DOUBLE_EQ(bisection_decomposition_bound(Section(alg), singleton_cover(G)), 0.0);

  // Two bisections (diagonal and anti-diagonal) suffice.
  const std::vector<Bisection> two{make_bisection(G, {0, 3}), make_bisection(G, {1, 2})};
  EXPECT_DOUBLE_EQ(bisection_decomposition_bound(ones, two), 2.0);

  EXPECT_THROW(bisection_decomposition_bound(ones, {make_bisection(G, {0, 3})}), InvalidArgument);
}

TEST(BisectionBound, SingleBisectionIsExact) {
  const auto alg = make_algebra(gallery::linking(1, 2));
  const auto& G = alg->groupoid();
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto U = random_bisection(G, rng);
    const Section f = random_section_on(alg, U.elements(), rng);
    const double bound = bisection_decomposition_bound(f, {U});
    EXPECT_NEAR(bound, sup_norm(f), 1e-15);
    EXPECT_NEAR(full_norm(f), bound, 1e-8 * (1 + bound));
  }
}

TEST(PreRepresentation, FullSpaceRoundTrip) {
  const auto alg = linking_algebra();
  const auto lambda = as_star_representation(alg);
  const auto L = restrict_to_pre_representation(lambda, Matrix::identity(lambda.hilbert_dim));
  EXPECT_TRUE(validate_pre_representation(L, alg).ok());
  const auto M = extend_pre_representation(L, alg);
  for (std::size_t k = 0; k < M.images.size(); ++k) EXPECT_LT(max_abs_diff(M.images[k], lambda.images[k]), 1e-9);
}

TEST(PreRepresentation, SpannedByImagesOfUnit) {
  // H0 spanned by lambda(delta_k) u; lambda(f) u is f itself.
  const auto alg = make_algebra(gallery::partial(gallery::Params::parse({"z2-halved"})));
  const auto lambda = as_star_representation(alg);
  const auto& reg = alg->regular_rep();
  const Vector u = reg.to_orthonormal * unit_section(alg).flat();
  Matrix V(lambda.hilbert_dim, lambda.hilbert_dim);
  for (std::size_t k = 0; k < lambda.images.size(); ++k) V.set_col(k, lambda.images[k] * u);
  const auto M = extend_pre_representation(restrict_to_pre_representation(lambda, V), alg);
  for (std::size_t k = 0; k < M.images.size(); ++k) EXPECT_LT(max_abs_diff(M.images[k], lambda.images[k]), 1e-9);
}

TEST(PreRepresentation, SkewBasisRoundTrip) {
  const auto alg = make_algebra(build_unit_bundle(pair_groupoid(2), {MatrixStarAlgebra::full(2), MatrixStarAlgebra::scalars()}));
  const auto lambda = as_star_representation(alg);
  std::mt19937_64 rng(6);
  const auto L = restrict_to_pre_representation(lambda, random_invertible(lambda.hilbert_dim, rng));
  const auto M = extend_pre_representation(L, alg);
  for (std::size_t k = 0; k < M.images.size(); ++k) EXPECT_LT(max_abs_diff(M.images[k], lambda.images[k]), 1e-9);
}

TEST(PreRepresentation, BrokenAdjointabilityRejected) {
  const auto alg = linking_algebra();
  const auto lambda = as_star_representation(alg);
  std::mt19937_64 rng(7);
  auto L = restrict_to_pre_representation(lambda, Matrix::identity(lambda.hilbert_dim));
  // A non-unitary similarity keeps L multiplicative but breaks <eta, L(f) xi> = <L(f*) eta, xi>.
  const Matrix S = random_invertible(lambda.hilbert_dim, rng);
  const Matrix Si = inverse(S);
  for (auto& a : L.action) a = Si * a * S;
  const auto rep = validate_pre_representation(L, alg);
  EXPECT_TRUE(rep.has("adjointability"));
  EXPECT_FALSE(rep.has("homomorphism"));
  EXPECT_THROW(extend_pre_representation(L, alg), InvalidArgument);
}

TEST(PreRepresentation, ProperSubspaceRejected) {
  const auto alg = linking_algebra();
  const auto lambda = as_star_representation(alg);
  PreRepresentation L{lambda.hilbert_dim, Matrix(lambda.hilbert_dim, 1), {}};
  L.h0_basis(0, 0) = 1.0;
  for (std::size_t k = 0; k < lambda.images.size(); ++k) L.action.push_back(Matrix(1, 1));
  EXPECT_TRUE(validate_pre_representation(L, alg).has("nondegeneracy"));
}

TEST(Representations, AdjointNormEquality) {
  const auto alg = linking_algebra();
  const auto lambda = as_star_representation(alg);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const Section f = random_section(alg, rng);
    EXPECT_NEAR(operator_norm(lambda.action(involute(f))), operator_norm(lambda.action(f)), 1e-9);
  }
}

TEST(Representations, SquareRootPathwayOnBisections) {
  // For h on a bisection, ||h||_inf^2 1 - (h* h)(x) is positive in each unit
  // fiber, and its square root s satisfies s^2 = q.
  const auto alg = make_algebra(gallery::linking(2, 2));
  const auto& B = alg->bundle();
  const auto& G = alg->groupoid();
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto U = random_bisection(G, rng);
    const Section h = random_section_on(alg, U.elements(), rng);
    const Section hh = involute(h) * h;
    ASSERT_TRUE(supported_in(hh, bisection_source(G, U)));
    const double s2 = std::pow(sup_norm(h), 2);
    EXPECT_NEAR(std::pow(operator_norm(alg->regular_rep().action(h)), 2), full_norm(hh), 1e-9 * (1 + s2));
    for (auto x : G.units()) {
      const auto& A = B.unit_algebra(x);
      const Matrix q = A.unit() * s2 - A.to_matrix(hh.at(x));
      ASSERT_TRUE(is_positive(q, 1e-9));
      const Matrix s = positive_sqrt(q);
      EXPECT_LT(max_abs_diff(s * s, q), 1e-8);
      EXPECT_TRUE(A.contains(s));
    }
  }
}
