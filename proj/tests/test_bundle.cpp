#include <gtest/gtest.h>

#include "support/mutations.hpp"
#include "support/oracles.hpp"

using namespace fell;

namespace {

std::vector<std::pair<std::string, FellBundle>> valid_bundles() {
  return {
      {"line over Z/3", build_trivial_line_bundle(cyclic_group(3))},
      {"line over pair(3)", build_trivial_line_bundle(pair_groupoid(3))},
      {"M2 over pair(2)", build_constant_fiber_bundle(pair_groupoid(2), MatrixStarAlgebra::full(2))},
      {"C+M2 over Z/2", build_constant_fiber_bundle(cyclic_group(2), MatrixStarAlgebra::from_blocks({1, 2}))},
      {"unit bundle", build_unit_bundle(pair_groupoid(2), {MatrixStarAlgebra::full(2), MatrixStarAlgebra::scalars()})},
      {"linking 2,1", gallery::linking(2, 1)},
      {"linking 1,3", gallery::linking(1, 3)},
      {"partial halved", gallery::partial(gallery::Params::parse({"z2-halved"}))},
      {"partial swap", gallery::partial(gallery::Params::parse({"z2-swap"}))},
      {"partial degenerate", gallery::partial(gallery::Params::parse({"z4-degenerate"}))},
  };
}

}  // namespace

TEST(Axioms, ConstructedBundlesPass) {
  for (const auto& [name, B] : valid_bundles()) {
    const auto rep = check_axioms(B);
    EXPECT_TRUE(rep.ok()) << name << " first failure " << rep.first_failure();
    for (const auto& a : rep.axioms) EXPECT_TRUE(a.evaluated) << name;
  }
}

TEST(Axioms, EachMutationIsAttributedToItsAxiom) {
  for (const auto& m : mutations::canned()) {
    const auto rep = check_axioms(m.bundle);
    EXPECT_TRUE(rep.fails(m.axiom)) << m.description;
    EXPECT_EQ(rep.first_failure(), m.axiom) << m.description;
    EXPECT_FALSE(rep.axioms[m.axiom - 1].witness.empty()) << m.description;
  }
}

TEST(Axioms, DeterministicPerSeed) {
  const auto m = mutations::canned()[3].bundle;
  std::ostringstream a, b;
  check_axioms(m, 1e-9, 50, 4).print(a);
  check_axioms(m, 1e-9, 50, 4).print(b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Saturation, KnownCases) {
  EXPECT_TRUE(is_saturated(build_trivial_line_bundle(pair_groupoid(3))).saturated);
  EXPECT_TRUE(is_saturated(gallery::linking(2, 2)).saturated);
  EXPECT_TRUE(is_saturated(gallery::partial(gallery::Params::parse({"z2-swap"}))).saturated);

  // A unit bundle over a groupoid with arrows has zero fibers off the units;
  // those never obstruct, but (g, g^-1) products into the unit fiber vanish.
  const auto ub = is_saturated(build_unit_bundle(pair_groupoid(2), {MatrixStarAlgebra::scalars(), MatrixStarAlgebra::scalars()}));
  EXPECT_FALSE(ub.saturated);
  ASSERT_TRUE(ub.witness.has_value());
  EXPECT_EQ(ub.rank, 0u);

  // D_g = C + 0 inside C^2: A_g A_g^-1 only reaches the first coordinate.
  const auto halved = is_saturated(gallery::partial(gallery::Params::parse({"z2-halved"})));
  EXPECT_FALSE(halved.saturated);
  EXPECT_EQ(halved.rank, 1u);
  EXPECT_EQ(halved.target_dim, 2u);
}

TEST(FiberNorm, UnitFiberIsOperatorNorm) {
  const auto B = build_unit_bundle(trivial_group(), {MatrixStarAlgebra::full(2)});
  const FiberElement a{0, {1, 2, Complex(0, 1), -1}};  // [[1, 2], [i, -1]]
  EXPECT_NEAR(fiber_norm(B, a), oracle::largest_singular_value(Matrix{{1, 2}, {Complex(0, 1), -1}}), 1e-12);
}

TEST(FiberNorm, BimoduleFiberIsOperatorNorm) {
  // Over (0,1) in linking(2,3) the fiber is the 2x3 matrices; its norm
  // sqrt(||x* x||) is the largest singular value.
  const auto B = gallery::linking(2, 3);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const Vector c = detail::random_coords(6, rng);
    Matrix x(2, 3);
    for (std::size_t k = 0; k < 6; ++k) x(k / 3, k % 3) = c[k];
    EXPECT_NEAR(fiber_norm(B, {pair_element(2, 0, 1), c}), oracle::largest_singular_value(x), 1e-10);
    // Over (1,0) coordinates refer to the adjoints of the matrix units.
    EXPECT_NEAR(fiber_norm(B, {pair_element(2, 1, 0), c}), oracle::largest_singular_value(x), 1e-10);
  }
}

TEST(FiberArithmetic, ProductLandsOverComposite) {
  const auto B = build_trivial_line_bundle(pair_groupoid(3));
  const auto p = fiber_multiply(B, B.basis_element(pair_element(3, 0, 1), 0), B.basis_element(pair_element(3, 1, 2), 0));
  EXPECT_EQ(p.element, pair_element(3, 0, 2));
  EXPECT_THROW(fiber_multiply(B, B.basis_element(pair_element(3, 0, 1), 0), B.basis_element(pair_element(3, 0, 1), 0)),
               InvalidArgument);
  const auto s = fiber_star(B, {pair_element(3, 0, 1), {Complex(1, 2)}});
  EXPECT_EQ(s.element, pair_element(3, 1, 0));
  EXPECT_EQ(s.coords[0], Complex(1, -2));
}

TEST(Constructors, PartialActionValidation) {
  auto pa = gallery::partial_action("z2-halved");
  EXPECT_TRUE(validate_partial_action(pa).ok());
  pa.theta[1] = Matrix{{2}};  // not multiplicative
  EXPECT_FALSE(validate_partial_action(pa).ok());
  EXPECT_THROW(build_partial_action_bundle(pa), InvalidArgument);
}

TEST(Constructors, LinkingRejectsIncompatibleBimodule) {
  // span{E_00} in the 2x1 matrices is not a left M_2-module.
  Matrix x(2, 1);
  x(0, 0) = 1.0;
  EXPECT_THROW(build_linking_bundle(MatrixStarAlgebra::full(2), MatrixStarAlgebra::scalars(), {{x}}), InvalidArgument);
}
