#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace fell;

namespace {

AlgebraRef line(const FiniteGroupoid& G) { return make_algebra(build_trivial_line_bundle(G)); }

Section delta(const AlgebraRef& alg, Element g, Complex c = 1.0) {
  Section f(alg);
  f.coord(g, 0) = c;
  return f;
}

}  // namespace

TEST(Convolution, PairGroupoidIsMatrixProduct) {
  const std::size_t n = 3;
  const auto alg = line(pair_groupoid(n));
  std::mt19937_64 rng(1);
  const Section f = random_section(alg, rng), g = random_section(alg, rng);
  const Section fg = f * g;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0;
      for (std::size_t k = 0; k < n; ++k) s += f.at(pair_element(n, i, k))[0] * g.at(pair_element(n, k, j))[0];
      EXPECT_NEAR(std::abs(fg.at(pair_element(n, i, j))[0] - s), 0.0, 1e-13);
    }
}

TEST(Convolution, AssociativeAndInvolutive) {
  const auto alg = make_algebra(gallery::linking(2, 1));
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const Section f = random_section(alg, rng), g = random_section(alg, rng), h = random_section(alg, rng);
    EXPECT_LT(max_abs_diff((f * g) * h, f * (g * h)), 1e-12);
    EXPECT_LT(max_abs_diff(involute(f * g), involute(g) * involute(f)), 1e-12);
    EXPECT_LT(max_abs_diff(involute(involute(f)), f), 1e-15);
  }
}

TEST(Convolution, UnitSectionIsIdentity) {
  const auto alg = make_algebra(gallery::partial(gallery::Params::parse({"z2-halved"})));
  std::mt19937_64 rng(8);
  const Section u = unit_section(alg), f = random_section(alg, rng);
  EXPECT_LT(max_abs_diff(u * f, f), 1e-14);
  EXPECT_LT(max_abs_diff(f * u, f), 1e-14);
}

TEST(Convolution, MixedAlgebrasRejected) {
  const auto a = line(cyclic_group(2)), b = line(cyclic_group(2));
  EXPECT_THROW(convolve(Section(a), Section(b)), InvalidArgument);
}

TEST(Norms, Z2Example) {
  const auto alg = line(cyclic_group(2));
  const Section f = delta(alg, 0) + delta(alg, 1, Complex(0, 1));
  EXPECT_DOUBLE_EQ(sup_norm(f), 1.0);
  EXPECT_DOUBLE_EQ(i_norm(f), 2.0);
  // Characters send f to 1 + i and 1 - i.
  EXPECT_NEAR(full_norm(f), std::sqrt(2.0), 1e-12);
}

TEST(Norms, INormTakesLargerOfRowAndColumnSums) {
  // On pair(2): f(0,0) = 1, f(0,1) = 2. Range sums: unit 0 -> 3, unit 1 -> 0.
  // Source sums: unit 0 -> 1, unit 1 -> 2.
  const auto alg = line(pair_groupoid(2));
  const Section f = delta(alg, pair_element(2, 0, 0)) + delta(alg, pair_element(2, 0, 1), 2.0);
  EXPECT_DOUBLE_EQ(i_norm(f), 3.0);
  const Section g = delta(alg, pair_element(2, 0, 1), 2.0) + delta(alg, pair_element(2, 1, 1), 2.0);
  EXPECT_DOUBLE_EQ(i_norm(g), 4.0);
}

TEST(Norms, PairGroupoidMatchesSingularValue) {
  std::mt19937_64 rng(2);
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto alg = line(pair_groupoid(n));
    for (int t = 0; t < 20; ++t) {
      const Section f = random_section(alg, rng);
      EXPECT_NEAR(full_norm(f), oracle::pair_groupoid_norm(f, n), 1e-9);
    }
  }
}

TEST(Norms, CyclicGroupMatchesFourier) {
  std::mt19937_64 rng(3);
  for (std::size_t m = 2; m <= 6; ++m) {
    const auto alg = line(cyclic_group(m));
    for (int t = 0; t < 20; ++t) {
      const Section f = random_section(alg, rng);
      EXPECT_NEAR(full_norm(f), oracle::cyclic_group_norm(f, m), 1e-9);
    }
  }
}

TEST(Norms, ProductGroupoidMatchesFourierOfMatrices) {
  // pair(2) x Z/2 with the line bundle: C* is M_2 + M_2, one summand per
  // character of Z/2.
  const auto G = product(pair_groupoid(2), cyclic_group(2));
  const auto alg = line(G);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const Section f = random_section(alg, rng);
    double best = 0;
    for (int chi = 0; chi < 2; ++chi) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
          for (std::size_t z = 0; z < 2; ++z)
            m(i, j) += f.at(pair_element(2, i, j) * 2 + z)[0] * (chi == 1 && z == 1 ? -1.0 : 1.0);
      best = std::max(best, oracle::largest_singular_value(m));
    }
    EXPECT_NEAR(full_norm(f), best, 1e-9);
  }
}

TEST(Norms, ConstantMatrixFiber) {
  // Z/2 with fiber M_2: C* is M_2 + M_2 via a -> f(e) + chi(g) f(g).
  const auto alg = make_algebra(build_constant_fiber_bundle(cyclic_group(2), MatrixStarAlgebra::full(2)));
  std::mt19937_64 rng(10);
  auto mat = [](const Vector& c) { return Matrix{{c[0], c[1]}, {c[2], c[3]}}; };
  for (int t = 0; t < 20; ++t) {
    const Section f = random_section(alg, rng);
    const double expect = std::max(oracle::largest_singular_value(mat(f.at(0)) + mat(f.at(1))),
                                   oracle::largest_singular_value(mat(f.at(0)) - mat(f.at(1))));
    EXPECT_NEAR(full_norm(f), expect, 1e-9);
  }
}

TEST(Norms, OrderingAndCStarIdentity) {
  const auto alg = make_algebra(build_unit_bundle(pair_groupoid(2), {MatrixStarAlgebra::full(2), MatrixStarAlgebra::scalars()}));
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const Section f = random_section(alg, rng);
    const double fn = full_norm(f);
    EXPECT_LE(sup_norm(f), fn + 1e-9);
    EXPECT_LE(fn, i_norm(f) + 1e-9);
    EXPECT_NEAR(full_norm(involute(f) * f), fn * fn, 1e-9 * (1 + fn * fn));
  }
}

TEST(Bisections, SupportAndSquareOfBisectionSections) {
  const auto alg = make_algebra(gallery::linking(2, 2));
  const auto& G = alg->groupoid();
  std::mt19937_64 rng(13);
  for (const auto& U : all_bisections(G)) {
    const Section f = random_section_on(alg, U.elements(), rng);
    const Section ffs = f * involute(f), fsf = involute(f) * f;
    EXPECT_TRUE(supported_in(ffs, bisection_range(G, U)));
    EXPECT_TRUE(supported_in(fsf, bisection_source(G, U)));
    const double s = sup_norm(f);
    EXPECT_NEAR(sup_norm(ffs), s * s, 1e-9 * (1 + s * s));
    EXPECT_NEAR(full_norm(f), s, 1e-9 * (1 + s));
    EXPECT_NEAR(i_norm(f), s, 1e-12);
  }
}

TEST(Bisections, ProductOfSupports) {
  const auto alg = line(pair_groupoid(3));
  const auto& G = alg->groupoid();
  std::mt19937_64 rng(14);
  const auto all = all_bisections(G);
  for (std::size_t a = 0; a < all.size(); a += 5)
    for (std::size_t b = 0; b < all.size(); b += 7) {
      const Section f = random_section_on(alg, all[a].elements(), rng);
      const Section g = random_section_on(alg, all[b].elements(), rng);
      EXPECT_TRUE(supported_in(f * g, bisection_product(G, all[a], all[b])));
    }
}

TEST(RegularRep, GramIsPositiveAndActionMultiplicative) {
  const auto alg = make_algebra(gallery::partial(gallery::Params::parse({"z2-halved"})));
  const auto& rep = regular_representation(alg);
  EXPECT_EQ(rep.hilbert_dim, 3u);
  EXPECT_TRUE(is_positive(rep.gram, 1e-12));
  std::mt19937_64 rng(15);
  for (int t = 0; t < 10; ++t) {
    const Section f = random_section(alg, rng), g = random_section(alg, rng);
    EXPECT_LT(max_abs_diff(rep.action(f * g), rep.action(f) * rep.action(g)), 1e-12);
    EXPECT_LT(max_abs_diff(rep.action(involute(f)), rep.action(f).adjoint()), 1e-12);
  }
}

TEST(RegularRep, PartialActionNormFormula) {
  // D_g = C + 0 in C^2: C* is C^3 via f -> (f(e)_q, f(e)_p + f(g), f(e)_p - f(g)).
  const auto alg = make_algebra(gallery::partial(gallery::Params::parse({"z2-halved"})));
  std::mt19937_64 rng(16);
  for (int t = 0; t < 50; ++t) {
    const Section f = random_section(alg, rng);
    const Complex p = f.at(0)[0], q = f.at(0)[1], g = f.at(1)[0];
    EXPECT_NEAR(full_norm(f), std::max({std::abs(q), std::abs(p + g), std::abs(p - g)}), 1e-10);
  }
}

TEST(RegularRep, DegenerateZeroFibers) {
  const auto alg = make_algebra(gallery::partial(gallery::Params::parse({"z3-degenerate"})));
  EXPECT_EQ(alg->total_dim(), 1u);
  const Section f = delta(alg, 0, Complex(3, 4));
  EXPECT_NEAR(full_norm(f), 5.0, 1e-12);
}
