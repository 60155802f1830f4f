// Restrict the regular representation of a partial-action bundle to a
// pre-representation on a non-orthonormal basis and extend it back.

#include <iostream>

#include "fell/fell.hpp"

int main() {
  using namespace fell;

  auto alg = make_algebra(gallery::partial(gallery::Params::parse({"z2-halved"})));
  const auto lambda = as_star_representation(alg);

  std::mt19937_64 rng(1);
  Matrix V(lambda.hilbert_dim, lambda.hilbert_dim);
  for (auto& z : V.entries()) z = {std::uniform_real_distribution<>(-1, 1)(rng), 0.0};
  for (std::size_t i = 0; i < V.rows(); ++i) V(i, i) += 3.0;

  const auto L = restrict_to_pre_representation(lambda, V);
  const auto M = extend_pre_representation(L, alg);

  double worst = 0;
  for (std::size_t k = 0; k < M.images.size(); ++k) worst = std::max(worst, max_abs_diff(M.images[k], lambda.images[k]));
  std::cout << "Hilbert dimension " << M.hilbert_dim << ", largest deviation from lambda " << worst << "\n";
}
