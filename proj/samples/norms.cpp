// Sup, I and full norms of a section of the trivial line bundle over Z/2,
// and of a section of the M_2 linking bundle.

#include <iostream>

#include "fell/fell.hpp"

int main() {
  using namespace fell;

  auto z2 = make_algebra(build_trivial_line_bundle(cyclic_group(2)));
  Section f(z2);
  f.coord(0, 0) = 1.0;
  f.coord(1, 0) = Complex{0.0, 1.0};
  std::cout << "Z/2, f = d_e + i d_g\n"
            << "  sup  " << sup_norm(f) << "\n"
            << "  I    " << i_norm(f) << "\n"
            << "  full " << full_norm(f) << "\n";

  auto link = make_algebra(gallery::linking(1, 1));
  std::mt19937_64 rng(7);
  const Section h = random_section(link, rng);
  std::cout << "linking M_2, random section\n"
            << "  full          " << full_norm(h) << "\n"
            << "  block matrix  " << operator_norm(gallery::linking_block_matrix(h, 1, 1)) << "\n";
}
