#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fell {

/// Numerical thresholds shared by every module. All comparisons against a
/// fixed threshold go through one of these fields.
struct Tolerances {
  double hermitian = 1e-12;          // max-entry asymmetry, relative to 1 + max|M|
  double eig_offdiag = 1e-13;        // Jacobi stop: off-diagonal mass / ||M||_F
  int eig_max_sweeps = 100;
  double eig_residual = 1e-9;        // ||M - Q L Q*||_F / (1 + ||M||_F)
  double positivity = 1e-9;          // is_positive / positive_sqrt precondition
  double sqrt_residual = 1e-8;
  double membership = 1e-9;          // least-squares residual for span membership
  double rank = 1e-10;               // relative pivot threshold
  double gram_min_eig = 1e-10;       // regular-representation Gram positivity
  double structural = 1e-12;         // exact identities (involution, coords)
  double associativity = 1e-10;
  double homomorphism = 1e-9;
  double fiber_norm_agreement = 1e-8;
  double well_defined = 1e-8;        // pre-representation extension residual
  double dominance = 1e-7;
};

inline constexpr Tolerances default_tolerances{};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: index out of range, shape mismatch, precondition failure.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not meet its contract (e.g. no convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A postcondition that should follow from valid inputs did not hold.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace fell
