#pragma once

#include <complex>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wflow {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Rng = std::mt19937_64;

/// Violation of a documented precondition or malformed input data.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Internal consistency failure: caps exceeded, invariants broken.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Numerical thresholds shared by every rank, membership and residual
/// decision. All three live in (0, 1); rank_tol is relative to the
/// largest singular value of the matrix being cut.
struct Tolerances {
  double rank_tol = 1e-9;
  double subspace_tol = 1e-8;
  double residual_tol = 1e-8;

  void validate() const;
};

/// z^n for integer n, usable for negative exponents.
Complex unit_power(Complex z, int n);

/// Throws InputError unless | |z| - 1 | < 1e-12.
void require_unimodular(Complex z, const char* where);

/// Standard complex Gaussian scalar: re and im each N(0, 1/2).
Complex random_complex(Rng& rng);

/// Matrix of independent standard complex Gaussian entries.
CMatrix random_matrix(Rng& rng, int rows, int cols);

/// Unit vector with complex Gaussian direction.
CVector random_vector(Rng& rng, int n);

/// Unitary from the QR factor of a Gaussian matrix with the phase of the
/// R diagonal absorbed, deterministic for a given engine state.
CMatrix random_unitary(Rng& rng, int n);

/// Deterministic stream-splitting for derived seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace wflow
