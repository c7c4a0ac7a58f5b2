#include "wflow/types.hpp"

#include <cmath>

namespace wflow {

void Tolerances::validate() const {
  auto in_unit = [](double t) { return t > 0.0 && t < 1.0; };
  if (!in_unit(rank_tol) || !in_unit(subspace_tol) || !in_unit(residual_tol)) {
    throw InputError("tolerances must lie strictly between 0 and 1");
  }
}

Complex unit_power(Complex z, int n) {
  if (n == 0) return Complex(1.0, 0.0);
  return std::pow(z, static_cast<double>(n));
}

void require_unimodular(Complex z, const char* where) {
  if (std::abs(std::abs(z) - 1.0) >= 1e-12) {
    throw InputError(std::string(where) + ": circle parameter must satisfy |z| = 1");
  }
}

Complex random_complex(Rng& rng) {
  static constexpr double kHalfVar = 0.7071067811865475244;  // 1/sqrt(2)
  std::normal_distribution<double> normal(0.0, 1.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return Complex(re * kHalfVar, im * kHalfVar);
}

CMatrix random_matrix(Rng& rng, int rows, int cols) {
  CMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      m(i, j) = random_complex(rng);
    }
  }
  return m;
}

CVector random_vector(Rng& rng, int n) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = random_complex(rng);
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

CMatrix random_unitary(Rng& rng, int n) {
  const CMatrix g = random_matrix(rng, n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    const double a = std::abs(d);
    q.col(i) *= (a > 0.0) ? (d / a) : Complex(1.0, 0.0);
  }
  return q;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace wflow
