#include <wflow/flow.hpp>

#include "doctest.h"

using namespace wflow;

namespace {

CMatrix unit(int d, int i, int j) {
  CMatrix e = CMatrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

std::vector<CMatrix> matrix_units(int d) {
  std::vector<CMatrix> out;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out.push_back(unit(d, i, j));
  return out;
}

WStarSystem full_m3() {
  Tolerances tol;
  const StarAlgebra m = StarAlgebra::from_span(3, matrix_units(3), true, true, tol);
  return WStarSystem::build(m, CircleAction{{0, 1, 2}});
}

/// Entrywise oracle for the action: entry (j, k) picks up z^{w_j - w_k}.
CMatrix act_oracle(const std::vector<int>& w, Complex z, const CMatrix& m) {
  CMatrix out = m;
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      out(j, k) *= unit_power(z, w[static_cast<std::size_t>(j)] -
                                     w[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("circle action matches the entrywise oracle") {
  const CircleAction a{{0, 1, 2}};
  CHECK(a.spread() == 2);
  Rng rng(13);
  const CMatrix m = random_matrix(rng, 3, 3);
  const Complex z = std::polar(1.0, 0.77);
  CHECK((act(a, z, m) - act_oracle(a.weights, z, m)).norm() < 1e-12);
  CHECK_THROWS_AS(static_cast<void>(act(a, Complex(2.0, 0.0), m)), InputError);
}

TEST_CASE("spectral projections split the matrix exactly") {
  const CircleAction a{{0, 1, 2}};
  Rng rng(29);
  const CMatrix m = random_matrix(rng, 3, 3);
  CMatrix sum = CMatrix::Zero(3, 3);
  for (int n = -a.spread(); n <= a.spread(); ++n) {
    const CMatrix comp = spectral_projection(a, n, m);
    // The entrywise rule and the root-of-unity average must agree.
    CHECK((comp - spectral_projection_average(a, n, m)).norm() < 1e-12);
    // Each component is an eigenvector of the action.
    const Complex z = std::polar(1.0, 1.3);
    CHECK((act(a, z, comp) - unit_power(z, n) * comp).norm() < 1e-12);
    sum += comp;
  }
  CHECK((sum - m).norm() < 1e-12);
}

TEST_CASE("action_from_generator recovers integer weights") {
  Tolerances tol;
  Rng rng(31);
  const CMatrix u = random_unitary(rng, 3);
  Eigen::VectorXd w(3);
  w << 2, 0, 1;
  const CMatrix k = u * w.cast<Complex>().asDiagonal() * u.adjoint();
  const DiagonalizedAction da = action_from_generator(k, tol);
  REQUIRE(da.action.dimension() == 3);
  // The eigenbasis diagonalizes k back to the returned weights.
  CMatrix diagw = CMatrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) {
    diagw(i, i) = static_cast<double>(da.action.weights[static_cast<std::size_t>(i)]);
  }
  const CMatrix rebuilt = da.basis * diagw * da.basis.adjoint();
  CHECK((rebuilt - k).norm() < 1e-9);

  CMatrix frac = CMatrix::Zero(2, 2);
  frac(0, 0) = 0.5;
  CHECK_THROWS_AS(static_cast<void>(action_from_generator(frac, tol)), InputError);
}

TEST_CASE("full M3 with weights 0,1,2 grades into dimensions 1,2,3,2,1") {
  const WStarSystem sys = full_m3();
  const std::vector<int> sp = arveson_spectrum(sys);
  CHECK(sp == std::vector<int>{-2, -1, 0, 1, 2});
  std::vector<int> dims;
  for (int n : sp) dims.push_back(sys.spectral_subspace(n).dimension());
  CHECK(dims == std::vector<int>{1, 2, 3, 2, 1});

  // Grading accounting is exact in integers.
  int total = 0;
  for (const SpectralBlock& b : sys.blocks()) total += b.sub.dimension();
  CHECK(total == sys.size());
  CHECK(sys.spectral_subspace(7).dimension() == 0);
}

TEST_CASE("basis grades are consistent with the spectral subspaces") {
  const WStarSystem sys = full_m3();
  for (int i = 0; i < sys.size(); ++i) {
    const int g = sys.grade_of_basis(i);
    const CMatrix b = sys.algebra().basis_matrix(i);
    // A graded basis element reproduces itself under its own projection.
    CHECK((spectral_projection(sys.action(), g, b) - b).norm() < 1e-10);
  }
}

TEST_CASE("system construction rejects a non-invariant algebra") {
  Tolerances tol;
  // span{I, E11 + E12} is multiplicatively closed but not graded under
  // weights (0, 1): the two terms sit at different grades.
  const StarAlgebra m = StarAlgebra::from_span(
      2, {CMatrix::Identity(2, 2), unit(2, 0, 0) + unit(2, 0, 1)}, true, false, tol);
  CHECK_THROWS_AS(static_cast<void>(WStarSystem::build(m, CircleAction{{0, 1}})),
                  InputError);
}

TEST_CASE("trivial weights give a one-point spectrum") {
  Tolerances tol;
  const StarAlgebra m = StarAlgebra::from_span(2, matrix_units(2), true, true, tol);
  const WStarSystem sys = WStarSystem::build(m, CircleAction{{3, 3}});
  CHECK(arveson_spectrum(sys) == std::vector<int>{0});
}

TEST_CASE("fixed point expectation keeps grade zero and kills the rest") {
  const WStarSystem sys = full_m3();
  CHECK((fixed_point_expectation(sys, unit(3, 1, 1)) - unit(3, 1, 1)).norm() < 1e-10);
  CHECK(fixed_point_expectation(sys, unit(3, 0, 1)).norm() < 1e-10);
  Rng rng(37);
  const CMatrix m = random_matrix(rng, 3, 3);
  const CMatrix p = fixed_point_expectation(sys, m);
  // Idempotent, and equal to the entrywise grade-zero component.
  CHECK((fixed_point_expectation(sys, p) - p).norm() < 1e-10);
  CHECK((p - spectral_projection(sys.action(), 0, m)).norm() < 1e-10);
}

TEST_CASE("graded products land in the summed grade") {
  const GradedProductReport rep = graded_product_check(full_m3());
  CHECK(rep.pass);
  CHECK(rep.max_residual < 1e-10);
}
