#include <wflow/gns.hpp>

#include <cmath>

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

WStarSystem full_system(const std::vector<int>& weights) {
  Tolerances tol;
  const int d = static_cast<int>(weights.size());
  const StarAlgebra m = StarAlgebra::from_span(d, matrix_units(d), true, true, tol);
  return WStarSystem::build(m, CircleAction{weights});
}

/// Random element of the algebra as a matrix (a coefficient mix of its basis).
CMatrix random_element(const WStarSystem& sys, Rng& rng) {
  CMatrix out = CMatrix::Zero(sys.matrix_dim(), sys.matrix_dim());
  for (const CMatrix& b : sys.algebra().basis_matrices()) {
    out += random_complex(rng) * b;
  }
  return out;
}

CMatrix hermitian_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  return es.eigenvectors() *
         es.eigenvalues().cwiseSqrt().cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("canonical state defaults to the normalized trace") {
  const WStarSystem sys = full_system({0, 1});
  const State phi = canonical_state(sys);
  CHECK(std::abs(phi.value(CMatrix::Identity(2, 2)) - 1.0) < 1e-12);
  CHECK(std::abs(phi.value(unit(2, 0, 0)) - 0.5) < 1e-12);
  CHECK(std::abs(phi.value(unit(2, 0, 1))) < 1e-12);
}

TEST_CASE("a skew diagonal density gives a non-tracial state") {
  const WStarSystem sys = full_system({0, 1});
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = 0.8;
  rho(1, 1) = 0.2;
  const State phi = canonical_state(sys, rho);
  CHECK(std::abs(phi.value(unit(2, 0, 0)) - 0.8) < 1e-12);
  // phi(ab) != phi(ba) for a = E01, b = E10.
  const Complex ab = phi.value(unit(2, 0, 1) * unit(2, 1, 0));
  const Complex ba = phi.value(unit(2, 1, 0) * unit(2, 0, 1));
  CHECK(std::abs(ab - ba) > 0.5);
}

TEST_CASE("canonical state rejects bad densities") {
  const WStarSystem sys = full_system({0, 1});
  CHECK_THROWS_AS(static_cast<void>(canonical_state(sys, CMatrix::Identity(3, 3))),
                  InputError);
  CHECK_THROWS_AS(static_cast<void>(canonical_state(sys, unit(2, 0, 1))), InputError);
  CHECK_THROWS_AS(static_cast<void>(canonical_state(sys, unit(2, 0, 0))), InputError);
}

TEST_CASE("the Gram matrix tabulates the state on basis products") {
  const WStarSystem sys = full_system({0, 1, 1});
  CMatrix rho = CMatrix::Zero(3, 3);
  rho.diagonal() << 0.5, 0.3, 0.2;
  const State phi = canonical_state(sys, rho);
  const GnsRealization g = GnsRealization::build(sys, phi);
  const auto& basis = sys.algebra().basis_matrices();
  for (int i = 0; i < sys.size(); ++i) {
    for (int j = 0; j < sys.size(); ++j) {
      const Complex expect = phi.value(basis[i].adjoint() * basis[j]);
      CHECK(std::abs(g.gram()(i, j) - expect) < 1e-12);
    }
  }
  // gram_root squares back to gram.
  CHECK((g.gram_root() * g.gram_root() - g.gram()).norm() < 1e-10);
}

TEST_CASE("embedding carries the GNS inner product") {
  const WStarSystem sys = full_system({0, 2, 1});
  CMatrix rho = CMatrix::Zero(3, 3);
  rho.diagonal() << 0.6, 0.25, 0.15;
  const State phi = canonical_state(sys, rho);
  const GnsRealization g = GnsRealization::build(sys, phi);
  Rng rng(101);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix m = random_element(sys, rng);
    CHECK(std::abs(g.embed(m).squaredNorm() -
                   phi.value(m.adjoint() * m).real()) < 1e-10);
    CHECK((g.unembed(g.embed(m)) - m).norm() < 1e-9);
  }
  // The cyclic vector is the embedded unit.
  CHECK((g.xi0() - g.embed(CMatrix::Identity(3, 3))).norm() < 1e-12);
}

TEST_CASE("rep is a unital homomorphism acting by left multiplication") {
  const WStarSystem sys = full_system({0, 1, 2});
  const GnsRealization g = GnsRealization::build(sys, canonical_state(sys));
  Rng rng(55);
  const CMatrix a = random_element(sys, rng);
  const CMatrix b = random_element(sys, rng);
  CHECK((g.rep(a * b) - g.rep(a) * g.rep(b)).norm() < 1e-9);
  CHECK((g.rep(a) * g.embed(b) - g.embed(a * b)).norm() < 1e-9);
  CHECK((g.rep(CMatrix::Identity(3, 3)) - CMatrix::Identity(g.h_dim(), g.h_dim()))
            .norm() < 1e-10);
  // Star compatibility: rep(a*) is the Hilbert adjoint of rep(a).
  CHECK((g.rep(a.adjoint()) - g.rep(a).adjoint()).norm() < 1e-9);
}

TEST_CASE("commutant_rep commutes with rep and multiplies on the right") {
  const WStarSystem sys = full_system({0, 1, 2});
  CMatrix rho = CMatrix::Zero(3, 3);
  rho.diagonal() << 0.5, 0.2, 0.3;
  const GnsRealization g = GnsRealization::build(sys, canonical_state(sys, rho));
  Rng rng(56);
  const CMatrix a = random_element(sys, rng);
  const CMatrix b = random_element(sys, rng);
  const CMatrix c = random_element(sys, rng);
  CHECK((g.rep(a) * g.commutant_rep(b) - g.commutant_rep(b) * g.rep(a)).norm() <
        1e-9);
  // Right multiplication on the embedded algebra.
  CHECK((g.commutant_rep(b) * g.embed(c) - g.embed(c * b)).norm() < 1e-9);
}

TEST_CASE("modular operators satisfy the Tomita relations") {
  const WStarSystem sys = full_system({0, 1});
  CMatrix rho = CMatrix::Zero(2, 2);
  rho.diagonal() << 0.75, 0.25;
  const GnsRealization g = GnsRealization::build(sys, canonical_state(sys, rho));
  Rng rng(77);

  // S implements the star operation on embedded vectors.
  for (int trial = 0; trial < 4; ++trial) {
    const CMatrix m = random_element(sys, rng);
    CHECK((g.s_op().apply(g.embed(m)) - g.embed(m.adjoint())).norm() < 1e-9);
  }
  // F is the adjoint of S in the conjugate-linear pairing.
  CHECK((g.f_op().mat - g.s_op().adjoint().mat).norm() < 1e-10);
  // Delta = F S, positive; J = S Delta^{-1/2} gives S = J Delta^{1/2}.
  CHECK((g.f_op().compose(g.s_op()) - g.delta()).norm() < 1e-9);
  CHECK((g.delta() - g.delta().adjoint()).norm() < 1e-9);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g.delta());
  CHECK(es.eigenvalues()(0) > 0.0);
  const CMatrix root = hermitian_sqrt(g.delta());
  CHECK((g.j_op().compose_linear(root).mat - g.s_op().mat).norm() < 1e-9);
  // J is an involution: J^2 = 1.
  CHECK((g.j_op().compose(g.j_op()) - CMatrix::Identity(g.h_dim(), g.h_dim()))
            .norm() < 1e-10);
  // Non-tracial state: Delta visibly differs from the identity.
  CHECK((g.delta() - CMatrix::Identity(g.h_dim(), g.h_dim())).norm() > 0.1);
}

TEST_CASE("the tracial state has trivial modular operator") {
  const WStarSystem sys = full_system({0, 1, 2});
  const GnsRealization g = GnsRealization::build(sys, canonical_state(sys));
  CHECK((g.delta() - CMatrix::Identity(g.h_dim(), g.h_dim())).norm() < 1e-9);
  // For a trace, J reduces to the star operation itself.
  CHECK((g.j_op().mat - g.s_op().mat).norm() < 1e-9);
}

TEST_CASE("the implementing unitary is diagonal and covariant") {
  const WStarSystem sys = full_system({0, 1, 2});
  CMatrix rho = CMatrix::Zero(3, 3);
  rho.diagonal() << 0.4, 0.35, 0.25;
  const GnsRealization g = GnsRealization::build(sys, canonical_state(sys, rho));
  const Complex z = std::polar(1.0, 0.9);
  const CMatrix u = g.implementing_unitary(z);
  // Diagonal with entries z^{u_weights}.
  for (int i = 0; i < g.h_dim(); ++i) {
    for (int j = 0; j < g.h_dim(); ++j) {
      const Complex expect =
          (i == j) ? unit_power(z, g.u_weights()[static_cast<std::size_t>(i)])
                   : Complex(0.0);
      CHECK(std::abs(u(i, j) - expect) < 1e-12);
    }
  }
  // Covariance: U_z rep(m) U_z^* = rep(alpha_z m), and U_z fixes xi0.
  Rng rng(91);
  const CMatrix m = random_element(sys, rng);
  CHECK((u * g.rep(m) * u.adjoint() - g.rep(act(sys.action(), z, m))).norm() <
        1e-9);
  CHECK((u * g.xi0() - g.xi0()).norm() < 1e-10);
}

TEST_CASE("H grading sums to the full space and matches u_weights") {
  const WStarSystem sys = full_system({0, 1, 1, 3});
  const GnsRealization g = GnsRealization::build(sys, canonical_state(sys));
  int total = 0;
  for (int n : g.h_spectrum()) {
    const Subspace hn = g.h_spectral_subspace(n);
    total += hn.dimension();
    // Every basis vector of H_n carries weight n.
    for (int k = 0; k < hn.dimension(); ++k) {
      const CVector v = hn.basis_vector(k);
      for (int i = 0; i < g.h_dim(); ++i) {
        if (std::abs(v(i)) > 1e-12) {
          CHECK(g.u_weights()[static_cast<std::size_t>(i)] == n);
        }
      }
    }
  }
  CHECK(total == g.h_dim());
}

TEST_CASE("J conjugation lands in the commutant span") {
  const WStarSystem sys = full_system({0, 1, 2});
  CMatrix rho = CMatrix::Zero(3, 3);
  rho.diagonal() << 0.5, 0.3, 0.2;
  const GnsRealization g = GnsRealization::build(sys, canonical_state(sys, rho));
  Rng rng(17);
  const CMatrix m = random_element(sys, rng);
  const CMatrix jxj = g.j_conjugate(g.rep(m));
  CHECK(g.commutant_span().residual(vectorize(jxj)) < 1e-8);
  // And it commutes with every represented element.
  const CMatrix m2 = random_element(sys, rng);
  CHECK((jxj * g.rep(m2) - g.rep(m2) * jxj).norm() < 1e-8);
}

TEST_CASE("commutant spectral components recombine and carry their grade") {
  const WStarSystem sys = full_system({0, 1, 2});
  CMatrix rho = CMatrix::Zero(3, 3);
  rho.diagonal() << 0.45, 0.35, 0.2;
  const GnsRealization g = GnsRealization::build(sys, canonical_state(sys, rho));
  Rng rng(23);
  const CMatrix mp = g.commutant_rep(random_element(sys, rng));
  CMatrix sum = CMatrix::Zero(g.h_dim(), g.h_dim());
  for (int n = -4; n <= 4; ++n) {
    const CMatrix comp = g.commutant_spectral_component(n, mp);
    sum += comp;
    if (comp.norm() > 1e-10) {
      const Complex z = std::polar(1.0, 0.61);
      CHECK((g.commutant_action(z, comp) - unit_power(z, n) * comp).norm() < 1e-9);
    }
  }
  CHECK((sum - mp).norm() < 1e-9);
}

TEST_CASE("standard identity suite passes on seeded random systems") {
  for (unsigned seed : {2u, 5u, 9u}) {
    Rng rng(seed);
    const int d = 2 + static_cast<int>(seed % 3);
    std::vector<int> weights;
    for (int i = 0; i < d; ++i)
      weights.push_back(static_cast<int>(rng() % 3));
    const WStarSystem sys = full_system(weights);
    // Alternate tracial and non-tracial states across seeds.
    std::optional<CMatrix> rho;
    if (seed % 2 == 1) {
      CMatrix r = CMatrix::Zero(d, d);
      for (int i = 0; i < d; ++i) r(i, i) = 1.0 + 0.5 * static_cast<double>(i);
      rho = r;
    }
    const GnsRealization g =
        GnsRealization::build(sys, canonical_state(sys, rho));
    const IdentityReport rep = verify_standard_identities(g);
    for (const CheckItem& item : rep.items) {
      INFO(item.anchor, " ", item.note, " residual ", item.residual);
      CHECK(item.pass);
    }
    CHECK(rep.pass);
  }
}
