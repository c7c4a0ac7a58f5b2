#include <wflow/reflexivity.hpp>

#include <string>

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

std::vector<CMatrix> upper_triangular_units(int d) {
  std::vector<CMatrix> out;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out.push_back(unit(d, i, j));
  return out;
}

/// Independent oracle for the lattice algebra of a known family of
/// invariant subspaces: solve the stacked linear system
/// (1 - P_k) b P_k = 0 for every projector P_k, directly on vec(b).
Subspace lattice_algebra_oracle(int d, const std::vector<CMatrix>& projectors,
                                const Tolerances& tol) {
  const int n = static_cast<int>(projectors.size());
  CMatrix stacked(static_cast<Eigen::Index>(n) * d * d, d * d);
  for (int k = 0; k < n; ++k) {
    const CMatrix& p = projectors[k];
    const CMatrix left = CMatrix::Identity(d, d) - p;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const CVector col = vectorize(left * unit(d, i, j) * p);
        stacked.block(static_cast<Eigen::Index>(k) * d * d, i + d * j, d * d, 1) =
            col;
      }
    }
  }
  return null_space(stacked, tol);
}

CMatrix leading_projector(int d, int k) {
  CMatrix p = CMatrix::Zero(d, d);
  for (int i = 0; i < k; ++i) p(i, i) = 1.0;
  return p;
}

HardyStructure full3_hardy() {
  Tolerances tol;
  const StarAlgebra m = StarAlgebra::from_span(3, matrix_units(3), true, true, tol);
  const WStarSystem sys = WStarSystem::build(m, CircleAction{{0, 1, 2}});
  return build_hardy(GnsRealization::build(sys, canonical_state(sys)));
}

}  // namespace

TEST_CASE("carrier construction validates closure and the unit") {
  Tolerances tol;
  const auto carrier =
      OperatorAlgebraCarrier::from_ops(2, upper_triangular_units(2), tol);
  CHECK(carrier.dim() == 3);
  CHECK(carrier.unital);
  CHECK(carrier.ops.size() == 3);
  // Not multiplicatively closed: squares of E01 + E12 escape the span.
  CHECK_THROWS_AS(static_cast<void>(OperatorAlgebraCarrier::from_ops(
                      3, {CMatrix::Identity(3, 3), unit(3, 0, 1) + unit(3, 1, 2)},
                      tol)),
                  InputError);
  // Not unital: no identity in the span.
  CHECK_THROWS_AS(
      static_cast<void>(OperatorAlgebraCarrier::from_ops(2, {unit(2, 0, 0)}, tol)),
      InputError);
}

TEST_CASE("cyclic subspaces of the triangular algebra follow the flag") {
  Tolerances tol;
  const auto carrier =
      OperatorAlgebraCarrier::from_ops(3, upper_triangular_units(3), tol);
  CHECK(cyclic_subspace(carrier, CVector::Unit(3, 0)).dimension() == 1);
  CHECK(cyclic_subspace(carrier, CVector::Unit(3, 1)).dimension() == 2);
  CHECK(cyclic_subspace(carrier, CVector::Unit(3, 2)).dimension() == 3);
  // x itself always belongs (the carrier is unital).
  Rng rng(5);
  const CVector x = random_vector(rng, 3);
  CHECK(cyclic_subspace(carrier, x).residual(x) < 1e-10);
}

TEST_CASE("single Jordan block: closure is the full triangular algebra") {
  Tolerances tol;
  const int d = 4;
  CMatrix nil = CMatrix::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) nil(i, i + 1) = 1.0;
  std::vector<CMatrix> gens = {CMatrix::Identity(d, d)};
  CMatrix pw = nil;
  for (int k = 1; k < d; ++k) {
    gens.push_back(pw);
    pw = pw * nil;
  }
  const auto carrier = OperatorAlgebraCarrier::from_ops(d, gens, tol);
  CHECK(carrier.dim() == 4);

  const ReflexiveClosureResult res = reflexive_closure(carrier, {.seed = 3});
  CHECK(res.report.verdict == Verdict::non_reflexive);
  CHECK(res.report.input_dim == 4);
  CHECK(res.report.closure_dim == 10);
  CHECK_FALSE(res.report.witnesses.empty());

  // Oracle: the invariant subspaces of a single nilpotent Jordan block are
  // exactly the leading coordinate flags, so the lattice algebra is the
  // full upper-triangular algebra.
  std::vector<CMatrix> flags;
  for (int k = 1; k < d; ++k) flags.push_back(leading_projector(d, k));
  const Subspace oracle = lattice_algebra_oracle(d, flags, tol);
  CHECK(oracle.dimension() == 10);
  const SubspaceComparison cmp = subspace_compare(res.closure, oracle, tol);
  CHECK(cmp.relation == SubspaceRelation::equal);
  CHECK(cmp.distance < 1e-8);
}

TEST_CASE("two-dimensional nilpotent example closes to the triangle") {
  Tolerances tol;
  const auto carrier = OperatorAlgebraCarrier::from_ops(
      2, {CMatrix::Identity(2, 2), unit(2, 0, 1)}, tol);
  const ReflexiveClosureResult res = reflexive_closure(carrier, {.seed = 7});
  CHECK(res.report.verdict == Verdict::non_reflexive);
  CHECK(res.report.input_dim == 2);
  CHECK(res.report.closure_dim == 3);
  const Subspace oracle =
      lattice_algebra_oracle(2, {leading_projector(2, 1)}, tol);
  CHECK(subspace_compare(res.closure, oracle, tol).relation ==
        SubspaceRelation::equal);
}

TEST_CASE("the full triangular algebra is its own closure") {
  Tolerances tol;
  const auto carrier =
      OperatorAlgebraCarrier::from_ops(3, upper_triangular_units(3), tol);
  const ReflexiveClosureResult res = reflexive_closure(carrier, {.seed = 11});
  CHECK(res.report.verdict == Verdict::reflexive);
  CHECK(res.report.closure_dim == 6);
  CHECK(res.report.witnesses.empty());
  const Subspace oracle = lattice_algebra_oracle(
      3, {leading_projector(3, 1), leading_projector(3, 2)}, tol);
  CHECK(subspace_compare(res.closure, oracle, tol).relation ==
        SubspaceRelation::equal);
}

TEST_CASE("generated star-closed algebras close onto themselves") {
  Tolerances tol;
  for (unsigned seed : {1u, 4u, 8u}) {
    Rng rng(seed);
    const StarAlgebra alg =
        generate(3, {random_matrix(rng, 3, 3)}, true, true, tol);
    const auto carrier =
        OperatorAlgebraCarrier::from_ops(3, alg.basis_matrices(), tol);
    const ReflexiveClosureResult res =
        reflexive_closure(carrier, {.seed = seed});
    INFO("seed ", seed, " alg dim ", carrier.dim(), " closure ",
         res.report.closure_dim);
    CHECK(res.report.verdict == Verdict::reflexive);
    CHECK(res.report.closure_dim == carrier.dim());
    CHECK(subspace_compare(res.closure, carrier.space, tol).relation ==
          SubspaceRelation::equal);
    // The trace never climbs: constraints only remove directions.
    for (std::size_t i = 1; i < res.report.dim_trace.size(); ++i) {
      CHECK(res.report.dim_trace[i] <= res.report.dim_trace[i - 1]);
    }
  }
}

TEST_CASE("verdict names are stable") {
  CHECK(std::string(to_string(Verdict::reflexive)) == "reflexive");
  CHECK(std::string(to_string(Verdict::non_reflexive)) == "non_reflexive");
  CHECK(std::string(to_string(Verdict::inconclusive)) == "inconclusive");
}

TEST_CASE("the analytic carrier of full M3 is the compressed triangle") {
  const HardyStructure h = full3_hardy();
  const OperatorAlgebraCarrier carrier = mplus_carrier(h);
  CHECK(carrier.ambient_dim == 6);
  CHECK(carrier.dim() == 6);
  CHECK(carrier.unital);
  const ReflexiveClosureResult res = reflexive_closure(carrier, {.seed = 2});
  CHECK(res.report.verdict == Verdict::reflexive);
  CHECK(res.report.closure_dim == 6);
}

TEST_CASE("commutant duality holds for the compressed algebras") {
  const CommutantDualityReport rep = commutant_duality_check(full3_hardy());
  INFO(rep.duality.anchor, " residual ", rep.duality.residual);
  CHECK(rep.pass);
  CHECK(rep.duality.pass);
}

TEST_CASE("polar parts of positive-grade components commute with the closure") {
  const HardyStructure h = full3_hardy();
  const ReflexiveClosureResult res =
      reflexive_closure(mplus_carrier(h), {.seed = 13});
  const Lemma4Report rep = lemma4_check(h, res.closure);
  CHECK(rep.pass);
  CHECK_FALSE(rep.vacuous);
  CHECK(rep.max_residual < 1e-7);
  for (const CheckItem& item : rep.items) {
    INFO(item.anchor, " ", item.note, " residual ", item.residual);
    CHECK(item.pass);
  }
}

TEST_CASE("lemma4_check is vacuous without positive grades") {
  Tolerances tol;
  const StarAlgebra m = StarAlgebra::from_span(2, matrix_units(2), true, true, tol);
  const WStarSystem sys = WStarSystem::build(m, CircleAction{{1, 1}});
  const HardyStructure h =
      build_hardy(GnsRealization::build(sys, canonical_state(sys)));
  const ReflexiveClosureResult res =
      reflexive_closure(mplus_carrier(h), {.seed = 1});
  const Lemma4Report rep = lemma4_check(h, res.closure);
  CHECK(rep.vacuous);
  CHECK(rep.pass);
}

TEST_CASE("end-to-end pipeline certifies full M3") {
  Tolerances tol;
  const StarAlgebra m = StarAlgebra::from_span(3, matrix_units(3), true, true, tol);
  const WStarSystem sys = WStarSystem::build(m, CircleAction{{0, 1, 2}});
  const ReflexivityReport rep = theorem5_verify(sys, {.seed = 21});
  CHECK(rep.verdict == Verdict::reflexive);
  CHECK(rep.input_dim == 6);
  CHECK(rep.closure_dim == 6);
  CHECK(rep.max_residual < 1e-7);
}

TEST_CASE("nest example dimensions follow the block pair formula") {
  Tolerances tol;
  const NestExample nest = nest_example({2, 1, 1}, {3, 2, 1}, tol);
  CHECK(nest.weight_vector == std::vector<int>{3, 3, 2, 1});
  // sum over i <= j of s_i s_j = 4 + 2 + 2 + 1 + 1 + 1.
  CHECK(nest.expected_mplus_dim == 11);
  CHECK(nest.sys.matrix_dim() == 4);

  const ReflexivityReport rep = theorem5_verify(nest.sys, {.seed = 5});
  CHECK(rep.verdict == Verdict::reflexive);
  CHECK(rep.input_dim == nest.expected_mplus_dim);
  CHECK(rep.closure_dim == nest.expected_mplus_dim);

  // Weight vectors must strictly decrease block over block.
  CHECK_THROWS_AS(static_cast<void>(nest_example({2, 1}, {1, 1}, tol)), InputError);
  CHECK_THROWS_AS(static_cast<void>(nest_example({2, 1}, {1, 2}, tol)), InputError);
  CHECK_THROWS_AS(static_cast<void>(nest_example({2, 1}, {1}, tol)), InputError);
}

TEST_CASE("corner combination agrees with the direct closure") {
  Tolerances tol;
  // Block diagonal algebra: upper-triangular 2x2 in the first block, full
  // M2 in the second.
  std::vector<CMatrix> gens;
  for (const CMatrix& b : upper_triangular_units(2)) {
    CMatrix big = CMatrix::Zero(4, 4);
    big.block(0, 0, 2, 2) = b;
    gens.push_back(big);
  }
  for (const CMatrix& b : matrix_units(2)) {
    CMatrix big = CMatrix::Zero(4, 4);
    big.block(2, 2, 2, 2) = b;
    gens.push_back(big);
  }
  const auto carrier = OperatorAlgebraCarrier::from_ops(4, gens, tol);
  CHECK(carrier.dim() == 7);

  CMatrix q1 = CMatrix::Zero(4, 4);
  q1(0, 0) = q1(1, 1) = 1.0;
  const CMatrix q2 = CMatrix::Identity(4, 4) - q1;

  const CornerCombination comb =
      combine_reflexive_corners(carrier, {q1, q2}, {.seed = 9});
  CHECK(comb.preconditions_ok);
  REQUIRE(comb.corner_reports.size() == 2);
  for (const ReflexivityReport& r : comb.corner_reports) {
    CHECK(r.verdict == Verdict::reflexive);
  }
  CHECK(comb.verdict == Verdict::reflexive);
  CHECK(comb.direct.verdict == Verdict::reflexive);
  CHECK(comb.agrees);
}

TEST_CASE("corner combination reports failed hypotheses") {
  Tolerances tol;
  const auto carrier =
      OperatorAlgebraCarrier::from_ops(2, upper_triangular_units(2), tol);
  // E00 does not commute with E01.
  const CornerCombination bad_i = combine_reflexive_corners(
      carrier, {unit(2, 0, 0), unit(2, 1, 1)}, {.seed = 1});
  CHECK_FALSE(bad_i.preconditions_ok);
  CHECK(bad_i.failed_hypothesis == "i");

  // Commuting family that does not resolve the identity.
  Tolerances tol2;
  std::vector<CMatrix> gens;
  for (const CMatrix& b : matrix_units(2)) {
    CMatrix big = CMatrix::Zero(4, 4);
    big.block(0, 0, 2, 2) = b;
    gens.push_back(big);
  }
  for (const CMatrix& b : matrix_units(2)) {
    CMatrix big = CMatrix::Zero(4, 4);
    big.block(2, 2, 2, 2) = b;
    gens.push_back(big);
  }
  const auto block_carrier = OperatorAlgebraCarrier::from_ops(4, gens, tol2);
  CMatrix q1 = CMatrix::Zero(4, 4);
  q1(0, 0) = q1(1, 1) = 1.0;
  const CornerCombination bad_iii =
      combine_reflexive_corners(block_carrier, {q1}, {.seed = 1});
  CHECK_FALSE(bad_iii.preconditions_ok);
  CHECK(bad_iii.failed_hypothesis == "iii");
}
