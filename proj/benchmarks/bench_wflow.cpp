#include <benchmark/benchmark.h>

#include <vector>

#include "wflow/reflexivity.hpp"

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

}  // namespace

static void BM_GenerateAlgebra(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Tolerances tol;
  Rng rng(7);
  const CMatrix g = random_matrix(rng, d, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate(d, {g}, true, true, tol));
  }
}
BENCHMARK(BM_GenerateAlgebra)->Arg(3)->Arg(4)->Arg(5);

static void BM_SpectralSplit(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::vector<int> weights;
  for (int i = 0; i < d; ++i) weights.push_back(i % 3);
  const CircleAction action{weights};
  Rng rng(11);
  const CMatrix m = random_matrix(rng, d, d);
  for (auto _ : state) {
    for (int n = -action.spread(); n <= action.spread(); ++n) {
      benchmark::DoNotOptimize(spectral_projection_average(action, n, m));
    }
  }
}
BENCHMARK(BM_SpectralSplit)->Arg(4)->Arg(6)->Arg(8);

static void BM_StandardForm(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::vector<int> weights;
  for (int i = 0; i < d; ++i) weights.push_back(i);
  const WStarSystem sys = full_system(weights);
  const State phi = canonical_state(sys);
  for (auto _ : state) {
    benchmark::DoNotOptimize(GnsRealization::build(sys, phi));
  }
}
BENCHMARK(BM_StandardForm)->Arg(2)->Arg(3)->Arg(4);

static void BM_ReflexiveClosureFull3(benchmark::State& state) {
  const WStarSystem sys = full_system({0, 1, 2});
  const GnsRealization g = GnsRealization::build(sys, canonical_state(sys));
  const HardyStructure h = build_hardy(g);
  const OperatorAlgebraCarrier carrier = mplus_carrier(h);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reflexive_closure(carrier, {.seed = 1}));
  }
}
BENCHMARK(BM_ReflexiveClosureFull3);

static void BM_ReflexiveClosureNest(benchmark::State& state) {
  Tolerances tol;
  const NestExample nest = nest_example({2, 1, 1}, {3, 2, 1}, tol);
  const GnsRealization g =
      GnsRealization::build(nest.sys, canonical_state(nest.sys));
  const HardyStructure h = build_hardy(g);
  const OperatorAlgebraCarrier carrier = mplus_carrier(h);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reflexive_closure(carrier, {.seed = 1}));
  }
}
BENCHMARK(BM_ReflexiveClosureNest);

static void BM_PowerApproximation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  const CMatrix w = random_unitary(rng, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(power_approximation(w, n, 0.25));
  }
}
BENCHMARK(BM_PowerApproximation)->Arg(1)->Arg(3)->Arg(5);

BENCHMARK_MAIN();
