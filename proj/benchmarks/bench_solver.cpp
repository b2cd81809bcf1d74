#include <benchmark/benchmark.h>

#include "shorn/choquet.hpp"
#include "shorn/majorization.hpp"
#include "shorn/oracle.hpp"
#include "shorn/solver.hpp"

using namespace shorn;

namespace {

struct Pair {
  HermitianOperator a, s;
};

Pair instance(int n, std::uint64_t seed) {
  const oracle::InstanceSpec spec = oracle::generate_instance(n, seed);
  oracle::Rng rng(seed + 1);
  return {HermitianOperator::diagonal(spec.target_diagonal), oracle::rotated(spec.eigenvalues, rng)};
}

}  // namespace

static void BM_Classify(benchmark::State& state) {
  const Pair p = instance(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(majorization::classify(p.a, p.s));
}
BENCHMARK(BM_Classify)->RangeMultiplier(2)->Range(8, 128);

static void BM_LocalStep(benchmark::State& state) {
  const Pair p = instance(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(solver::local_step(p.a, p.s));
}
BENCHMARK(BM_LocalStep)->RangeMultiplier(2)->Range(8, 64);

static void BM_SolveOrbit(benchmark::State& state) {
  const Pair p = instance(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(solver::solve_orbit(p.a, p.s));
}
BENCHMARK(BM_SolveOrbit)->RangeMultiplier(2)->Range(8, 64);

static void BM_SolveExact(benchmark::State& state) {
  const Pair p = instance(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(solver::solve_exact(p.a, p.s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveExact)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BM_ClassicalConstruct(benchmark::State& state) {
  const oracle::InstanceSpec spec = oracle::generate_instance(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::classical_construct(spec.eigenvalues, spec.target_diagonal));
}
BENCHMARK(BM_ClassicalConstruct)->RangeMultiplier(2)->Range(8, 128);

static void BM_Carpenter(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  oracle::Rng rng(6);
  const Matrix v = oracle::random_unitary(n, rng).leftCols(n / 3);
  const RealVector d = (v * v.adjoint()).diagonal().real();
  for (auto _ : state) benchmark::DoNotOptimize(solver::carpenter(std::span<const double>(d.data(), static_cast<std::size_t>(n))));
}
BENCHMARK(BM_Carpenter)->RangeMultiplier(2)->Range(8, 64);

static void BM_FiniteSpectrum(benchmark::State& state) {
  const HermitianOperator a = HermitianOperator::diagonal(RealVector{{2.0, 2.0 / 3, 2.0 / 3, 2.0 / 3}});
  const HermitianOperator s = HermitianOperator::diagonal(RealVector{{3.0, 1.0, 0.0, 0.0}});
  for (auto _ : state) benchmark::DoNotOptimize(choquet::finite_spectrum_solve(a, s));
}
BENCHMARK(BM_FiniteSpectrum);

BENCHMARK_MAIN();
