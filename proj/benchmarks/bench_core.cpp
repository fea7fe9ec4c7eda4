#include <benchmark/benchmark.h>

#include "bdmix/evolve.hpp"
#include "bdmix/families.hpp"
#include "bdmix/hitting.hpp"
#include "bdmix/separation.hpp"
#include "bdmix/spectral.hpp"

namespace {

bdmix::Chain biased(std::size_t n) {
  bdmix::FamilySpec spec;
  spec.kind = bdmix::FamilyKind::biased_walk;
  spec.n = n;
  return bdmix::generate(spec);
}

bdmix::Chain srw(std::size_t n) {
  bdmix::FamilySpec spec;
  spec.kind = bdmix::FamilyKind::lazy_srw;
  spec.n = n;
  return bdmix::generate(spec);
}

void BM_Eigenvalues(benchmark::State& state) {
  const bdmix::Chain c = biased(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bdmix::eigenvalues(c).gap);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Eigenvalues)->RangeMultiplier(4)->Range(64, 1024)->Complexity();

void BM_SpectralGap(benchmark::State& state) {
  const bdmix::Chain c = srw(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bdmix::spectral_gap(c).gap);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpectralGap)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_MixingTimeBiased(benchmark::State& state) {
  const bdmix::Chain c = biased(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bdmix::mixing_time(c, 0.25));
}
BENCHMARK(BM_MixingTimeBiased)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_MixingTimeSrw(benchmark::State& state) {
  const bdmix::Chain c = srw(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bdmix::mixing_time(c, 0.25));
}
BENCHMARK(BM_MixingTimeSrw)->RangeMultiplier(2)->Range(64, 256)->Unit(benchmark::kMillisecond);

void BM_HittingPmf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const bdmix::Chain c = biased(n);
  for (auto _ : state) benchmark::DoNotOptimize(bdmix::hitting_pmf(c, 0, n).expectation);
}
BENCHMARK(BM_HittingPmf)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMillisecond);

void BM_ExpectedHitting(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const bdmix::Chain c = srw(n);
  for (auto _ : state) benchmark::DoNotOptimize(bdmix::expected_hitting_time(c, 0, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExpectedHitting)->RangeMultiplier(8)->Range(64, 1 << 18)->Complexity();

void BM_SeparationTime(benchmark::State& state) {
  const bdmix::Chain c = biased(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bdmix::separation_time(c, 0.25));
}
BENCHMARK(BM_SeparationTime)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
