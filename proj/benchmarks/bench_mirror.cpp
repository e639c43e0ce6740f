#include <benchmark/benchmark.h>

#include <random>

#include "allpass/enumerate.hpp"
#include "allpass/mirror.hpp"
#include "allpass/roots.hpp"
#include "support.hpp"

using namespace allpass;

namespace {

RootGroup first_pair(const std::vector<RootGroup>& groups) {
  for (const RootGroup& g : groups)
    if (g.kind == RootKind::complex_pair) return g;
  throw std::runtime_error("no pair");
}

void bm_det_roots(benchmark::State& state) {
  std::mt19937 rng(1);
  auto instance = testing::random_instance(
      rng, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
      false);
  for (auto _ : state)
    benchmark::DoNotOptimize(determinantal_roots(instance.poly));
}

void bm_mirror_pair_qr(benchmark::State& state) {
  std::mt19937 rng(2);
  auto instance = testing::random_instance(
      rng, static_cast<int>(state.range(0)), 2, true);
  RootGroup pair = first_pair(instance.groups);
  for (auto _ : state)
    benchmark::DoNotOptimize(mirror_pair_qr(instance.poly, pair));
}

void bm_mirror_pair_svd_polar(benchmark::State& state) {
  std::mt19937 rng(2);
  auto instance = testing::random_instance(
      rng, static_cast<int>(state.range(0)), 2, true);
  RootGroup pair = first_pair(instance.groups);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        realize_via_polar(mirror_pair_svd(instance.poly, pair)));
}

void bm_enumerate_ma2(benchmark::State& state) {
  PolyMat ma2 = testing::ma2_example();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        enumerate_regimes(ma2, MirrorMethod::svd, {}, 1u << 16, 64));
}

}  // namespace

BENCHMARK(bm_det_roots)->Args({2, 1})->Args({3, 2})->Args({4, 3});
BENCHMARK(bm_mirror_pair_qr)->Arg(2)->Arg(3)->Arg(4);
BENCHMARK(bm_mirror_pair_svd_polar)->Arg(2)->Arg(3)->Arg(4);
BENCHMARK(bm_enumerate_ma2);

BENCHMARK_MAIN();
