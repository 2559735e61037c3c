// Serial reference vs OpenMP kernel timings. Arg(0) runs the serial path, Arg(1) the parallel one.

#include "mcov/chain.hpp"
#include "mcov/fixedspec.hpp"
#include "mcov/freespec.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace mcov;

namespace {

Mat random_symmetric(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return 0.5 * (a + a.transpose());
}

void BM_BuildGenerators(benchmark::State& st) {
  const Spectrum s = Spectrum::equally_spaced(4, 5);
  for (auto _ : st) {
    auto g = st.range(0) ? build_generators(s, NuMode::Unit) : build_generators_serial(s, NuMode::Unit);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_BuildGenerators)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ConeLinearOpt(benchmark::State& st) {
  const GeneratorSet gens = build_generators(Spectrum::equally_spaced(4, 5), NuMode::Unit);
  const Mat A = random_symmetric(4, 1);
  for (auto _ : st) {
    auto r = st.range(0) ? cone_linear_opt(A, gens) : cone_linear_opt_serial(A, gens);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ConeLinearOpt)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_SdpLinearOpt(benchmark::State& st) {
  const auto pset = enumerate_canonical_P(4, 4);
  const Mat A = random_symmetric(4, 2);
  for (auto _ : st) {
    auto r = st.range(0) ? sdp_linear_opt(A, pset) : sdp_linear_opt_serial(A, pset);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_SdpLinearOpt)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_GTwoBrute(benchmark::State& st) {
  for (auto _ : st) {
    auto r = st.range(0) ? g_two_brute(12) : g_two_brute_serial(12);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_GTwoBrute)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EnumerateP(benchmark::State& st) {
  for (auto _ : st) {
    auto r = st.range(0) ? enumerate_canonical_P(4, 4) : enumerate_canonical_P_serial(4, 4);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_EnumerateP)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RegionScan(benchmark::State& st) {
  Mat A1 = Mat::Zero(2, 2), A2 = Mat::Zero(2, 2);
  A1(0, 0) = 1.0;
  A2(0, 1) = A2(1, 0) = 0.5;
  const Spectrum s = Spectrum::geometric(2, 5.0, -6, 6);
  for (auto _ : st) {
    auto r = st.range(0) ? region_scan(s, NuMode::Unit, A1, A2, 720) : region_scan_serial(s, NuMode::Unit, A1, A2, 720);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_RegionScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
