// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <numbers>

#include "rkwave/optimizer.hpp"
#include "rkwave/schemes.hpp"
#include "rkwave/spectral.hpp"
#include "rkwave/wave1d.hpp"

using namespace rkwave;

namespace {

const SchemeRegistry& registry() {
  static const SchemeRegistry r = builtin_registry();
  return r;
}

GridSpec grid(int n) { return {0.0, std::numbers::pi, -std::numbers::pi / 2, std::numbers::pi / 2, n, n}; }

void BM_error_map(benchmark::State& st) {
  const Scheme& s = registry().get("RK8");
  const GridSpec g = grid(static_cast<int>(st.range(1)));
  for (auto _ : st) {
    auto m = st.range(0) ? error_map(s, g, ErrorKind::phase, true) : error_map_serial(s, g, ErrorKind::phase, true);
    benchmark::DoNotOptimize(m.values.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_error_map)->ArgNames({"parallel", "n"})->Args({0, 400})->Args({1, 400})->Unit(benchmark::kMillisecond);

void BM_metric_sector(benchmark::State& st) {
  const Scheme& s = registry().get("Opt12");
  const RegionSpec region{RegionShape::sector, 1.0, 0, 0, std::numbers::pi / 6, 0.0};
  const int n = static_cast<int>(st.range(1));
  for (auto _ : st) {
    benchmark::DoNotOptimize(metric_sector(s, region, MetricKind::e_amplification, {n, n}, st.range(0) != 0));
  }
}
BENCHMARK(BM_metric_sector)->ArgNames({"parallel", "n"})->Args({0, 256})->Args({1, 256})->Unit(benchmark::kMillisecond);

void BM_sweep(benchmark::State& st) {
  WaveProblem pb;
  pb.ppw = 16;
  pb.final_time = 6;
  const StencilLibrary lib = builtin_stencils();
  FilterSpec f = lib.filter("F6");
  f.strength = 0.2;
  std::vector<Scheme> schemes;
  for (const char* n : {"RK4", "LDDRK46", "Opt8"}) schemes.push_back(registry().get(n));
  std::vector<double> dts;
  for (double cfl : {2.0, 1.5, 1.0, 0.75, 0.5}) dts.push_back(cfl * pb.dx());
  for (auto _ : st) {
    auto r = st.range(0) ? sweep(pb, schemes, dts, lib.stencil("central7"), &f)
                         : sweep_serial(pb, schemes, dts, lib.stencil("central7"), &f);
    benchmark::DoNotOptimize(r.data());
  }
}
BENCHMARK(BM_sweep)->ArgNames({"parallel"})->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
