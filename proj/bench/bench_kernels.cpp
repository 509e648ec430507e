// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
//
// Serial references against their OpenMP kernels.
#include <benchmark/benchmark.h>

#include "bfr/bilinear.hpp"
#include "bfr/ensemble.hpp"
#include "bfr/maximal.hpp"
#include "bfr/partition.hpp"

using namespace bfr;

namespace {

void bilinear(benchmark::State& st, Kernel kernel) {
  const auto n = static_cast<std::size_t>(st.range(0));
  Rng rng(1);
  const auto f = band_limited(rng, n, static_cast<long>(n / 4)), g = band_limited(rng, n, static_cast<long>(n / 4));
  const auto m = hs_symbol(1.5);
  for (auto _ : st) benchmark::DoNotOptimize(bilinear_apply(m, f, g, nullptr, kernel));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n / 2) * static_cast<long>(n / 2));
}
void BM_bilinear_serial(benchmark::State& st) { bilinear(st, Kernel::Serial); }
void BM_bilinear_omp(benchmark::State& st) { bilinear(st, Kernel::Parallel); }
BENCHMARK(BM_bilinear_serial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bilinear_omp)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

std::vector<double> maximal_input(std::size_t n) {
  Rng rng(2);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng) < 0.1 ? U(rng) : 0.0;
  return v;
}
void BM_maximal_serial(benchmark::State& st) {
  const auto v = maximal_input(static_cast<std::size_t>(st.range(0)));
  std::vector<double> out;
  for (auto _ : st) {
    kernels::maximal_serial(v, out);
    benchmark::DoNotOptimize(out.data());
  }
}
void BM_maximal_omp(benchmark::State& st) {
  const auto v = maximal_input(static_cast<std::size_t>(st.range(0)));
  std::vector<double> out;
  for (auto _ : st) {
    kernels::maximal_omp(v, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_maximal_serial)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_maximal_omp)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

const geometry::PartitionOfUnity& partition() {
  static const auto pu = [] {
    geometry::PolygonCollectionOptions opt;
    opt.whitney.depth = 4;
    auto C = geometry::polygon_collection(opt);
    return geometry::PartitionOfUnity(C.rects, opt.alpha);
  }();
  return pu;
}
constexpr int kSide = 256;
void BM_partition_serial(benchmark::State& st) {
  const auto& pu = partition();
  const double step = 2.0 / kSide;
  std::vector<double> out(kSide * kSide);
  for (auto _ : st) {
    for (int iy = 0; iy < kSide; ++iy)
      for (int ix = 0; ix < kSide; ++ix) out[iy * kSide + ix] = pu.total({-1 + ix * step, -1 + iy * step});
    benchmark::DoNotOptimize(out.data());
  }
}
void BM_partition_omp(benchmark::State& st) {
  const auto& pu = partition();
  for (auto _ : st) benchmark::DoNotOptimize(pu.sample_total({-1, -1}, 2.0 / kSide, kSide, kSide));
}
BENCHMARK(BM_partition_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_partition_omp)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
