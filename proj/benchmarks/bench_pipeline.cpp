#include <benchmark/benchmark.h>

#include "sled/descriptor.hpp"
#include "sled/extrema.hpp"
#include "sled/imaging.hpp"
#include "sled/metric.hpp"
#include "sled/retrieval.hpp"
#include "synthetic.hpp"

namespace {

using namespace sled;

RgbImage texture(int size) {
  synthetic::Rng rng(1);
  return synthetic::grating(size, {0.1, 0.4}, 0.0, 60.0, 8.0, rng);
}

void BM_Resample(benchmark::State& state) {
  const RgbImage img = texture(128);
  const double scale = static_cast<double>(state.range(0)) / 6.0;
  for (auto _ : state) benchmark::DoNotOptimize(resample_bicubic(img, scale));
}
BENCHMARK(BM_Resample)->Arg(4)->Arg(9);

void BM_Extrema(benchmark::State& state) {
  const GrayImage gray = to_grayscale(texture(128));
  for (auto _ : state) benchmark::DoNotOptimize(detect_local_extrema(gray, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Extrema)->Arg(3)->Arg(5);

void BM_SingleScaleDescriptor(benchmark::State& state) {
  const RgbImage img = texture(128);
  const PipelineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(compute_scale_descriptor(img, cfg));
}
BENCHMARK(BM_SingleScaleDescriptor)->Unit(benchmark::kMicrosecond);

void BM_MultiscaleDescriptor(benchmark::State& state) {
  const RgbImage img = texture(128);
  const PipelineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(compute_descriptor(img, cfg));
}
BENCHMARK(BM_MultiscaleDescriptor)->Unit(benchmark::kMillisecond);

void BM_RiemannianDistance(benchmark::State& state) {
  synthetic::Rng rng(2);
  const int dim = static_cast<int>(state.range(0));
  const SpdMatrix a(synthetic::random_spd(dim, rng)), b(synthetic::random_spd(dim, rng));
  for (auto _ : state) benchmark::DoNotOptimize(riemannian_distance(a, b));
}
BENCHMARK(BM_RiemannianDistance)->Arg(5)->Arg(20);

void BM_DistanceMatrix(benchmark::State& state) {
  synthetic::Rng rng(3);
  DescriptorIndex index;
  const MultiscaleDescriptor base = compute_descriptor(texture(128), index.config);
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(state.range(0)); ++i) {
    MultiscaleDescriptor d = base;
    for (auto& m : d.matrices) m.matrix.diagonal().array() *= 1.0 + 0.01 * static_cast<double>(i);
    index.entries.push_back({i, "c", std::move(d)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(distance_matrix(index, 1));
}
BENCHMARK(BM_DistanceMatrix)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
