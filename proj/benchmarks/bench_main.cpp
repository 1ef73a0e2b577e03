#include <benchmark/benchmark.h>

#include <random>

#include "fakedet/augmentation.hpp"
#include "fakedet/network.hpp"
#include "fakedet/transforms.hpp"

namespace {

fakedet::PlanarImage noise(int h, int w, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  fakedet::PlanarImage img(h, w, c);
  for (double& v : img.data()) v = u(rng);
  return img;
}

void BM_BlockwiseDft(benchmark::State& state) {
  const auto img = noise(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fakedet::blockwise_dft(img));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_BlockwiseDft)->Arg(64)->Arg(256);

void BM_HaarDwt(benchmark::State& state) {
  const auto img = noise(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(fakedet::blockwise_haar_dwt(img));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_HaarDwt)->Arg(64)->Arg(256);

void BM_FrequencyCube(benchmark::State& state) {
  const auto img = noise(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 3, 3);
  const fakedet::TransformConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fakedet::assemble_frequency_cube(img, cfg));
}
BENCHMARK(BM_FrequencyCube)->Arg(64)->Arg(256);

void BM_GaussianBlur(benchmark::State& state) {
  const auto img = noise(64, 64, 3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(fakedet::gaussian_blur(img, static_cast<double>(state.range(0))));
}
BENCHMARK(BM_GaussianBlur)->Arg(1)->Arg(5);

void BM_Forward(benchmark::State& state) {
  fakedet::NetworkSpec spec;
  spec.input_channels = 18;
  const auto params = fakedet::init_params(spec, 1);
  const std::vector<fakedet::PlanarImage> batch{noise(64, 64, 18, 5)};
  const auto precision = state.range(0) ? fakedet::Precision::kFloat32 : fakedet::Precision::kFloat64;
  for (auto _ : state) benchmark::DoNotOptimize(fakedet::forward(params, batch, precision));
}
BENCHMARK(BM_Forward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LossAndGrad(benchmark::State& state) {
  fakedet::NetworkSpec spec;
  spec.input_channels = 18;
  const auto params = fakedet::init_params(spec, 1);
  const std::vector<fakedet::PlanarImage> batch{noise(64, 64, 18, 6)};
  const std::vector<fakedet::Label> labels{fakedet::Label::kFake};
  const auto precision = state.range(0) ? fakedet::Precision::kFloat32 : fakedet::Precision::kFloat64;
  for (auto _ : state) benchmark::DoNotOptimize(fakedet::loss_and_grad(params, batch, labels, 5e-4, precision));
}
BENCHMARK(BM_LossAndGrad)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
