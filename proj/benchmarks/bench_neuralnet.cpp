#include <benchmark/benchmark.h>

#include <vector>

#include "casimir/neuralnet.hpp"
#include "casimir/rng.hpp"

namespace {

using namespace casimir;

void BM_Forward(benchmark::State& state) {
  const Mlp mlp = mlp_init(MlpArch{{20, 20, 20, 20, 13}}, 1);
  Rng rng(2);
  std::vector<double> x(20);
  for (double& v : x) v = rng.normal();
  ForwardCache cache;
  for (auto _ : state) {
    forward(mlp, x, cache);
    benchmark::DoNotOptimize(cache.activations.back().data());
  }
}
BENCHMARK(BM_Forward);

void BM_BackpropBatch200(benchmark::State& state) {
  const Mlp mlp = mlp_init(MlpArch{{20, 20, 20, 20, 13}}, 1);
  Rng rng(3);
  std::vector<std::vector<double>> xs(200), ys(200);
  std::vector<SampleRef> batch;
  for (int i = 0; i < 200; ++i) {
    xs[i].resize(20);
    ys[i].resize(13);
    for (double& v : xs[i]) v = rng.normal();
    for (double& v : ys[i]) v = rng.normal();
    batch.push_back({xs[i], ys[i]});
  }
  Gradients grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        backprop_grad_with_loss(mlp, batch, CostKind::LogTargetSse, grad));
  }
}
BENCHMARK(BM_BackpropBatch200);

}  // namespace
