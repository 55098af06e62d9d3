#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "quadnet/loss.hpp"
#include "quadnet/projector.hpp"

namespace {

using namespace quadnet;

struct Fixture {
  ProjectionParams params;
  std::vector<double> input;
  Fixture() {
    std::mt19937_64 rng(1);
    params = init_params({512, 256, 128}, rng);
    input.resize(512);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& v : input) v = u(rng);
  }
};

void BM_Forward(benchmark::State& state) {
  Fixture f;
  for (auto _ : state) {
    ProjectedPoint p = forward(f.params, f.input);
    benchmark::DoNotOptimize(p.unit.data());
  }
}
BENCHMARK(BM_Forward);

void BM_ForwardBackward(benchmark::State& state) {
  Fixture f;
  std::vector<double> upstream(128, 0.01);
  ParamGradients grads = zero_gradients(f.params.dims);
  for (auto _ : state) {
    ForwardCache cache = forward_cached(f.params, f.input);
    backward_into(f.params, cache, upstream, grads);
    benchmark::DoNotOptimize(grads.w1.data());
  }
}
BENCHMARK(BM_ForwardBackward);

void BM_QuadrupletStep(benchmark::State& state) {
  Fixture f;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> inputs(4, std::vector<double>(512));
  for (auto& x : inputs) {
    for (double& v : x) v = u(rng);
  }
  LossConfig config;
  for (auto _ : state) {
    ForwardCache caches[4];
    for (int i = 0; i < 4; ++i) caches[i] = forward_cached(f.params, inputs[i]);
    QuadProjection proj{caches[0].point, caches[1].point, caches[2].point,
                        caches[3].point};
    UnitGradients ug = loss_gradients(proj, config);
    ParamGradients grads = zero_gradients(f.params.dims);
    backward_into(f.params, caches[0], ug.anchor, grads);
    backward_into(f.params, caches[1], ug.similar, grads);
    backward_into(f.params, caches[2], ug.complementary, grads);
    backward_into(f.params, caches[3], ug.negative, grads);
    benchmark::DoNotOptimize(grads.w2.data());
  }
}
BENCHMARK(BM_QuadrupletStep);

}  // namespace

BENCHMARK_MAIN();
