#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "quadnet/retrieve.hpp"

namespace {

using namespace quadnet;

EmbeddingIndex random_index(std::size_t rows, std::size_t dim) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EmbeddingIndex index;
  index.dim = dim;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> v(dim);
    double norm = 0.0;
    for (double& x : v) {
      x = u(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    std::string id = "item" + std::to_string(i);
    index.row_of.emplace(id, index.ids.size());
    index.ids.push_back(std::move(id));
    index.categories.push_back("cat" + std::to_string(i % 16));
    index.units.insert(index.units.end(), v.begin(), v.end());
  }
  return index;
}

void BM_QuerySimilar(benchmark::State& state) {
  EmbeddingIndex index = random_index(static_cast<std::size_t>(state.range(0)), 128);
  for (auto _ : state) {
    auto out = query_similar(index, "item0", 10);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_QuerySimilar)->Arg(1000)->Arg(10000);

void BM_QueryComplementary(benchmark::State& state) {
  EmbeddingIndex index = random_index(static_cast<std::size_t>(state.range(0)), 128);
  LossConfig config;
  for (auto _ : state) {
    auto out = query_complementary(index, "item0", 10, config);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_QueryComplementary)->Arg(1000)->Arg(10000);

}  // namespace
