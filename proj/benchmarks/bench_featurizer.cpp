#include <benchmark/benchmark.h>

#include "quadnet/featurizer.hpp"
#include "quadnet/sample_gen.hpp"

namespace {

using namespace quadnet;

void BM_HashFeaturize(benchmark::State& state) {
  SampleConfig scfg;
  scfg.categories = 10;
  scfg.items_per_category = 100;
  scfg.seed = 1;
  SampleData data = generate_sample(scfg);
  HashFeaturizerConfig config;
  config.seed = 1;
  for (auto _ : state) {
    FeatureStore store =
        hash_featurize(data.catalog, static_cast<std::size_t>(state.range(0)), config);
    benchmark::DoNotOptimize(store.size());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(data.catalog.size()));
}
BENCHMARK(BM_HashFeaturize)->Arg(128)->Arg(512);

}  // namespace
