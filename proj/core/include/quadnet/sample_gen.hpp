#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "quadnet/catalog.hpp"

namespace quadnet {

// Synthetic catalog for offline benchmarks: every category draws titles from
// its own token pool, and a pairing map between categories supplies the
// cross-category co-purchase edges.
struct SampleConfig {
  std::size_t categories = 40;
  std::size_t items_per_category = 50;
  std::size_t edges_per_item = 2;
  std::size_t pool_tokens = 20;
  std::size_t title_tokens = 6;
  std::uint64_t seed = 0;
};

struct SampleData {
  Catalog catalog;
  std::vector<CoPurchaseEdge> edges;
};

SampleData generate_sample(const SampleConfig& config);

}  // namespace quadnet
