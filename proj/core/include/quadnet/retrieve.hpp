#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "quadnet/catalog.hpp"
#include "quadnet/featurizer.hpp"
#include "quadnet/loss.hpp"
#include "quadnet/projector.hpp"

namespace quadnet {

// Unit-vector embeddings for the whole catalog, one row per item in catalog
// order. Immutable after build; queries are exact scans.
struct EmbeddingIndex {
  std::vector<std::string> ids;
  std::vector<std::string> categories;  // aligned with ids
  std::vector<double> units;            // ids.size() x dim, row-major
  std::size_t dim = 0;
  std::vector<std::string> degenerate_ids;
  std::unordered_map<std::string, std::size_t> row_of;

  std::size_t size() const { return ids.size(); }
  std::span<const double> row(std::size_t i) const {
    return {units.data() + i * dim, dim};
  }
};

struct Neighbor {
  std::string id;
  double distance = 0.0;
};

// Projects every item; degenerate projections are excluded and listed.
// An index with zero rows is a DataError.
EmbeddingIndex build_index(const Catalog& catalog, const FeatureStore& store,
                           const ProjectionParams& params);

// k nearest items by ascending distance, anchor excluded, ties broken by id.
std::vector<Neighbor> query_similar(const EmbeddingIndex& index,
                                    const std::string& anchor, std::size_t k);

// Candidates with distance in (m_s, m_c], ranked by closeness to the band
// center (m_s + m_c)/2, ties broken by id. With category_filter, candidates
// from the anchor's own category are excluded. An empty band yields an empty
// list.
std::vector<Neighbor> query_complementary(const EmbeddingIndex& index,
                                          const std::string& anchor, std::size_t k,
                                          const LossConfig& config,
                                          bool category_filter = true);

}  // namespace quadnet
