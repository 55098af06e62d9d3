#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "quadnet/catalog.hpp"

namespace quadnet {

// Fixed-dimension input vectors, one per item id. Immutable after build.
class FeatureStore {
 public:
  explicit FeatureStore(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(const std::string& id) const { return vectors_.count(id) > 0; }

  // Throws DataError naming the id when absent.
  const std::vector<double>& get(const std::string& id) const;

  // Vector must have length dim() and only finite entries.
  void insert(const std::string& id, std::vector<double> values);

 private:
  std::size_t dim_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

struct HashFeaturizerConfig {
  std::size_t char_ngram = 3;   // character n-gram width within each word
  bool word_unigrams = true;
  std::uint64_t seed = 0;
};

// Signed feature hashing over the lowercased title: word unigrams plus
// character n-grams, each token hashed to a bucket in [0, dim) with a
// +/-1 sign bit, then scaled to unit Euclidean norm. Pure function of
// (title, dim, config); titles with no tokens map to the zero vector and
// their ids are appended to zero_ids when given.
FeatureStore hash_featurize(const Catalog& catalog, std::size_t dim,
                            const HashFeaturizerConfig& config,
                            std::vector<std::string>* zero_ids = nullptr,
                            std::size_t threads = 1);

// One line per item: id, tab, dim space-separated decimal reals.
// Mixed dimensions or non-finite entries are fatal. Ids present in the
// catalog but absent from the file are appended to missing_ids when given.
FeatureStore load_vectors(const std::filesystem::path& path, const Catalog& catalog,
                          std::vector<std::string>* missing_ids = nullptr);

// Emits vectors in catalog order using round-trip-exact decimal formatting.
void write_vectors(const FeatureStore& store, const Catalog& catalog,
                   const std::filesystem::path& path);

// Throws DataError naming the first missing id; call before training/eval.
void ensure_coverage(const FeatureStore& store, const std::vector<std::string>& ids);

}  // namespace quadnet
