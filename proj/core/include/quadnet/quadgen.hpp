#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "quadnet/catalog.hpp"

namespace quadnet {

// One training example. Anchor and similar share a category, the
// complementary item is from a different category, and all four ids are
// distinct.
struct Quadruplet {
  std::string anchor;
  std::string similar;
  std::string complementary;
  std::string negative;
};

struct QuadGenStats {
  std::size_t pairs_kept = 0;
  std::size_t same_category_pairs = 0;
  std::size_t duplicate_pairs = 0;
  std::size_t singleton_category_skips = 0;
  std::size_t negative_failures = 0;
  std::size_t quadruplets = 0;
};

// Cross-category (anchor, complementary) pairs from the edge list.
// Same-category edges are dropped and counted; repeated ordered pairs are
// kept once. Output preserves edge order.
std::vector<std::pair<std::string, std::string>> build_pairs(
    const Catalog& catalog, const std::vector<CoPurchaseEdge>& edges,
    QuadGenStats* stats = nullptr);

// Uniform draw from the anchor's category excluding the anchor itself.
// Throws DataError when the category is a singleton.
std::string sample_similar(const Catalog& catalog, const std::string& anchor,
                           std::mt19937_64& rng);

// Uniform draw over the whole catalog, rejecting anchor/similar/complementary
// and redrawing. Throws DataError after 100 rejected attempts.
std::string sample_negative(const Catalog& catalog, const std::string& anchor,
                            const std::string& complementary,
                            const std::string& similar, std::mt19937_64& rng);

// One similar and one negative per retained pair (similars_per_pair raises
// the multiplicity). Pairs that fail sampling are skipped and counted.
// Zero quadruplets is a DataError. Deterministic given the rng state.
std::vector<Quadruplet> generate(const Catalog& catalog,
                                 const std::vector<CoPurchaseEdge>& edges,
                                 std::mt19937_64& rng,
                                 std::size_t similars_per_pair = 1,
                                 QuadGenStats* stats = nullptr);

struct SplitDataset {
  std::vector<Quadruplet> train;
  std::vector<Quadruplet> test;
  std::uint64_t seed = 0;
};

// Shuffles distinct anchors and assigns floor(fraction * count) of them to
// train, the remainder to test; each quadruplet follows its anchor. A split
// that leaves either side empty is a DataError.
SplitDataset split_by_anchor(const std::vector<Quadruplet>& quads,
                             double train_fraction, std::mt19937_64& rng,
                             std::uint64_t seed_used = 0);

// Quadruplet file: four tab-separated ids per line (a, s, c, n).
void write_quads(const std::vector<Quadruplet>& quads,
                 const std::filesystem::path& path);
std::vector<Quadruplet> read_quads(const std::filesystem::path& path);

void write_manifest(const SplitDataset& split, double train_fraction,
                    const QuadGenStats& stats, const std::filesystem::path& path);

}  // namespace quadnet
