#include "quadnet/quadgen.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "quadnet/error.hpp"
#include "text_util.hpp"

namespace quadnet {

namespace {
constexpr int kMaxNegativeAttempts = 100;
}

std::vector<std::pair<std::string, std::string>> build_pairs(
    const Catalog& catalog, const std::vector<CoPurchaseEdge>& edges,
    QuadGenStats* stats) {
  QuadGenStats local;
  QuadGenStats& s = stats != nullptr ? *stats : local;

  std::vector<std::pair<std::string, std::string>> pairs;
  std::unordered_set<std::string> seen;
  for (const CoPurchaseEdge& edge : edges) {
    const Item& a = catalog.get(edge.source);
    const Item& c = catalog.get(edge.target);
    if (a.category == c.category) {
      ++s.same_category_pairs;
      continue;
    }
    if (!seen.insert(edge.source + '\t' + edge.target).second) {
      ++s.duplicate_pairs;
      continue;
    }
    pairs.emplace_back(edge.source, edge.target);
    ++s.pairs_kept;
  }
  return pairs;
}

std::string sample_similar(const Catalog& catalog, const std::string& anchor,
                           std::mt19937_64& rng) {
  const Item& item = catalog.get(anchor);
  const auto& bucket = catalog.items_in_category(item.category);
  if (bucket.size() < 2) {
    throw DataError("no similar item available: category \"" + item.category +
                    "\" holds only the anchor " + anchor);
  }
  std::uniform_int_distribution<std::size_t> pick(0, bucket.size() - 2);
  std::size_t anchor_pos = static_cast<std::size_t>(
      std::find(bucket.begin(), bucket.end(), anchor) - bucket.begin());
  std::size_t idx = pick(rng);
  if (idx >= anchor_pos) ++idx;  // skip the anchor slot
  return bucket[idx];
}

std::string sample_negative(const Catalog& catalog, const std::string& anchor,
                            const std::string& complementary,
                            const std::string& similar, std::mt19937_64& rng) {
  const auto& items = catalog.items();
  std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
  for (int attempt = 0; attempt < kMaxNegativeAttempts; ++attempt) {
    const std::string& id = items[pick(rng)].id;
    if (id != anchor && id != similar && id != complementary) return id;
  }
  throw DataError("negative sampling failed after " +
                  std::to_string(kMaxNegativeAttempts) + " attempts for anchor " + anchor);
}

std::vector<Quadruplet> generate(const Catalog& catalog,
                                 const std::vector<CoPurchaseEdge>& edges,
                                 std::mt19937_64& rng, std::size_t similars_per_pair,
                                 QuadGenStats* stats) {
  QuadGenStats local;
  QuadGenStats& s = stats != nullptr ? *stats : local;

  auto pairs = build_pairs(catalog, edges, &s);
  std::vector<Quadruplet> quads;
  quads.reserve(pairs.size() * similars_per_pair);

  for (const auto& [anchor, complementary] : pairs) {
    const auto& bucket = catalog.items_in_category(catalog.get(anchor).category);
    if (bucket.size() < 2) {
      ++s.singleton_category_skips;
      continue;
    }
    for (std::size_t k = 0; k < similars_per_pair; ++k) {
      std::string similar = sample_similar(catalog, anchor, rng);
      std::string negative;
      try {
        negative = sample_negative(catalog, anchor, complementary, similar, rng);
      } catch (const DataError&) {
        ++s.negative_failures;
        continue;
      }
      quads.push_back({anchor, similar, complementary, std::move(negative)});
    }
  }
  s.quadruplets = quads.size();
  if (quads.empty()) throw DataError("quadruplet generation produced zero quadruplets");
  return quads;
}

SplitDataset split_by_anchor(const std::vector<Quadruplet>& quads,
                             double train_fraction, std::mt19937_64& rng,
                             std::uint64_t seed_used) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0) {
    throw DataError("train fraction must be in (0,1)");
  }

  std::vector<std::string> anchors;  // first-appearance order
  std::unordered_set<std::string> seen;
  for (const Quadruplet& q : quads) {
    if (seen.insert(q.anchor).second) anchors.push_back(q.anchor);
  }
  if (anchors.size() < 2) {
    throw DataError("anchor-based split needs at least 2 distinct anchors, got " +
                    std::to_string(anchors.size()));
  }

  std::shuffle(anchors.begin(), anchors.end(), rng);
  std::size_t train_count =
      static_cast<std::size_t>(train_fraction * static_cast<double>(anchors.size()));
  if (train_count == 0 || train_count == anchors.size()) {
    throw DataError("split leaves one side empty (" + std::to_string(anchors.size()) +
                    " anchors, fraction " + std::to_string(train_fraction) + ")");
  }
  std::unordered_set<std::string> train_anchors(anchors.begin(),
                                                anchors.begin() + train_count);

  SplitDataset split;
  split.seed = seed_used;
  for (const Quadruplet& q : quads) {
    if (train_anchors.count(q.anchor) > 0) {
      split.train.push_back(q);
    } else {
      split.test.push_back(q);
    }
  }
  if (split.train.empty() || split.test.empty()) {
    throw DataError("anchor split produced an empty train or test side");
  }
  return split;
}

void write_quads(const std::vector<Quadruplet>& quads,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open quadruplet file for writing: " + path.string());
  for (const Quadruplet& q : quads) {
    out << q.anchor << '\t' << q.similar << '\t' << q.complementary << '\t'
        << q.negative << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<Quadruplet> read_quads(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open quadruplet file: " + path.string());
  std::vector<Quadruplet> quads;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() != 4) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 4 tab-separated ids");
    }
    Quadruplet q{std::string(detail::trim(cols[0])), std::string(detail::trim(cols[1])),
                 std::string(detail::trim(cols[2])), std::string(detail::trim(cols[3]))};
    if (q.anchor.empty() || q.similar.empty() || q.complementary.empty() ||
        q.negative.empty()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": empty id");
    }
    quads.push_back(std::move(q));
  }
  if (quads.empty()) throw DataError("no quadruplets in file: " + path.string());
  return quads;
}

void write_manifest(const SplitDataset& split, double train_fraction,
                    const QuadGenStats& stats, const std::filesystem::path& path) {
  std::unordered_set<std::string> train_anchors, test_anchors;
  for (const Quadruplet& q : split.train) train_anchors.insert(q.anchor);
  for (const Quadruplet& q : split.test) test_anchors.insert(q.anchor);

  nlohmann::json manifest{
      {"seed", split.seed},
      {"train_fraction", train_fraction},
      {"counts",
       {{"quadruplets", stats.quadruplets},
        {"train", split.train.size()},
        {"test", split.test.size()},
        {"train_anchors", train_anchors.size()},
        {"test_anchors", test_anchors.size()},
        {"pairs_kept", stats.pairs_kept}}},
      {"skips",
       {{"same_category_pairs", stats.same_category_pairs},
        {"duplicate_pairs", stats.duplicate_pairs},
        {"singleton_categories", stats.singleton_category_skips},
        {"negative_failures", stats.negative_failures}}}};

  std::ofstream out(path);
  if (!out) throw DataError("cannot open manifest for writing: " + path.string());
  out << manifest.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace quadnet
