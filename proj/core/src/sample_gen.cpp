#include "quadnet/sample_gen.hpp"

#include <random>
#include <unordered_set>

#include "quadnet/error.hpp"

namespace quadnet {

namespace {

// Pronounceable synthetic words so titles tokenize like real ones.
std::string make_word(std::mt19937_64& rng, std::size_t syllables) {
  static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n",
                                  "p", "r", "s", "t", "v", "z", "br", "st",
                                  "tr", "pl", "gr", "sh"};
  static const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  std::uniform_int_distribution<std::size_t> onset(0, std::size(kOnsets) - 1);
  std::uniform_int_distribution<std::size_t> vowel(0, std::size(kVowels) - 1);
  std::string word;
  for (std::size_t i = 0; i < syllables; ++i) {
    word += kOnsets[onset(rng)];
    word += kVowels[vowel(rng)];
  }
  return word;
}

std::string unique_word(std::mt19937_64& rng, std::size_t syllables,
                        std::unordered_set<std::string>& used) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::string word = make_word(rng, syllables);
    if (used.insert(word).second) return word;
  }
  throw DataError("sample generator exhausted its word space");
}

std::size_t partner_category(std::size_t c, std::size_t count) {
  std::size_t paired = c ^ 1u;
  return paired < count ? paired : (c + 1) % count;
}

}  // namespace

SampleData generate_sample(const SampleConfig& config) {
  if (config.categories < 2 || config.items_per_category < 2) {
    throw DataError("sample generator needs >= 2 categories and >= 2 items each");
  }
  if (config.pool_tokens == 0 || config.title_tokens == 0) {
    throw DataError("sample generator needs nonempty token pools and titles");
  }

  std::mt19937_64 rng(config.seed);
  std::unordered_set<std::string> used_words;

  std::vector<std::string> category_names;
  std::vector<std::vector<std::string>> pools;
  for (std::size_t c = 0; c < config.categories; ++c) {
    category_names.push_back(unique_word(rng, 3, used_words));
    std::vector<std::string> pool;
    pool.reserve(config.pool_tokens);
    for (std::size_t t = 0; t < config.pool_tokens; ++t) {
      pool.push_back(unique_word(rng, 2, used_words));
    }
    pools.push_back(std::move(pool));
  }

  SampleData data;
  for (std::size_t c = 0; c < config.categories; ++c) {
    std::uniform_int_distribution<std::size_t> pick(0, pools[c].size() - 1);
    for (std::size_t i = 0; i < config.items_per_category; ++i) {
      Item item;
      item.id = category_names[c] + "-" + std::to_string(i);
      item.category = category_names[c];
      for (std::size_t t = 0; t < config.title_tokens; ++t) {
        if (t > 0) item.title += ' ';
        item.title += pools[c][pick(rng)];
      }
      data.catalog.add(std::move(item));
    }
  }

  // Co-purchase edges go to the paired category only.
  for (std::size_t c = 0; c < config.categories; ++c) {
    std::size_t p = partner_category(c, config.categories);
    const auto& targets = data.catalog.items_in_category(category_names[p]);
    std::uniform_int_distribution<std::size_t> pick(0, targets.size() - 1);
    for (std::size_t i = 0; i < config.items_per_category; ++i) {
      std::string source = category_names[c] + "-" + std::to_string(i);
      std::unordered_set<std::size_t> chosen;
      while (chosen.size() < std::min(config.edges_per_item, targets.size())) {
        chosen.insert(pick(rng));
      }
      // Deterministic emission order regardless of set iteration.
      for (std::size_t t = 0; t < targets.size(); ++t) {
        if (chosen.count(t) > 0) data.edges.push_back({source, targets[t]});
      }
    }
  }
  return data;
}

}  // namespace quadnet
