#include "quadnet/featurizer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "quadnet/error.hpp"
#include "text_util.hpp"

namespace quadnet {

namespace {

// Stable 64-bit mixes; the featurizer must not depend on std::hash.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view token, std::uint64_t seed_mix) {
  std::uint64_t h = 1469598103934665603ull ^ seed_mix;
  for (unsigned char c : token) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool is_token_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
}

// Lowercased alphanumeric runs; bytes above ASCII pass through so UTF-8
// words survive intact.
std::vector<std::string> tokenize(std::string_view title) {
  std::string lower;
  lower.reserve(title.size());
  for (unsigned char c : title) {
    lower.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                         : static_cast<char>(c));
  }
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < lower.size()) {
    if (!is_token_byte(static_cast<unsigned char>(lower[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < lower.size() && is_token_byte(static_cast<unsigned char>(lower[i]))) ++i;
    tokens.emplace_back(lower.substr(start, i - start));
  }
  return tokens;
}

void accumulate_token(std::string_view token, std::uint64_t seed_mix,
                      std::vector<double>& values) {
  std::uint64_t h = fnv1a(token, seed_mix);
  std::size_t bucket = h % values.size();
  double sign = (splitmix64(h) & 1ull) != 0 ? 1.0 : -1.0;
  values[bucket] += sign;
}

std::vector<double> featurize_title(std::string_view title, std::size_t dim,
                                    const HashFeaturizerConfig& config) {
  std::vector<double> values(dim, 0.0);
  std::uint64_t word_mix = splitmix64(config.seed ^ 0x776f7264ull);  // "word"
  std::uint64_t char_mix = splitmix64(config.seed ^ 0x63686172ull);  // "char"

  for (const std::string& token : tokenize(title)) {
    if (config.word_unigrams) accumulate_token(token, word_mix, values);
    if (config.char_ngram > 0 && token.size() >= config.char_ngram) {
      for (std::size_t i = 0; i + config.char_ngram <= token.size(); ++i) {
        accumulate_token(std::string_view(token).substr(i, config.char_ngram),
                         char_mix, values);
      }
    }
  }

  double norm_sq = 0.0;
  for (double v : values) norm_sq += v * v;
  if (norm_sq > 0.0) {
    double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : values) v *= inv;
  }
  return values;
}

}  // namespace

const std::vector<double>& FeatureStore::get(const std::string& id) const {
  auto it = vectors_.find(id);
  if (it == vectors_.end()) throw DataError("no feature vector for item id: " + id);
  return it->second;
}

void FeatureStore::insert(const std::string& id, std::vector<double> values) {
  if (values.size() != dim_) {
    throw DataError("feature vector for " + id + " has dimension " +
                    std::to_string(values.size()) + ", expected " + std::to_string(dim_));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("non-finite feature value for item id: " + id);
  }
  vectors_[id] = std::move(values);
}

FeatureStore hash_featurize(const Catalog& catalog, std::size_t dim,
                            const HashFeaturizerConfig& config,
                            std::vector<std::string>* zero_ids, std::size_t threads) {
  if (dim < 8) throw DataError("hash dimension must be at least 8");

  const auto& items = catalog.items();
  std::vector<std::vector<double>> results(items.size());

  // Per-item featurization is pure, so any shard layout yields the same
  // vectors; the merge below is in catalog order regardless.
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      results[i] = featurize_title(items[i].title, dim, config);
    }
  };
  if (threads <= 1 || items.size() < 2 * threads) {
    run_range(0, items.size());
  } else {
    std::vector<std::thread> workers;
    std::size_t chunk = (items.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      std::size_t begin = t * chunk;
      std::size_t end = std::min(items.size(), begin + chunk);
      if (begin >= end) break;
      workers.emplace_back(run_range, begin, end);
    }
    for (auto& w : workers) w.join();
  }

  FeatureStore store(dim);
  for (std::size_t i = 0; i < items.size(); ++i) {
    bool all_zero = true;
    for (double v : results[i]) {
      if (v != 0.0) {
        all_zero = false;
        break;
      }
    }
    if (all_zero && zero_ids != nullptr) zero_ids->push_back(items[i].id);
    store.insert(items[i].id, std::move(results[i]));
  }
  return store;
}

FeatureStore load_vectors(const std::filesystem::path& path, const Catalog& catalog,
                          std::vector<std::string>* missing_ids) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vector file: " + path.string());

  std::size_t dim = 0;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::string where = path.string() + ":" + std::to_string(line_no);

    auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(where + ": expected id<TAB>values");
    std::string id(detail::trim(std::string_view(line).substr(0, tab)));
    if (id.empty()) throw DataError(where + ": empty item id");

    std::vector<double> values;
    const char* p = line.c_str() + tab + 1;
    const char* end = line.c_str() + line.size();
    while (p < end) {
      char* next = nullptr;
      double v = std::strtod(p, &next);
      if (next == p) break;
      if (!std::isfinite(v)) throw DataError(where + ": non-finite value for id " + id);
      values.push_back(v);
      p = next;
    }
    while (p < end && (*p == ' ' || *p == '\r')) ++p;
    if (p < end) throw DataError(where + ": unparsable value token for id " + id);
    if (values.empty()) throw DataError(where + ": no values for id " + id);

    if (dim == 0) {
      dim = values.size();
    } else if (values.size() != dim) {
      throw DataError(where + ": dimension " + std::to_string(values.size()) +
                      " does not match first row dimension " + std::to_string(dim));
    }
    rows.emplace_back(std::move(id), std::move(values));
  }
  if (rows.empty()) throw DataError("no vectors in file: " + path.string());

  FeatureStore store(dim);
  for (auto& [id, values] : rows) store.insert(id, std::move(values));

  if (missing_ids != nullptr) {
    for (const Item& item : catalog.items()) {
      if (!store.contains(item.id)) missing_ids->push_back(item.id);
    }
  }
  return store;
}

void write_vectors(const FeatureStore& store, const Catalog& catalog,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open vector file for writing: " + path.string());
  char buf[32];
  for (const Item& item : catalog.items()) {
    if (!store.contains(item.id)) continue;
    out << item.id << '\t';
    const auto& values = store.get(item.id);
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", values[i]);
      if (i > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

void ensure_coverage(const FeatureStore& store, const std::vector<std::string>& ids) {
  for (const std::string& id : ids) {
    if (!store.contains(id)) {
      throw DataError("feature store is missing item id: " + id);
    }
  }
}

}  // namespace quadnet
