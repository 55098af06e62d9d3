#include "quadnet/retrieve.hpp"

#include <algorithm>
#include <cmath>

#include "quadnet/error.hpp"

namespace quadnet {

namespace {

double row_distance(std::span<const double> u, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double diff = u[i] - v[i];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

std::size_t anchor_row(const EmbeddingIndex& index, const std::string& anchor) {
  auto it = index.row_of.find(anchor);
  if (it == index.row_of.end()) {
    throw DataError("anchor id not in index: " + anchor);
  }
  return it->second;
}

void sort_and_clip(std::vector<Neighbor>& out, std::size_t k,
                   const std::vector<double>& keys) {
  // keys align with out; ties fall back to id order.
  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
    if (keys[lhs] != keys[rhs]) return keys[lhs] < keys[rhs];
    return out[lhs].id < out[rhs].id;
  });
  std::vector<Neighbor> sorted;
  sorted.reserve(std::min(k, out.size()));
  for (std::size_t i = 0; i < order.size() && i < k; ++i) {
    sorted.push_back(std::move(out[order[i]]));
  }
  out = std::move(sorted);
}

}  // namespace

EmbeddingIndex build_index(const Catalog& catalog, const FeatureStore& store,
                           const ProjectionParams& params) {
  EmbeddingIndex index;
  index.dim = params.dims.d_out;
  for (const Item& item : catalog.items()) {
    ProjectedPoint p = forward(params, store.get(item.id));
    if (p.degenerate) {
      index.degenerate_ids.push_back(item.id);
      continue;
    }
    index.row_of.emplace(item.id, index.ids.size());
    index.ids.push_back(item.id);
    index.categories.push_back(item.category);
    index.units.insert(index.units.end(), p.unit.begin(), p.unit.end());
  }
  if (index.ids.empty()) {
    throw DataError("embedding index is empty: every projection was degenerate");
  }
  return index;
}

std::vector<Neighbor> query_similar(const EmbeddingIndex& index,
                                    const std::string& anchor, std::size_t k) {
  std::size_t a = anchor_row(index, anchor);
  std::span<const double> a_row = index.row(a);

  std::vector<Neighbor> out;
  std::vector<double> keys;
  out.reserve(index.size());
  keys.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (i == a) continue;
    double d = row_distance(a_row, index.row(i));
    out.push_back({index.ids[i], d});
    keys.push_back(d);
  }
  sort_and_clip(out, k, keys);
  return out;
}

std::vector<Neighbor> query_complementary(const EmbeddingIndex& index,
                                          const std::string& anchor, std::size_t k,
                                          const LossConfig& config,
                                          bool category_filter) {
  std::size_t a = anchor_row(index, anchor);
  std::span<const double> a_row = index.row(a);
  const std::string& anchor_category = index.categories[a];
  double center = (config.margin_similar + config.margin_complementary) / 2.0;

  std::vector<Neighbor> out;
  std::vector<double> keys;  // band-center affinity
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (i == a) continue;
    if (category_filter && index.categories[i] == anchor_category) continue;
    double d = row_distance(a_row, index.row(i));
    if (d <= config.margin_similar || d > config.margin_complementary) continue;
    out.push_back({index.ids[i], d});
    keys.push_back(std::fabs(d - center));
  }
  sort_and_clip(out, k, keys);
  return out;
}

}  // namespace quadnet
