#include "quadnet/catalog.hpp"

#include <fstream>

#include <json.hpp>

#include "quadnet/error.hpp"
#include "text_util.hpp"

namespace quadnet {

namespace {

const std::vector<std::string> kEmptyBucket;

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file for reading: " + path.string());
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open file for writing: " + path.string());
  return out;
}

void note(CatalogLoadStats* stats, std::string message) {
  if (stats != nullptr) stats->warnings.push_back(std::move(message));
}

// Returns false when the row is malformed.
bool parse_row(const std::string& line, std::size_t line_no, CatalogFormat format,
               const std::filesystem::path& path, Item& item, CatalogLoadStats* stats) {
  std::string where = path.string() + ":" + std::to_string(line_no);
  if (format == CatalogFormat::kJsonl) {
    auto parsed = nlohmann::json::parse(line, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      note(stats, where + ": invalid JSON object");
      return false;
    }
    for (const char* key : {"id", "title", "category"}) {
      if (!parsed.contains(key) || !parsed[key].is_string()) {
        note(stats, where + ": missing string field \"" + key + "\"");
        return false;
      }
    }
    item.id = std::string(detail::trim(parsed["id"].get<std::string>()));
    item.title = std::string(detail::trim(parsed["title"].get<std::string>()));
    item.category = std::string(detail::trim(parsed["category"].get<std::string>()));
  } else {
    auto cols = detail::split(line, '\t');
    if (cols.size() != 3) {
      note(stats, where + ": expected 3 tab-separated columns, got " +
                      std::to_string(cols.size()));
      return false;
    }
    item.id = std::string(detail::trim(cols[0]));
    item.title = std::string(detail::trim(cols[1]));
    item.category = std::string(detail::trim(cols[2]));
  }
  if (item.id.empty() || item.title.empty() || item.category.empty()) {
    note(stats, where + ": empty id, title, or category");
    return false;
  }
  return true;
}

std::string tsv_escape_check(const std::string& field) {
  if (field.find('\t') != std::string::npos || field.find('\n') != std::string::npos) {
    throw DataError("field contains a tab or newline and cannot be written as TSV: " + field);
  }
  return field;
}

}  // namespace

bool Catalog::add(Item item) {
  auto [it, inserted] = index_.emplace(item.id, items_.size());
  if (!inserted) return false;
  by_category_[item.category].push_back(item.id);
  items_.push_back(std::move(item));
  return true;
}

const Item* Catalog::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &items_[it->second];
}

const Item& Catalog::get(const std::string& id) const {
  const Item* item = find(id);
  if (item == nullptr) throw DataError("unknown item id: " + id);
  return *item;
}

const std::vector<std::string>& Catalog::items_in_category(const std::string& category) const {
  auto it = by_category_.find(category);
  return it == by_category_.end() ? kEmptyBucket : it->second;
}

std::vector<std::string> Catalog::categories() const {
  std::vector<std::string> out;
  out.reserve(by_category_.size());
  for (const auto& [label, ids] : by_category_) out.push_back(label);
  return out;
}

Catalog load_catalog(const std::filesystem::path& path, CatalogFormat format,
                     CatalogLoadStats* stats) {
  auto in = open_for_read(path);
  Catalog catalog;
  CatalogLoadStats local;
  CatalogLoadStats& s = stats != nullptr ? *stats : local;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    ++s.rows_read;
    Item item;
    if (!parse_row(line, line_no, format, path, item, &s)) {
      ++s.malformed;
      continue;
    }
    if (!catalog.add(std::move(item))) {
      ++s.duplicates;
      note(&s, path.string() + ":" + std::to_string(line_no) + ": duplicate id, keeping first");
      continue;
    }
    ++s.loaded;
  }
  if (catalog.empty()) {
    throw DataError("zero valid rows in catalog file: " + path.string());
  }
  return catalog;
}

void write_catalog(const Catalog& catalog, const std::filesystem::path& path,
                   CatalogFormat format) {
  auto out = open_for_write(path);
  for (const Item& item : catalog.items()) {
    if (format == CatalogFormat::kJsonl) {
      nlohmann::json row{{"id", item.id}, {"title", item.title}, {"category", item.category}};
      out << row.dump() << '\n';
    } else {
      out << tsv_escape_check(item.id) << '\t' << tsv_escape_check(item.title) << '\t'
          << tsv_escape_check(item.category) << '\n';
    }
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<CoPurchaseEdge> load_edges(const std::filesystem::path& path,
                                       const Catalog& catalog, EdgeLoadStats* stats) {
  auto in = open_for_read(path);
  std::vector<CoPurchaseEdge> edges;
  EdgeLoadStats local;
  EdgeLoadStats& s = stats != nullptr ? *stats : local;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    ++s.lines_read;
    auto cols = detail::split(line, '\t');
    std::string where = path.string() + ":" + std::to_string(line_no);
    if (cols.size() != 2) {
      ++s.malformed;
      s.warnings.push_back(where + ": expected 2 tab-separated columns");
      continue;
    }
    std::string source(detail::trim(cols[0]));
    std::string target(detail::trim(cols[1]));
    if (source.empty() || target.empty()) {
      ++s.malformed;
      s.warnings.push_back(where + ": empty endpoint id");
      continue;
    }
    if (source == target) {
      ++s.self_loops;
      continue;
    }
    if (!catalog.contains(source) || !catalog.contains(target)) {
      ++s.dangling;
      continue;
    }
    edges.push_back({std::move(source), std::move(target)});
    ++s.loaded;
  }
  return edges;
}

void write_edges(const std::vector<CoPurchaseEdge>& edges,
                 const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const CoPurchaseEdge& edge : edges) {
    out << tsv_escape_check(edge.source) << '\t' << tsv_escape_check(edge.target) << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace quadnet
