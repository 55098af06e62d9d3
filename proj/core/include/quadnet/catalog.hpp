#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace quadnet {

struct Item {
  std::string id;
  std::string title;
  std::string category;
};

// One directed co-purchase pair. Source is the anchor role, target the
// complementary role; listed edges are not symmetrized.
struct CoPurchaseEdge {
  std::string source;
  std::string target;
};

enum class CatalogFormat { kJsonl, kTsv };

// Item store indexed by id and by category. Immutable after loading;
// category buckets keep catalog insertion order.
class Catalog {
 public:
  // Returns false and leaves the catalog unchanged when the id is taken.
  bool add(Item item);

  bool contains(const std::string& id) const { return index_.count(id) > 0; }
  const Item* find(const std::string& id) const;
  // Throws DataError naming the id when absent.
  const Item& get(const std::string& id) const;

  const std::vector<Item>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  // Ids in insertion order; empty list for an unknown category.
  const std::vector<std::string>& items_in_category(const std::string& category) const;
  std::vector<std::string> categories() const;

 private:
  std::vector<Item> items_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, std::vector<std::string>> by_category_;
};

struct CatalogLoadStats {
  std::size_t rows_read = 0;
  std::size_t malformed = 0;
  std::size_t duplicates = 0;
  std::size_t loaded = 0;
  std::vector<std::string> warnings;
};

// Formats: JSONL with keys id/title/category, or headerless 3-column TSV.
// Malformed rows are skipped and counted; duplicate ids keep the first
// occurrence. Zero valid rows is a DataError.
Catalog load_catalog(const std::filesystem::path& path, CatalogFormat format,
                     CatalogLoadStats* stats = nullptr);

void write_catalog(const Catalog& catalog, const std::filesystem::path& path,
                   CatalogFormat format);

struct EdgeLoadStats {
  std::size_t lines_read = 0;
  std::size_t malformed = 0;
  std::size_t self_loops = 0;
  std::size_t dangling = 0;
  std::size_t loaded = 0;
  std::vector<std::string> warnings;
};

// Two tab-separated ids per line. Self-loops and edges with endpoints
// missing from the catalog are dropped and counted.
std::vector<CoPurchaseEdge> load_edges(const std::filesystem::path& path,
                                       const Catalog& catalog,
                                       EdgeLoadStats* stats = nullptr);

void write_edges(const std::vector<CoPurchaseEdge>& edges,
                 const std::filesystem::path& path);

}  // namespace quadnet
