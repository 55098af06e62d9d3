#include <doctest.h>

#include <algorithm>
#include <set>

#include "quadnet/catalog.hpp"
#include "quadnet/error.hpp"
#include "test_util.hpp"

using namespace quadnet;
using test::TempDir;
using test::write_file;

TEST_CASE("load_catalog reads a TSV with distinct ids") {
  TempDir tmp("catalog");
  write_file(tmp.path("c.tsv"),
             "a1\tblue top\ttops\n"
             "b2\tslim jeans\tjeans\n"
             "c3\tred top\ttops\n");
  CatalogLoadStats stats;
  Catalog catalog = load_catalog(tmp.path("c.tsv"), CatalogFormat::kTsv, &stats);

  CHECK(catalog.size() == 3);
  CHECK(stats.loaded == 3);
  CHECK(stats.malformed == 0);
  CHECK(catalog.get("a1").title == "blue top");
  CHECK(catalog.items_in_category("tops") == std::vector<std::string>{"a1", "c3"});
  CHECK(catalog.items_in_category("jeans") == std::vector<std::string>{"b2"});
}

TEST_CASE("load_catalog keeps the first of a duplicate id and counts it") {
  TempDir tmp("catalog");
  write_file(tmp.path("c.tsv"),
             "a1\tfirst\ttops\n"
             "a1\tsecond\tjeans\n"
             "b2\tother\tjeans\n");
  CatalogLoadStats stats;
  Catalog catalog = load_catalog(tmp.path("c.tsv"), CatalogFormat::kTsv, &stats);

  CHECK(catalog.size() == 2);
  CHECK(stats.duplicates == 1);
  CHECK(catalog.get("a1").title == "first");
}

TEST_CASE("load_catalog rejects a file with zero valid rows") {
  TempDir tmp("catalog");
  write_file(tmp.path("empty.tsv"), "");
  CHECK_THROWS_WITH_AS(load_catalog(tmp.path("empty.tsv"), CatalogFormat::kTsv),
                       doctest::Contains("zero valid rows"), DataError);

  write_file(tmp.path("junk.tsv"), "only-one-column\nanother\n");
  CHECK_THROWS_AS(load_catalog(tmp.path("junk.tsv"), CatalogFormat::kTsv), DataError);
  CHECK_THROWS_AS(load_catalog(tmp.path("missing.tsv"), CatalogFormat::kTsv), DataError);
}

TEST_CASE("load_catalog skips malformed rows and reports line numbers") {
  TempDir tmp("catalog");
  write_file(tmp.path("c.tsv"),
             "a1\tok\ttops\n"
             "broken row without tabs\n"
             "b2\t  \tjeans\n"
             "c3\tok too\tjeans\n");
  CatalogLoadStats stats;
  Catalog catalog = load_catalog(tmp.path("c.tsv"), CatalogFormat::kTsv, &stats);

  CHECK(catalog.size() == 2);
  CHECK(stats.malformed == 2);
  REQUIRE(stats.warnings.size() == 2);
  CHECK(stats.warnings[0].find(":2") != std::string::npos);
  CHECK(stats.warnings[1].find(":3") != std::string::npos);
}

TEST_CASE("load_catalog parses JSONL and trims whitespace") {
  TempDir tmp("catalog");
  write_file(tmp.path("c.jsonl"),
             R"({"id": " a1 ", "title": " blue top ", "category": "tops"})"
             "\n"
             R"({"id": "b2", "title": "jeans", "category": 7})"
             "\n");
  CatalogLoadStats stats;
  Catalog catalog = load_catalog(tmp.path("c.jsonl"), CatalogFormat::kJsonl, &stats);

  CHECK(catalog.size() == 1);
  CHECK(stats.malformed == 1);
  CHECK(catalog.get("a1").title == "blue top");
}

TEST_CASE("catalog round-trips through both formats") {
  Catalog original = test::make_catalog({{"a1", "blue top", "tops"},
                                         {"b2", "slim jeans", "jeans"},
                                         {"c3", "wool scarf", "scarves"}});
  TempDir tmp("catalog");
  for (CatalogFormat format : {CatalogFormat::kJsonl, CatalogFormat::kTsv}) {
    auto path = tmp.path(format == CatalogFormat::kJsonl ? "r.jsonl" : "r.tsv");
    write_catalog(original, path, format);
    Catalog loaded = load_catalog(path, format);
    REQUIRE(loaded.size() == original.size());
    for (const Item& item : original.items()) {
      const Item& got = loaded.get(item.id);
      CHECK(got.title == item.title);
      CHECK(got.category == item.category);
    }
  }
}

TEST_CASE("items_in_category partitions the catalog") {
  std::mt19937_64 rng(11);
  Catalog catalog = test::random_catalog(rng, 8, 5);

  std::set<std::string> seen;
  std::size_t total = 0;
  for (const std::string& category : catalog.categories()) {
    const auto& bucket = catalog.items_in_category(category);
    total += bucket.size();
    for (const std::string& id : bucket) {
      CHECK(seen.insert(id).second);  // no id in two buckets
      CHECK(catalog.get(id).category == category);
    }
  }
  CHECK(total == catalog.size());
  CHECK(catalog.items_in_category("no-such-category").empty());
}

TEST_CASE("load_edges keeps resolvable pairs and filters the rest") {
  Catalog catalog = test::make_catalog(
      {{"a", "t", "tops"}, {"b", "t", "jeans"}, {"c", "t", "shoes"}});
  TempDir tmp("edges");
  write_file(tmp.path("e.tsv"),
             "a\tb\n"      // kept
             "a\ta\n"      // self-loop
             "a\tx\n"      // dangling
             "malformed\n"
             "b\tc\n");    // kept
  EdgeLoadStats stats;
  auto edges = load_edges(tmp.path("e.tsv"), catalog, &stats);

  REQUIRE(edges.size() == 2);
  CHECK(edges[0].source == "a");
  CHECK(edges[0].target == "b");
  CHECK(stats.self_loops == 1);
  CHECK(stats.dangling == 1);
  CHECK(stats.malformed == 1);
  for (const CoPurchaseEdge& e : edges) {
    CHECK(catalog.contains(e.source));
    CHECK(catalog.contains(e.target));
  }
}

TEST_CASE("catalog lookups") {
  Catalog catalog = test::make_catalog({{"a", "t", "tops"}});
  CHECK(catalog.find("a") != nullptr);
  CHECK(catalog.find("zz") == nullptr);
  CHECK_THROWS_WITH_AS(catalog.get("zz"), doctest::Contains("zz"), DataError);
}

TEST_CASE("write_catalog refuses TSV fields that embed a tab") {
  Catalog catalog = test::make_catalog({{"a", "title\twith tab", "tops"}});
  TempDir tmp("catalog");
  CHECK_THROWS_AS(write_catalog(catalog, tmp.path("bad.tsv"), CatalogFormat::kTsv),
                  DataError);
  // JSONL escapes it instead
  CHECK_NOTHROW(write_catalog(catalog, tmp.path("ok.jsonl"), CatalogFormat::kJsonl));
  Catalog loaded = load_catalog(tmp.path("ok.jsonl"), CatalogFormat::kJsonl);
  CHECK(loaded.get("a").title == "title\twith tab");
}
