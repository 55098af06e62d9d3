// Acceptance suite: eight release criteria, one test case each, with a
// printed verdict line per criterion. Criteria 1 and 3 share one trained
// benchmark so the expensive runs happen once.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "quadnet/cli.hpp"
#include "quadnet/error.hpp"
#include "quadnet/eval.hpp"
#include "quadnet/loss.hpp"
#include "quadnet/projector.hpp"
#include "quadnet/quadgen.hpp"
#include "quadnet/retrieve.hpp"
#include "quadnet/sample_gen.hpp"
#include "quadnet/trainer.hpp"
#include "grad_check.hpp"
#include "test_util.hpp"

using namespace quadnet;

namespace {

void verdict(int criterion, const std::string& name, bool ok) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, name.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion ", criterion, " (", name, ")");
}

constexpr std::uint64_t kBenchSeed = 7;

struct Benchmark {
  FeatureStore store{512};
  SplitDataset split;
  EvalReport untrained;
  EvalReport untrained_train;
  EvalReport quad_test;
  EvalReport quad_train;
  EvalReport triplet_test;
  bool loss_descended = false;  // epoch 30 mean below epoch 1 mean
  double wall_seconds = 0.0;
  std::size_t catalog_categories = 0;
  std::size_t catalog_items = 0;
};

// Trains the planted benchmark once: quadruplet mode, triplet mode, and an
// untrained reference, all under the default hyperparameters.
const Benchmark& benchmark() {
  static const Benchmark bench = [] {
    auto t0 = std::chrono::steady_clock::now();
    Benchmark b;

    SampleConfig scfg;
    scfg.seed = kBenchSeed;  // 40 categories x 50 items, 2 edges per item
    SampleData data = generate_sample(scfg);
    b.catalog_categories = data.catalog.categories().size();
    b.catalog_items = data.catalog.size();

    HashFeaturizerConfig hcfg;
    hcfg.seed = kBenchSeed;
    b.store = hash_featurize(data.catalog, 512, hcfg);

    std::mt19937_64 rng(kBenchSeed);
    auto quads = generate(data.catalog, data.edges, rng, 1);
    b.split = split_by_anchor(quads, 0.9, rng, kBenchSeed);

    TrainConfig config;  // batch 512, lr 0.001, 30 epochs, adam, 256/128
    config.seed = kBenchSeed;
    LossConfig eval_margins = config.loss;

    std::mt19937_64 init_rng(kBenchSeed);
    ProjectionParams virgin = init_params({512, 256, 128}, init_rng);
    b.untrained = evaluate(b.split.test, virgin, b.store, eval_margins);
    b.untrained_train = evaluate(b.split.train, virgin, b.store, eval_margins);

    TrainState quad_state = train(b.split.train, b.store, config);
    b.loss_descended =
        quad_state.history.back().mean.total < quad_state.history.front().mean.total;
    b.quad_test = evaluate(b.split.test, quad_state.params, b.store, eval_margins);
    b.quad_train = evaluate(b.split.train, quad_state.params, b.store, eval_margins);

    TrainConfig triplet_config = config;
    triplet_config.loss.mode = LossMode::kTriplet;
    TrainState triplet_state = train(b.split.train, b.store, triplet_config);
    b.triplet_test =
        evaluate(b.split.test, triplet_state.params, b.store, eval_margins);

    b.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                         .count();
    return b;
  }();
  return bench;
}

bool ordered(const EvalReport& r) {
  return r.stats_similar.mean < r.stats_complementary.mean &&
         r.stats_complementary.mean < r.stats_negative.mean;
}

}  // namespace

TEST_CASE("criterion 1: trained distance ordering replaces external absolutes") {
  const Benchmark& b = benchmark();
  std::printf("  absolute accuracy/distance figures from external catalogs are not\n"
              "  desk targets; the suite asserts the qualitative ordering instead\n");
  std::printf("  test means: sim %.4f  comp %.4f  neg %.4f\n", b.quad_test.stats_similar.mean,
              b.quad_test.stats_complementary.mean, b.quad_test.stats_negative.mean);

  CHECK(ordered(b.quad_test));
  CHECK(ordered(b.quad_train));
  verdict(1, "mean d(a,s) < mean d(a,c) < mean d(a,n) after training",
          ordered(b.quad_test) && ordered(b.quad_train));
}

TEST_CASE("criterion 2: composite gradient matches finite differences") {
  auto t0 = std::chrono::steady_clock::now();
  LossConfig config;  // default margins, lambda 1e-4
  Dims dims{5, 4, 3};
  std::mt19937_64 rng(2024);

  double worst = 0.0;
  int instances = 0;
  for (; instances < 20; ++instances) {
    test::CompositeInstance inst = test::sample_instance(rng, dims, config);
    ParamGradients analytic = test::composite_gradient(inst.params, inst.inputs, config);
    auto loss_of_params = [&]() {
      return test::composite_loss(inst.params, inst.inputs, config);
    };
    double err = test::max_param_grad_err(inst.params, analytic, loss_of_params, 1e-5);
    worst = std::max(worst, err);
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("  %d instances, worst relative error %.3g, %.2f s\n", instances, worst,
              seconds);

  CHECK(worst <= 1e-4);
  CHECK(seconds < 10.0);
  verdict(2, "analytic gradients within 1e-4 of central differences on 20 instances",
          worst <= 1e-4 && seconds < 10.0);
}

TEST_CASE("criterion 3: planted benchmark beats 0.90 and both baselines") {
  const Benchmark& b = benchmark();
  std::printf("  catalog: %zu categories x %zu items\n", b.catalog_categories,
              b.catalog_items / std::max<std::size_t>(b.catalog_categories, 1));
  std::printf("  ranking acc: trained %.4f, untrained %.4f, triplet %.4f; %.0f s\n",
              b.quad_test.ranking_acc, b.untrained.ranking_acc,
              b.triplet_test.ranking_acc, b.wall_seconds);

  CHECK(b.catalog_categories == 40);
  CHECK(b.catalog_items == 2000);
  CHECK(b.loss_descended);
  CHECK(b.quad_test.ranking_acc >= 0.90);
  CHECK(b.quad_test.ranking_acc > b.untrained.ranking_acc);
  CHECK(b.quad_test.ranking_acc > b.triplet_test.ranking_acc);
  CHECK(b.quad_train.ranking_acc >= b.untrained_train.ranking_acc);
  CHECK(b.wall_seconds < 600.0);

  verdict(3, "test ranking acc >= 0.90, above untrained and triplet baselines",
          b.catalog_categories == 40 && b.catalog_items == 2000 &&
              b.loss_descended && b.quad_test.ranking_acc >= 0.90 &&
              b.quad_test.ranking_acc > b.untrained.ranking_acc &&
              b.quad_test.ranking_acc > b.triplet_test.ranking_acc &&
              b.wall_seconds < 600.0);
}

TEST_CASE("criterion 4: loss hinge tables evaluate exactly") {
  // Decimal literals round once on entry, so "exact" allows 1e-15.
  auto close = [](double got, double want) { return std::fabs(got - want) <= 1e-15; };

  bool ok = true;
  ok &= loss_sim(0.0, 0.1) == 0.0;
  ok &= loss_sim(0.1, 0.1) == 0.0;
  ok &= close(loss_sim(0.35, 0.1), 0.25);

  ok &= loss_comp(0.25, 0.1, 0.4) == 0.0;
  ok &= close(loss_comp(0.0, 0.1, 0.4), 0.1);
  ok &= close(loss_comp(0.6, 0.1, 0.4), 0.2);

  ok &= loss_neg(1.0, 0.8) == 0.0;
  ok &= loss_neg(0.8, 0.8) == 0.0;
  ok &= close(loss_neg(0.3, 0.8), 0.5);

  // two zero-loss traps of the pair-ranking hinge
  ok &= close(loss_triplet(1.8, 2.0, 0.2), 0.0);  // far-apart pair, loss still zero
  ok &= close(loss_triplet(0.2, 0.4, 0.2), 0.0);  // close pair, same zero loss
  ok &= close(loss_triplet(0.5, 0.4, 0.2), 0.3);

  CHECK(ok);
  verdict(4, "every hinge table row, including both zero-loss traps", ok);
}

TEST_CASE("criterion 5: quadruplet invariants hold across random catalogs") {
  std::size_t total = 0;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    std::mt19937_64 rng(seed);
    Catalog catalog = test::random_catalog(rng, 15, 8);

    std::vector<CoPurchaseEdge> edges;
    const auto& items = catalog.items();
    std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
    for (int i = 0; i < 250; ++i) {
      const Item& a = items[pick(rng)];
      const Item& b = items[pick(rng)];
      if (a.id != b.id) edges.push_back({a.id, b.id});
    }

    std::vector<Quadruplet> quads;
    try {
      quads = generate(catalog, edges, rng, 1);
    } catch (const DataError&) {
      continue;
    }
    for (const Quadruplet& q : quads) {
      std::set<std::string> distinct{q.anchor, q.similar, q.complementary, q.negative};
      ok &= distinct.size() == 4;
      ok &= catalog.get(q.anchor).category == catalog.get(q.similar).category;
      ok &= catalog.get(q.anchor).category != catalog.get(q.complementary).category;
    }

    SplitDataset split = split_by_anchor(quads, 0.9, rng, seed);
    std::unordered_set<std::string> train_anchors;
    for (const Quadruplet& q : split.train) train_anchors.insert(q.anchor);
    for (const Quadruplet& q : split.test) ok &= train_anchors.count(q.anchor) == 0;

    total += quads.size();
  }
  std::printf("  %zu quadruplets checked\n", total);

  CHECK(total >= 1000);
  CHECK(ok);
  verdict(5, "all quadruplet invariants and anchor-disjoint splits over 1000+ samples",
          total >= 1000 && ok);
}

TEST_CASE("criterion 6: identical seeds give bit-identical pipeline artifacts") {
  test::TempDir tmp("accept6");

  auto pipeline = [&](const std::string& tag) {
    std::string dir = (tmp.dir() / tag).string();
    std::vector<std::string> steps[] = {
        {"gen-sample", "--out-dir", dir, "--seed", "13", "--categories", "6",
         "--items-per-category", "10", "--edges-per-item", "1"},
        {"gen-quads", "--catalog", dir + "/catalog.jsonl", "--edges",
         dir + "/edges.tsv", "--out-dir", dir, "--seed", "13"},
        {"train", "--quads", dir + "/train.quads.tsv", "--catalog",
         dir + "/catalog.jsonl", "--hash-dim", "64", "--out", dir + "/model.ckpt",
         "--epochs", "4", "--batch-size", "32", "--hidden-units", "32",
         "--output-units", "16", "--seed", "13"},
        {"eval", "--quads", dir + "/test.quads.tsv", "--catalog",
         dir + "/catalog.jsonl", "--hash-dim", "64", "--ckpt", dir + "/model.ckpt",
         "--out", dir + "/report.json", "--hist", dir + "/hist.csv", "--seed", "13"},
    };
    for (auto& step : steps) {
      std::vector<const char*> argv{"quadnet"};
      for (const std::string& a : step) argv.push_back(a.c_str());
      REQUIRE(run_cli(static_cast<int>(argv.size()), argv.data()) == 0);
    }
    return dir;
  };

  std::string run1 = pipeline("run1");
  std::string run2 = pipeline("run2");

  bool ok = true;
  for (const char* name : {"/catalog.jsonl", "/edges.tsv", "/train.quads.tsv",
                           "/test.quads.tsv", "/manifest.json", "/model.ckpt",
                           "/report.json", "/hist.csv"}) {
    bool same = test::read_file(run1 + name) == test::read_file(run2 + name);
    if (!same) std::printf("  MISMATCH in %s\n", name);
    CHECK_MESSAGE(same, name);
    ok &= same;
  }

  // a third run through the installed binary in a separate process
  std::string run3 = (tmp.dir() / "run3").string();
  std::string bin = QUADNET_BIN;
  std::string shell =
      bin + " gen-sample --out-dir " + run3 +
      " --seed 13 --categories 6 --items-per-category 10 --edges-per-item 1"
      " >/dev/null 2>&1 && " +
      bin + " gen-quads --catalog " + run3 + "/catalog.jsonl --edges " + run3 +
      "/edges.tsv --out-dir " + run3 + " --seed 13 >/dev/null 2>&1 && " + bin +
      " train --quads " + run3 + "/train.quads.tsv --catalog " + run3 +
      "/catalog.jsonl --hash-dim 64 --out " + run3 +
      "/model.ckpt --epochs 4 --batch-size 32 --hidden-units 32"
      " --output-units 16 --seed 13 >/dev/null 2>&1 && " +
      bin + " eval --quads " + run3 + "/test.quads.tsv --catalog " + run3 +
      "/catalog.jsonl --hash-dim 64 --ckpt " + run3 + "/model.ckpt --out " + run3 +
      "/report.json --hist " + run3 + "/hist.csv --seed 13 >/dev/null 2>&1";
  bool exec_ok = std::system(shell.c_str()) == 0;
  CHECK(exec_ok);
  ok &= exec_ok;
  for (const char* name : {"/model.ckpt", "/report.json", "/hist.csv"}) {
    bool same = test::read_file(run1 + name) == test::read_file(run3 + name);
    if (!same) std::printf("  MISMATCH vs subprocess in %s\n", name);
    CHECK_MESSAGE(same, name);
    ok &= same;
  }
  verdict(6, "identical-seed pipeline runs are byte-identical, in and out of process",
          ok);
}

namespace {

// Criterion 7 oracle: an independent reimplementation of the projection,
// distance, and statistics path, kept operation-for-operation parallel so
// the comparison can be exact.
std::vector<double> oracle_unit(const ProjectionParams& p, const std::vector<double>& x) {
  std::vector<double> z(p.dims.hidden);
  for (std::size_t i = 0; i < p.dims.hidden; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < p.dims.d_in; ++j) acc += p.w1[i * p.dims.d_in + j] * x[j];
    z[i] = p.b1[i] + acc;
    if (z[i] < 0.0) z[i] = 0.0;
  }
  std::vector<double> raw(p.dims.d_out);
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < p.dims.d_out; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < p.dims.hidden; ++j) acc += p.w2[i * p.dims.hidden + j] * z[j];
    raw[i] = p.b2[i] + acc;
    norm_sq += raw[i] * raw[i];
  }
  double inv = 1.0 / std::sqrt(norm_sq);
  for (double& v : raw) v *= inv;
  return raw;
}

double oracle_distance(const std::vector<double>& u, const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += (u[i] - v[i]) * (u[i] - v[i]);
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("criterion 7: eval metrics equal an independent brute-force recomputation") {
  // 50-quadruplet test set on a fresh planted catalog
  SampleConfig scfg;
  scfg.categories = 10;
  scfg.items_per_category = 10;
  scfg.edges_per_item = 1;
  scfg.seed = 31;
  SampleData data = generate_sample(scfg);
  HashFeaturizerConfig hcfg;
  hcfg.seed = 31;
  FeatureStore store = hash_featurize(data.catalog, 64, hcfg);
  std::mt19937_64 rng(31);
  std::vector<Quadruplet> quads = generate(data.catalog, data.edges, rng, 1);
  quads.resize(50);
  ProjectionParams params = init_params({64, 24, 12}, rng);
  LossConfig config;

  EvalReport report = evaluate(quads, params, store, config);

  std::size_t ranked = 0, sim_hits = 0, comp_hits = 0;
  std::vector<double> ds, dc, dn;
  for (const Quadruplet& q : quads) {
    auto a = oracle_unit(params, store.get(q.anchor));
    auto s = oracle_unit(params, store.get(q.similar));
    auto c = oracle_unit(params, store.get(q.complementary));
    auto n = oracle_unit(params, store.get(q.negative));
    double d_as = oracle_distance(a, s);
    double d_ac = oracle_distance(a, c);
    double d_an = oracle_distance(a, n);
    ds.push_back(d_as);
    dc.push_back(d_ac);
    dn.push_back(d_an);
    if (d_as < d_ac && d_ac < d_an) ++ranked;
    if (d_as <= config.margin_similar) ++sim_hits;
    if (d_ac > config.margin_similar && d_ac <= config.margin_complementary) ++comp_hits;
  }
  auto mean_of = [](const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
  };
  auto std_of = [&](const std::vector<double>& v) {
    double m = mean_of(v), acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size()));
  };

  double inv = 1.0 / 50.0;
  bool ok = true;
  ok &= report.ranking_acc == static_cast<double>(ranked) * inv;
  ok &= report.sim_acc == static_cast<double>(sim_hits) * inv;
  ok &= report.comp_acc == static_cast<double>(comp_hits) * inv;
  ok &= report.stats_similar.mean == mean_of(ds);
  ok &= report.stats_similar.std_dev == std_of(ds);
  ok &= report.stats_complementary.mean == mean_of(dc);
  ok &= report.stats_complementary.std_dev == std_of(dc);
  ok &= report.stats_negative.mean == mean_of(dn);
  ok &= report.stats_negative.std_dev == std_of(dn);
  ok &= report.stats_similar.count == 50;

  CHECK(ok);
  verdict(7, "accuracies and distance stats match the oracle exactly on 50 quads", ok);
}

TEST_CASE("criterion 8: exact k-NN equals a brute-force scan on 200 items") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  EmbeddingIndex index;
  index.dim = 16;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> v(index.dim);
    double norm = 0.0;
    for (double& x : v) {
      x = u(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    std::string id = "n" + std::to_string(i);
    index.row_of.emplace(id, index.ids.size());
    index.ids.push_back(id);
    index.categories.push_back("c" + std::to_string(i % 8));
    index.units.insert(index.units.end(), v.begin(), v.end());
    rows.push_back(std::move(v));
  }

  bool ok = true;
  std::uniform_int_distribution<std::size_t> pick(0, index.size() - 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t a = pick(rng);
    auto got = query_similar(index, index.ids[a], 10);

    std::vector<Neighbor> brute;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == a) continue;
      brute.push_back({index.ids[i], oracle_distance(rows[a], rows[i])});
    }
    std::sort(brute.begin(), brute.end(), [](const Neighbor& l, const Neighbor& r) {
      return l.distance != r.distance ? l.distance < r.distance : l.id < r.id;
    });
    brute.resize(10);

    ok &= got.size() == brute.size();
    for (std::size_t i = 0; ok && i < got.size(); ++i) {
      ok &= got[i].id == brute[i].id && got[i].distance == brute[i].distance;
    }
  }
  CHECK(ok);
  verdict(8, "k-NN agrees with the all-pairs oracle for 20 anchors", ok);
}
