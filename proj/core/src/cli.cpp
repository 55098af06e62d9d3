#include "quadnet/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quadnet/catalog.hpp"
#include "quadnet/error.hpp"
#include "quadnet/eval.hpp"
#include "quadnet/featurizer.hpp"
#include "quadnet/loss.hpp"
#include "quadnet/projector.hpp"
#include "quadnet/quadgen.hpp"
#include "quadnet/retrieve.hpp"
#include "quadnet/sample_gen.hpp"
#include "quadnet/trainer.hpp"

namespace quadnet {

namespace {

namespace fs = std::filesystem;

// Every knob reachable from flags or the JSON config file; flags win.
struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  std::string catalog_path;
  std::string format = "auto";  // jsonl | tsv | auto (by extension)
  std::string edges_path;
  std::string quads_path;
  std::string vectors_path;
  std::string ckpt_path;
  std::string out_path;
  std::string out_dir;
  std::string log_path;
  std::string hist_path;
  std::string anchor;

  std::size_t hash_dim = 512;
  std::uint64_t hash_seed = 0;
  bool hash_seed_set = false;

  double m_s = 0.1;
  double m_c = 0.4;
  double m_n = 0.8;
  double lambda = 1e-4;
  double triplet_margin = 0.2;
  std::string mode = "quadruplet";

  std::size_t batch_size = 512;
  double learning_rate = 0.001;
  std::size_t epochs = 30;
  std::string optimizer = "adam";
  std::size_t hidden_units = 256;
  std::size_t output_units = 128;

  double train_fraction = 0.9;
  std::size_t similars_per_pair = 1;

  std::size_t k = 10;
  bool no_category_filter = false;

  std::size_t categories = 40;
  std::size_t items_per_category = 50;
  std::size_t edges_per_item = 2;
};

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw DataError("config file is not a JSON object: " + path);
  }
  auto get = [&](const char* key, auto& target) {
    if (doc.contains(key)) doc.at(key).get_to(target);
  };
  get("seed", cfg.seed);
  get("threads", cfg.threads);
  get("format", cfg.format);
  get("hash_dim", cfg.hash_dim);
  if (doc.contains("hash_seed")) {
    doc.at("hash_seed").get_to(cfg.hash_seed);
    cfg.hash_seed_set = true;
  }
  get("m_s", cfg.m_s);
  get("m_c", cfg.m_c);
  get("m_n", cfg.m_n);
  get("lambda", cfg.lambda);
  get("triplet_margin", cfg.triplet_margin);
  get("mode", cfg.mode);
  get("batch_size", cfg.batch_size);
  get("learning_rate", cfg.learning_rate);
  get("epochs", cfg.epochs);
  get("optimizer", cfg.optimizer);
  get("hidden_units", cfg.hidden_units);
  get("output_units", cfg.output_units);
  get("train_fraction", cfg.train_fraction);
  get("similars_per_pair", cfg.similars_per_pair);
  get("k", cfg.k);
  get("categories", cfg.categories);
  get("items_per_category", cfg.items_per_category);
  get("edges_per_item", cfg.edges_per_item);
}

CatalogFormat resolve_format(const RunConfig& cfg) {
  if (cfg.format == "jsonl") return CatalogFormat::kJsonl;
  if (cfg.format == "tsv") return CatalogFormat::kTsv;
  if (cfg.format == "auto") {
    fs::path p(cfg.catalog_path);
    if (p.extension() == ".jsonl" || p.extension() == ".json") {
      return CatalogFormat::kJsonl;
    }
    return CatalogFormat::kTsv;
  }
  throw DataError("unknown catalog format: " + cfg.format);
}

LossConfig loss_config(const RunConfig& cfg) {
  LossConfig loss;
  loss.margin_similar = cfg.m_s;
  loss.margin_complementary = cfg.m_c;
  loss.margin_negative = cfg.m_n;
  loss.lambda = cfg.lambda;
  loss.triplet_margin = cfg.triplet_margin;
  if (cfg.mode == "quadruplet") {
    loss.mode = LossMode::kQuadruplet;
  } else if (cfg.mode == "triplet") {
    loss.mode = LossMode::kTriplet;
  } else {
    throw DataError("unknown loss mode: " + cfg.mode);
  }
  loss.validate();
  return loss;
}

Catalog load_catalog_verbose(const RunConfig& cfg) {
  CatalogLoadStats stats;
  Catalog catalog = load_catalog(cfg.catalog_path, resolve_format(cfg), &stats);
  for (const std::string& w : stats.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "catalog: " << stats.loaded << " items loaded, " << stats.malformed
            << " malformed, " << stats.duplicates << " duplicates\n";
  return catalog;
}

FeatureStore build_store(const RunConfig& cfg, const Catalog& catalog) {
  if (!cfg.vectors_path.empty()) {
    std::vector<std::string> missing;
    FeatureStore store = load_vectors(cfg.vectors_path, catalog, &missing);
    if (!missing.empty()) {
      std::cerr << "warning: " << missing.size()
                << " catalog ids missing from vector file (first: " << missing.front()
                << ")\n";
    }
    std::cerr << "features: " << store.size() << " vectors of dim " << store.dim()
              << " from " << cfg.vectors_path << '\n';
    return store;
  }
  HashFeaturizerConfig hcfg;
  hcfg.seed = cfg.hash_seed_set ? cfg.hash_seed : cfg.seed;
  std::vector<std::string> zero_ids;
  FeatureStore store = hash_featurize(catalog, cfg.hash_dim, hcfg, &zero_ids, cfg.threads);
  if (!zero_ids.empty()) {
    std::cerr << "warning: " << zero_ids.size()
              << " items hashed to the zero vector (first: " << zero_ids.front() << ")\n";
  }
  std::cerr << "features: hashed " << store.size() << " titles to dim " << store.dim()
            << '\n';
  return store;
}

int cmd_gen_sample(const RunConfig& cfg) {
  SampleConfig scfg;
  scfg.categories = cfg.categories;
  scfg.items_per_category = cfg.items_per_category;
  scfg.edges_per_item = cfg.edges_per_item;
  scfg.seed = cfg.seed;
  SampleData data = generate_sample(scfg);

  fs::create_directories(cfg.out_dir);
  fs::path catalog_path = fs::path(cfg.out_dir) / "catalog.jsonl";
  fs::path edges_path = fs::path(cfg.out_dir) / "edges.tsv";
  write_catalog(data.catalog, catalog_path, CatalogFormat::kJsonl);
  write_edges(data.edges, edges_path);
  std::cerr << "sample: " << data.catalog.size() << " items in "
            << data.catalog.categories().size() << " categories, " << data.edges.size()
            << " edges\n"
            << "wrote " << catalog_path.string() << " and " << edges_path.string() << '\n';
  return 0;
}

int cmd_gen_quads(const RunConfig& cfg) {
  Catalog catalog = load_catalog_verbose(cfg);
  EdgeLoadStats estats;
  std::vector<CoPurchaseEdge> edges = load_edges(cfg.edges_path, catalog, &estats);
  for (const std::string& w : estats.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "edges: " << estats.loaded << " loaded, " << estats.self_loops
            << " self-loops, " << estats.dangling << " dangling, " << estats.malformed
            << " malformed\n";

  std::mt19937_64 rng(cfg.seed);
  QuadGenStats stats;
  std::vector<Quadruplet> quads =
      generate(catalog, edges, rng, cfg.similars_per_pair, &stats);
  SplitDataset split = split_by_anchor(quads, cfg.train_fraction, rng, cfg.seed);

  fs::create_directories(cfg.out_dir);
  fs::path train_path = fs::path(cfg.out_dir) / "train.quads.tsv";
  fs::path test_path = fs::path(cfg.out_dir) / "test.quads.tsv";
  fs::path manifest_path = fs::path(cfg.out_dir) / "manifest.json";
  write_quads(split.train, train_path);
  write_quads(split.test, test_path);
  write_manifest(split, cfg.train_fraction, stats, manifest_path);
  std::cerr << "quadruplets: " << stats.quadruplets << " total (" << split.train.size()
            << " train / " << split.test.size() << " test); dropped "
            << stats.same_category_pairs << " same-category pairs, "
            << stats.duplicate_pairs << " duplicates\n"
            << "wrote " << train_path.string() << ", " << test_path.string() << ", "
            << manifest_path.string() << '\n';
  return 0;
}

int cmd_featurize(const RunConfig& cfg) {
  Catalog catalog = load_catalog_verbose(cfg);
  FeatureStore store = build_store(cfg, catalog);  // featurize has no --vectors
  write_vectors(store, catalog, cfg.out_path);
  std::cerr << "wrote " << cfg.out_path << '\n';
  return 0;
}

TrainConfig train_config(const RunConfig& cfg) {
  TrainConfig tcfg;
  tcfg.batch_size = cfg.batch_size;
  tcfg.learning_rate = cfg.learning_rate;
  tcfg.epochs = cfg.epochs;
  tcfg.seed = cfg.seed;
  tcfg.hidden_units = cfg.hidden_units;
  tcfg.output_units = cfg.output_units;
  tcfg.loss = loss_config(cfg);
  if (cfg.optimizer == "adam") {
    tcfg.optimizer = Optimizer::kAdam;
  } else if (cfg.optimizer == "sgd") {
    tcfg.optimizer = Optimizer::kSgd;
  } else {
    throw DataError("unknown optimizer: " + cfg.optimizer);
  }
  return tcfg;
}

int cmd_train(const RunConfig& cfg) {
  Catalog catalog = load_catalog_verbose(cfg);
  FeatureStore store = build_store(cfg, catalog);
  std::vector<Quadruplet> quads = read_quads(cfg.quads_path);
  std::cerr << "training on " << quads.size() << " quadruplets, mode " << cfg.mode
            << '\n';

  TrainState state = train(quads, store, train_config(cfg));
  for (const EpochLog& log : state.history) {
    std::fprintf(stderr, "epoch %3zu  total %.6f  sim %.6f  comp %.6f  neg %.6f\n",
                 log.epoch, log.mean.total, log.mean.similar, log.mean.comp,
                 log.mean.negative);
  }
  if (state.degenerate_skips > 0) {
    std::cerr << "warning: skipped " << state.degenerate_skips
              << " degenerate examples\n";
  }

  save_checkpoint(state, cfg.seed, cfg.out_path);
  std::cerr << "wrote checkpoint " << cfg.out_path << '\n';
  if (!cfg.log_path.empty()) {
    write_training_log(state, cfg.log_path);
    std::cerr << "wrote training log " << cfg.log_path << '\n';
  }
  return 0;
}

ProjectionParams load_params_checked(const RunConfig& cfg, const FeatureStore& store) {
  Checkpoint ck = load_checkpoint(cfg.ckpt_path);
  if (ck.state.params.dims.d_in != store.dim()) {
    throw DataError("checkpoint expects input dimension " +
                    std::to_string(ck.state.params.dims.d_in) + " but features have " +
                    std::to_string(store.dim()));
  }
  return std::move(ck.state.params);
}

int cmd_eval(const RunConfig& cfg) {
  Catalog catalog = load_catalog_verbose(cfg);
  FeatureStore store = build_store(cfg, catalog);
  ProjectionParams params = load_params_checked(cfg, store);
  std::vector<Quadruplet> quads = read_quads(cfg.quads_path);

  EvalReport report = evaluate(quads, params, store, loss_config(cfg));
  std::fprintf(stderr, "ranking_acc %.4f  sim_acc %.4f  comp_acc %.4f  (n=%zu)\n",
               report.ranking_acc, report.sim_acc, report.comp_acc, quads.size());

  if (!cfg.out_path.empty()) {
    write_report(report, cfg.out_path);
    std::cerr << "wrote report " << cfg.out_path << '\n';
  }
  if (!cfg.hist_path.empty()) {
    emit_histograms(report, cfg.hist_path);
    std::cerr << "wrote histograms " << cfg.hist_path << '\n';
  }
  return 0;
}

int cmd_recommend(const RunConfig& cfg) {
  Catalog catalog = load_catalog_verbose(cfg);
  FeatureStore store = build_store(cfg, catalog);
  ProjectionParams params = load_params_checked(cfg, store);
  LossConfig loss = loss_config(cfg);

  EmbeddingIndex index = build_index(catalog, store, params);
  if (!index.degenerate_ids.empty()) {
    std::cerr << "warning: " << index.degenerate_ids.size()
              << " items excluded as degenerate\n";
  }
  auto similar = query_similar(index, cfg.anchor, cfg.k);
  auto comp =
      query_complementary(index, cfg.anchor, cfg.k, loss, !cfg.no_category_filter);

  char buf[32];
  auto print_section = [&](const char* section, const std::vector<Neighbor>& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.6f", rows[i].distance);
      std::cout << section << '\t' << i + 1 << '\t' << rows[i].id << '\t' << buf << '\n';
    }
  };
  print_section("similar", similar);
  print_section("complementary", comp);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  RunConfig cfg;

  // The config file seeds defaults, so it must be read before the parse;
  // flags given on the command line then override it.
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    try {
      if (arg == "--config" && i + 1 < argc) {
        apply_config_file(argv[i + 1], cfg);
      } else if (arg.rfind("--config=", 0) == 0) {
        apply_config_file(arg.substr(9), cfg);
      }
    } catch (const DataError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }

  CLI::App app{"Latent-space learning for similar and complementary items"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override it")
      ->expected(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Seed for all randomness");
    sub->add_option("--threads", cfg.threads, "Worker cap for featurization")
        ->check(CLI::Range(std::size_t{1}, std::size_t{256}));
    // already consumed by the pre-scan; registered so the parse accepts it
    sub->add_option("--config", config_path, "JSON config file; flags override it");
  };
  auto add_catalog = [&](CLI::App* sub) {
    sub->add_option("--catalog", cfg.catalog_path, "Catalog file")->required();
    sub->add_option("--format", cfg.format, "Catalog format: jsonl, tsv, or auto")
        ->check(CLI::IsMember({"jsonl", "tsv", "auto"}));
  };
  auto add_features = [&](CLI::App* sub) {
    auto* vec = sub->add_option("--vectors", cfg.vectors_path,
                                "Precomputed vector file (id<TAB>values)");
    auto* dim = sub->add_option("--hash-dim", cfg.hash_dim,
                                "Hashed featurizer dimension (default 512)");
    auto* hs = sub->add_option("--hash-seed", cfg.hash_seed,
                               "Hashed featurizer seed (defaults to --seed)");
    hs->each([&](const std::string&) { cfg.hash_seed_set = true; });
    vec->excludes(dim)->excludes(hs);
  };
  auto add_margins = [&](CLI::App* sub) {
    sub->add_option("--m-s", cfg.m_s, "Similar margin");
    sub->add_option("--m-c", cfg.m_c, "Complementary margin");
    sub->add_option("--m-n", cfg.m_n, "Negative margin");
  };

  CLI::App* gen_sample = app.add_subcommand("gen-sample", "Generate a synthetic catalog");
  gen_sample->add_option("--out-dir", cfg.out_dir, "Output directory")->required();
  gen_sample->add_option("--categories", cfg.categories, "Category count");
  gen_sample->add_option("--items-per-category", cfg.items_per_category,
                         "Items per category");
  gen_sample->add_option("--edges-per-item", cfg.edges_per_item,
                         "Co-purchase edges per item");
  add_common(gen_sample);

  CLI::App* gen_quads =
      app.add_subcommand("gen-quads", "Build quadruplets and an anchor-based split");
  add_catalog(gen_quads);
  gen_quads->add_option("--edges", cfg.edges_path, "Co-purchase edge list")->required();
  gen_quads->add_option("--out-dir", cfg.out_dir, "Output directory")->required();
  gen_quads->add_option("--train-fraction", cfg.train_fraction,
                        "Fraction of anchors assigned to train");
  gen_quads->add_option("--similars-per-pair", cfg.similars_per_pair,
                        "Quadruplets per (anchor, complementary) pair")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000}));
  add_common(gen_quads);

  CLI::App* featurize =
      app.add_subcommand("featurize", "Write hashed title vectors to a file");
  add_catalog(featurize);
  featurize->add_option("--out", cfg.out_path, "Output vector file")->required();
  featurize->add_option("--hash-dim", cfg.hash_dim, "Hashed featurizer dimension");
  auto* fhs = featurize->add_option("--hash-seed", cfg.hash_seed,
                                    "Hashed featurizer seed (defaults to --seed)");
  fhs->each([&](const std::string&) { cfg.hash_seed_set = true; });
  add_common(featurize);

  CLI::App* train_cmd = app.add_subcommand("train", "Train the projection network");
  add_catalog(train_cmd);
  add_features(train_cmd);
  add_margins(train_cmd);
  train_cmd->add_option("--quads", cfg.quads_path, "Training quadruplet file")->required();
  train_cmd->add_option("--out", cfg.out_path, "Checkpoint output path")->required();
  train_cmd->add_option("--log", cfg.log_path, "Per-epoch JSONL training log");
  train_cmd->add_option("--mode", cfg.mode, "Loss mode")
      ->check(CLI::IsMember({"quadruplet", "triplet"}));
  train_cmd->add_option("--lambda", cfg.lambda, "L2 regularization weight");
  train_cmd->add_option("--triplet-margin", cfg.triplet_margin, "Triplet-mode margin");
  train_cmd->add_option("--batch-size", cfg.batch_size, "Minibatch size");
  train_cmd->add_option("--lr", cfg.learning_rate, "Learning rate");
  train_cmd->add_option("--epochs", cfg.epochs, "Epoch count");
  train_cmd->add_option("--optimizer", cfg.optimizer, "Optimizer")
      ->check(CLI::IsMember({"adam", "sgd"}));
  train_cmd->add_option("--hidden-units", cfg.hidden_units, "First layer width");
  train_cmd->add_option("--output-units", cfg.output_units, "Embedding dimension");
  add_common(train_cmd);

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_catalog(eval_cmd);
  add_features(eval_cmd);
  add_margins(eval_cmd);
  eval_cmd->add_option("--quads", cfg.quads_path, "Test quadruplet file")->required();
  eval_cmd->add_option("--ckpt", cfg.ckpt_path, "Checkpoint path")->required();
  eval_cmd->add_option("--out", cfg.out_path, "Report JSON output path");
  eval_cmd->add_option("--hist", cfg.hist_path, "Histogram CSV output path");
  add_common(eval_cmd);

  CLI::App* recommend =
      app.add_subcommand("recommend", "Rank similar and complementary candidates");
  add_catalog(recommend);
  add_features(recommend);
  add_margins(recommend);
  recommend->add_option("--ckpt", cfg.ckpt_path, "Checkpoint path")->required();
  recommend->add_option("--anchor", cfg.anchor, "Anchor item id")->required();
  recommend->add_option("--k", cfg.k, "Result count per section");
  recommend->add_flag("--no-category-filter", cfg.no_category_filter,
                      "Keep same-category complementary candidates");
  add_common(recommend);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << '\n';
    return 1;
  }

  try {
    if (gen_sample->parsed()) return cmd_gen_sample(cfg);
    if (gen_quads->parsed()) return cmd_gen_quads(cfg);
    if (featurize->parsed()) return cmd_featurize(cfg);
    if (train_cmd->parsed()) return cmd_train(cfg);
    if (eval_cmd->parsed()) return cmd_eval(cfg);
    if (recommend->parsed()) return cmd_recommend(cfg);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace quadnet
