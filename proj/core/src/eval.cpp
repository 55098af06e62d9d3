#include "quadnet/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "quadnet/error.hpp"

namespace quadnet {

namespace {

constexpr double kBinWidth = 0.02;

std::size_t bin_of(double d) {
  auto idx = static_cast<std::size_t>(d / kBinWidth);
  return idx >= kHistogramBins ? kHistogramBins - 1 : idx;
}

// Two-pass population statistics, accumulated in input order.
DistStats stats_of(const std::vector<double>& values) {
  DistStats s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

nlohmann::json stats_json(const DistStats& s) {
  return {{"mean", s.mean}, {"std_dev", s.std_dev}, {"count", s.count}};
}

}  // namespace

bool ranking_correct(double d_as, double d_ac, double d_an) {
  return d_as < d_ac && d_ac < d_an;
}

PairRelation classify_pair(double d, const LossConfig& config) {
  if (d <= config.margin_similar) return PairRelation::kSimilar;
  if (d <= config.margin_complementary) return PairRelation::kComplementary;
  return PairRelation::kNegative;
}

EvalReport evaluate(const std::vector<Quadruplet>& quads,
                    const ProjectionParams& params, const FeatureStore& store,
                    const LossConfig& config) {
  if (quads.empty()) throw DataError("cannot evaluate an empty quadruplet set");
  for (const Quadruplet& q : quads) {
    ensure_coverage(store, {q.anchor, q.similar, q.complementary, q.negative});
  }

  std::vector<double> d_sim, d_comp, d_neg;
  d_sim.reserve(quads.size());
  d_comp.reserve(quads.size());
  d_neg.reserve(quads.size());

  EvalReport report;
  std::size_t ranked = 0, sim_hits = 0, comp_hits = 0;
  for (const Quadruplet& q : quads) {
    ProjectedPoint a = forward(params, store.get(q.anchor));
    ProjectedPoint s = forward(params, store.get(q.similar));
    ProjectedPoint c = forward(params, store.get(q.complementary));
    ProjectedPoint n = forward(params, store.get(q.negative));

    double d_as = distance(a, s);
    double d_ac = distance(a, c);
    double d_an = distance(a, n);
    d_sim.push_back(d_as);
    d_comp.push_back(d_ac);
    d_neg.push_back(d_an);

    if (ranking_correct(d_as, d_ac, d_an)) ++ranked;
    if (classify_pair(d_as, config) == PairRelation::kSimilar) ++sim_hits;
    if (classify_pair(d_ac, config) == PairRelation::kComplementary) ++comp_hits;

    ++report.hist_similar[bin_of(d_as)];
    ++report.hist_complementary[bin_of(d_ac)];
    ++report.hist_negative[bin_of(d_an)];
  }

  double inv = 1.0 / static_cast<double>(quads.size());
  report.ranking_acc = static_cast<double>(ranked) * inv;
  report.sim_acc = static_cast<double>(sim_hits) * inv;
  report.comp_acc = static_cast<double>(comp_hits) * inv;
  report.stats_similar = stats_of(d_sim);
  report.stats_complementary = stats_of(d_comp);
  report.stats_negative = stats_of(d_neg);
  return report;
}

void emit_histograms(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open histogram file for writing: " + path.string());
  char low[16], high[16];
  for (std::size_t i = 0; i < kHistogramBins; ++i) {
    std::snprintf(low, sizeof low, "%.2f", static_cast<double>(i) * kBinWidth);
    std::snprintf(high, sizeof high, "%.2f", static_cast<double>(i + 1) * kBinWidth);
    out << low << ',' << high << ',' << report.hist_similar[i] << ','
        << report.hist_complementary[i] << ',' << report.hist_negative[i] << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  nlohmann::json doc{
      {"ranking_acc", report.ranking_acc},
      {"comp_acc", report.comp_acc},
      {"sim_acc", report.sim_acc},
      {"dist_stats",
       {{"similar", stats_json(report.stats_similar)},
        {"complementary", stats_json(report.stats_complementary)},
        {"negative", stats_json(report.stats_negative)}}},
      {"histograms",
       {{"bin_width", kBinWidth},
        {"similar", report.hist_similar},
        {"complementary", report.hist_complementary},
        {"negative", report.hist_negative}}}};
  std::ofstream out(path);
  if (!out) throw DataError("cannot open report for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace quadnet
