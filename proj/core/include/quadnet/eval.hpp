#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "quadnet/featurizer.hpp"
#include "quadnet/loss.hpp"
#include "quadnet/projector.hpp"
#include "quadnet/quadgen.hpp"

namespace quadnet {

inline constexpr std::size_t kHistogramBins = 100;  // width 0.02 over [0, 2]

struct DistStats {
  double mean = 0.0;
  double std_dev = 0.0;  // population form, sqrt(sum((x - mean)^2) / n)
  std::size_t count = 0;
};

using Histogram = std::array<std::uint64_t, kHistogramBins>;

struct EvalReport {
  double ranking_acc = 0.0;
  double comp_acc = 0.0;
  double sim_acc = 0.0;
  DistStats stats_similar;
  DistStats stats_complementary;
  DistStats stats_negative;
  Histogram hist_similar{};
  Histogram hist_complementary{};
  Histogram hist_negative{};
};

// 1 iff d_as < d_ac < d_an holds strictly; ties score 0.
bool ranking_correct(double d_as, double d_ac, double d_an);

enum class PairRelation { kSimilar, kComplementary, kNegative };

// Band rule on the training margins: similar iff d <= m_s, complementary iff
// m_s < d <= m_c, negative otherwise.
PairRelation classify_pair(double d, const LossConfig& config);

// Metrics over a quadruplet set on unit-vector distances. Sums accumulate
// sequentially in quadruplet order so results are deterministic. Empty input
// is a DataError.
EvalReport evaluate(const std::vector<Quadruplet>& quads,
                    const ProjectionParams& params, const FeatureStore& store,
                    const LossConfig& config);

// CSV rows: bin_low, bin_high, count_similar, count_complementary,
// count_negative; exactly kHistogramBins rows.
void emit_histograms(const EvalReport& report, const std::filesystem::path& path);

void write_report(const EvalReport& report, const std::filesystem::path& path);

}  // namespace quadnet
