#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "quadnet/featurizer.hpp"
#include "quadnet/loss.hpp"
#include "quadnet/projector.hpp"
#include "quadnet/quadgen.hpp"

namespace quadnet {

enum class Optimizer { kSgd, kAdam };

struct TrainConfig {
  std::size_t batch_size = 512;
  double learning_rate = 0.001;
  std::size_t epochs = 30;
  Optimizer optimizer = Optimizer::kAdam;
  std::uint64_t seed = 0;
  std::size_t hidden_units = 256;
  std::size_t output_units = 128;
  LossConfig loss;

  void validate() const;
};

struct AdamState {
  ParamGradients m;
  ParamGradients v;
  std::uint64_t step = 0;
};

struct EpochLog {
  std::size_t epoch = 0;   // 1-based
  LossBreakdown mean;      // example-weighted mean over the epoch
  double wall_ms = 0.0;
};

struct TrainState {
  ProjectionParams params;
  std::optional<AdamState> adam;
  std::size_t epoch = 0;
  std::vector<EpochLog> history;
  std::size_t degenerate_skips = 0;
};

// Minibatch training over quadruplets: shuffle each epoch with the seeded
// RNG, average hinge gradients over each batch, add the L2 gradient once per
// step, and apply the optimizer update. The last partial batch is used.
// Deterministic given (quads, store, config). A quadruplet id missing from
// the store aborts up front; a non-finite loss or gradient raises
// NumericError naming the batch.
TrainState train(const std::vector<Quadruplet>& quads, const FeatureStore& store,
                 const TrainConfig& config);

// Versioned binary checkpoint: dims, seed, the four parameter tensors in
// row-major order, and optimizer moments. Round-trip is bit-exact.
void save_checkpoint(const TrainState& state, std::uint64_t seed,
                     const std::filesystem::path& path);

struct Checkpoint {
  TrainState state;
  std::uint64_t seed = 0;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

void write_training_log(const TrainState& state, const std::filesystem::path& path);

}  // namespace quadnet
