#include "quadnet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "quadnet/error.hpp"

namespace quadnet {

namespace {

constexpr char kMagic[4] = {'Q', 'N', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;
constexpr const char* kLayout = "w1[hidden*d_in] b1[hidden] w2[d_out*hidden] b2[d_out] row-major f64le";

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void scale(std::vector<double>& v, double k) {
  for (double& x : v) x *= k;
}

void sgd_step(std::vector<double>& w, const std::vector<double>& g, double lr) {
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
}

void adam_step(std::vector<double>& w, const std::vector<double>& g,
               std::vector<double>& m, std::vector<double>& v, double lr,
               double bias1, double bias2) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
    v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
    double m_hat = m[i] / bias1;
    double v_hat = v[i] / bias2;
    w[i] -= lr * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
  }
}

struct Writer {
  std::ofstream out;
  explicit Writer(const std::filesystem::path& path)
      : out(path, std::ios::binary) {
    if (!out) throw DataError("cannot open checkpoint for writing: " + path.string());
  }
  void bytes(const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void doubles(const std::vector<double>& v) {
    bytes(v.data(), v.size() * sizeof(double));
  }
};

struct Reader {
  std::ifstream in;
  std::filesystem::path path;
  explicit Reader(const std::filesystem::path& p) : in(p, std::ios::binary), path(p) {
    if (!in) throw DataError("cannot open checkpoint: " + p.string());
  }
  void bytes(void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      throw DataError("corrupt checkpoint (truncated): " + path.string());
    }
  }
  std::uint8_t u8() { std::uint8_t v; bytes(&v, 1); return v; }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; bytes(&v, 8); return v; }
  std::vector<double> doubles(std::size_t n) {
    std::vector<double> v(n);
    bytes(v.data(), n * sizeof(double));
    return v;
  }
};

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0) throw DataError("batch size must be positive");
  if (learning_rate < 0.0) throw DataError("learning rate must be >= 0");
  if (epochs == 0) throw DataError("epoch count must be positive");
  if (hidden_units == 0 || output_units == 0) {
    throw DataError("layer sizes must be positive");
  }
  loss.validate();
}

TrainState train(const std::vector<Quadruplet>& quads, const FeatureStore& store,
                 const TrainConfig& config) {
  config.validate();
  if (quads.empty()) throw DataError("no quadruplets to train on");
  for (const Quadruplet& q : quads) {
    ensure_coverage(store, {q.anchor, q.similar, q.complementary, q.negative});
  }

  Dims dims{store.dim(), config.hidden_units, config.output_units};
  std::mt19937_64 rng(config.seed);

  TrainState state;
  state.params = init_params(dims, rng);
  if (config.optimizer == Optimizer::kAdam) {
    state.adam = AdamState{zero_gradients(dims), zero_gradients(dims), 0};
  }

  std::vector<std::size_t> order(quads.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);

    double sum_sim = 0.0, sum_comp = 0.0, sum_neg = 0.0, sum_reg = 0.0, sum_total = 0.0;
    std::size_t examples_seen = 0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      std::size_t batch_index = start / config.batch_size;
      std::size_t end = std::min(order.size(), start + config.batch_size);

      ParamGradients grads = zero_gradients(dims);
      double reg = l2_penalty(state.params);
      double b_sim = 0.0, b_comp = 0.0, b_neg = 0.0;
      std::size_t used = 0;

      for (std::size_t pos = start; pos < end; ++pos) {
        const Quadruplet& q = quads[order[pos]];
        QuadProjection proj;
        ForwardCache ca = forward_cached(state.params, store.get(q.anchor));
        ForwardCache cs = forward_cached(state.params, store.get(q.similar));
        ForwardCache cc = forward_cached(state.params, store.get(q.complementary));
        ForwardCache cn = forward_cached(state.params, store.get(q.negative));
        if (ca.point.degenerate || cs.point.degenerate || cc.point.degenerate ||
            cn.point.degenerate) {
          ++state.degenerate_skips;
          continue;
        }
        proj.anchor = ca.point;
        proj.similar = cs.point;
        proj.complementary = cc.point;
        proj.negative = cn.point;

        // reg was computed once for the batch; only the hinge part varies
        LossBreakdown lb = hinge_losses(proj, config.loss);
        if (!std::isfinite(lb.total + config.loss.lambda * reg)) {
          throw NumericError("non-finite loss in epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(batch_index));
        }
        UnitGradients ug = loss_gradients(proj, config.loss);
        backward_into(state.params, ca, ug.anchor, grads);
        backward_into(state.params, cs, ug.similar, grads);
        backward_into(state.params, cc, ug.complementary, grads);
        backward_into(state.params, cn, ug.negative, grads);

        b_sim += lb.similar;
        b_comp += lb.comp;
        b_neg += lb.negative;
        ++used;
      }
      if (used == 0) continue;

      // Batch loss is the example mean of the hinge terms plus the shared
      // L2 term, so hinge gradients average and the L2 gradient adds once.
      double inv_used = 1.0 / static_cast<double>(used);
      scale(grads.w1, inv_used);
      scale(grads.b1, inv_used);
      scale(grads.w2, inv_used);
      scale(grads.b2, inv_used);
      double reg_scale = 2.0 * config.loss.lambda;
      for (std::size_t i = 0; i < grads.w1.size(); ++i) {
        grads.w1[i] += reg_scale * state.params.w1[i];
      }
      for (std::size_t i = 0; i < grads.w2.size(); ++i) {
        grads.w2[i] += reg_scale * state.params.w2[i];
      }
      if (!all_finite(grads.w1) || !all_finite(grads.b1) || !all_finite(grads.w2) ||
          !all_finite(grads.b2)) {
        throw NumericError("non-finite gradient in epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_index));
      }

      if (config.optimizer == Optimizer::kAdam) {
        AdamState& adam = *state.adam;
        ++adam.step;
        double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam.step));
        double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam.step));
        adam_step(state.params.w1, grads.w1, adam.m.w1, adam.v.w1,
                  config.learning_rate, bias1, bias2);
        adam_step(state.params.b1, grads.b1, adam.m.b1, adam.v.b1,
                  config.learning_rate, bias1, bias2);
        adam_step(state.params.w2, grads.w2, adam.m.w2, adam.v.w2,
                  config.learning_rate, bias1, bias2);
        adam_step(state.params.b2, grads.b2, adam.m.b2, adam.v.b2,
                  config.learning_rate, bias1, bias2);
      } else {
        sgd_step(state.params.w1, grads.w1, config.learning_rate);
        sgd_step(state.params.b1, grads.b1, config.learning_rate);
        sgd_step(state.params.w2, grads.w2, config.learning_rate);
        sgd_step(state.params.b2, grads.b2, config.learning_rate);
      }

      sum_sim += b_sim;
      sum_comp += b_comp;
      sum_neg += b_neg;
      sum_reg += reg * static_cast<double>(used);
      sum_total += b_sim + b_comp + b_neg +
                   config.loss.lambda * reg * static_cast<double>(used);
      examples_seen += used;
    }

    EpochLog log;
    log.epoch = epoch;
    if (examples_seen > 0) {
      double inv = 1.0 / static_cast<double>(examples_seen);
      log.mean.similar = sum_sim * inv;
      log.mean.comp = sum_comp * inv;
      log.mean.negative = sum_neg * inv;
      log.mean.regularizer = sum_reg * inv;
      log.mean.total = sum_total * inv;
    }
    log.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    state.history.push_back(log);
    state.epoch = epoch;
  }
  return state;
}

void save_checkpoint(const TrainState& state, std::uint64_t seed,
                     const std::filesystem::path& path) {
  Writer w(path);
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  std::uint32_t layout_len = static_cast<std::uint32_t>(std::strlen(kLayout));
  w.u32(layout_len);
  w.bytes(kLayout, layout_len);

  const Dims& d = state.params.dims;
  w.u64(d.d_in);
  w.u64(d.hidden);
  w.u64(d.d_out);
  w.u64(seed);
  w.u64(state.epoch);
  w.u8(state.adam.has_value() ? 1 : 0);
  w.u64(state.adam.has_value() ? state.adam->step : 0);
  w.doubles(state.params.w1);
  w.doubles(state.params.b1);
  w.doubles(state.params.w2);
  w.doubles(state.params.b2);
  if (state.adam.has_value()) {
    for (const ParamGradients* g : {&state.adam->m, &state.adam->v}) {
      w.doubles(g->w1);
      w.doubles(g->b1);
      w.doubles(g->w2);
      w.doubles(g->b2);
    }
  }
  if (!w.out) throw DataError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("not a checkpoint file: " + path.string());
  }
  std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw DataError("checkpoint version " + std::to_string(version) +
                    " unsupported (expected " + std::to_string(kVersion) +
                    "): " + path.string());
  }
  std::uint32_t layout_len = r.u32();
  if (layout_len > 4096) throw DataError("corrupt checkpoint header: " + path.string());
  std::vector<char> layout(layout_len);
  r.bytes(layout.data(), layout_len);

  Checkpoint ck;
  Dims d;
  d.d_in = r.u64();
  d.hidden = r.u64();
  d.d_out = r.u64();
  if (d.d_in == 0 || d.hidden == 0 || d.d_out == 0 || d.d_in > (1u << 24) ||
      d.hidden > (1u << 24) || d.d_out > (1u << 24)) {
    throw DataError("corrupt checkpoint dimensions: " + path.string());
  }
  ck.seed = r.u64();
  ck.state.epoch = r.u64();
  bool has_adam = r.u8() != 0;
  std::uint64_t adam_steps = r.u64();

  ck.state.params.dims = d;
  ck.state.params.w1 = r.doubles(d.hidden * d.d_in);
  ck.state.params.b1 = r.doubles(d.hidden);
  ck.state.params.w2 = r.doubles(d.d_out * d.hidden);
  ck.state.params.b2 = r.doubles(d.d_out);
  if (has_adam) {
    AdamState adam;
    for (ParamGradients* g : {&adam.m, &adam.v}) {
      g->w1 = r.doubles(d.hidden * d.d_in);
      g->b1 = r.doubles(d.hidden);
      g->w2 = r.doubles(d.d_out * d.hidden);
      g->b2 = r.doubles(d.d_out);
    }
    adam.step = adam_steps;
    ck.state.adam = std::move(adam);
  }
  return ck;
}

void write_training_log(const TrainState& state, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open training log for writing: " + path.string());
  for (const EpochLog& log : state.history) {
    nlohmann::json row{{"epoch", log.epoch},         {"l_sim", log.mean.similar},
                       {"l_comp", log.mean.comp},    {"l_neg", log.mean.negative},
                       {"l_reg", log.mean.regularizer}, {"total", log.mean.total},
                       {"wall_ms", log.wall_ms}};
    out << row.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace quadnet
