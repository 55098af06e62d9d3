#include "quadnet/projector.hpp"

#include <cmath>
#include <string>

#include "quadnet/error.hpp"

namespace quadnet {

namespace {

// y[i] += sum_j m[i*cols + j] * x[j]
void matvec_add(const std::vector<double>& m, std::span<const double> x,
                std::size_t rows, std::size_t cols, std::vector<double>& y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m.data() + i * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
    y[i] += acc;
  }
}

void check_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DataError(std::string(what) + " has dimension " + std::to_string(got) +
                    ", expected " + std::to_string(want));
  }
}

}  // namespace

ProjectionParams init_params(const Dims& dims, std::mt19937_64& rng) {
  if (dims.d_in == 0 || dims.hidden == 0 || dims.d_out == 0) {
    throw DataError("projection dimensions must be positive");
  }
  ProjectionParams params;
  params.dims = dims;
  params.w1.resize(dims.hidden * dims.d_in);
  params.b1.assign(dims.hidden, 0.0);
  params.w2.resize(dims.d_out * dims.hidden);
  params.b2.assign(dims.d_out, 0.0);

  double bound1 = 1.0 / std::sqrt(static_cast<double>(dims.d_in));
  std::uniform_real_distribution<double> u1(-bound1, bound1);
  for (double& w : params.w1) w = u1(rng);

  double bound2 = 1.0 / std::sqrt(static_cast<double>(dims.hidden));
  std::uniform_real_distribution<double> u2(-bound2, bound2);
  for (double& w : params.w2) w = u2(rng);
  return params;
}

ForwardCache forward_cached(const ProjectionParams& params, std::span<const double> x) {
  const Dims& d = params.dims;
  check_dim(x.size(), d.d_in, "input vector");

  ForwardCache cache;
  cache.input.assign(x.begin(), x.end());

  cache.z1 = params.b1;
  matvec_add(params.w1, x, d.hidden, d.d_in, cache.z1);
  cache.h1.resize(d.hidden);
  for (std::size_t i = 0; i < d.hidden; ++i) {
    cache.h1[i] = cache.z1[i] > 0.0 ? cache.z1[i] : 0.0;
  }

  ProjectedPoint& p = cache.point;
  p.raw = params.b2;
  matvec_add(params.w2, cache.h1, d.d_out, d.hidden, p.raw);

  double norm_sq = 0.0;
  for (double v : p.raw) norm_sq += v * v;
  p.raw_norm = std::sqrt(norm_sq);
  if (p.raw_norm > kNormEpsilon) {
    p.unit.resize(d.d_out);
    double inv = 1.0 / p.raw_norm;
    for (std::size_t i = 0; i < d.d_out; ++i) p.unit[i] = p.raw[i] * inv;
  } else {
    p.unit.assign(d.d_out, 0.0);
    p.degenerate = true;
  }
  return cache;
}

ProjectedPoint forward(const ProjectionParams& params, std::span<const double> x) {
  return forward_cached(params, x).point;
}

double distance(const ProjectedPoint& p, const ProjectedPoint& q) {
  if (p.degenerate || q.degenerate) {
    throw NumericError("distance on a degenerate projection");
  }
  if (p.unit.size() != q.unit.size()) {
    throw DataError("distance between points of different dimension");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.unit.size(); ++i) {
    double diff = p.unit[i] - q.unit[i];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

ParamGradients zero_gradients(const Dims& dims) {
  ParamGradients g;
  g.w1.assign(dims.hidden * dims.d_in, 0.0);
  g.b1.assign(dims.hidden, 0.0);
  g.w2.assign(dims.d_out * dims.hidden, 0.0);
  g.b2.assign(dims.d_out, 0.0);
  return g;
}

bool backward_into(const ProjectionParams& params, const ForwardCache& cache,
                   std::span<const double> unit_grad, ParamGradients& grads) {
  const Dims& d = params.dims;
  check_dim(unit_grad.size(), d.d_out, "upstream gradient");
  if (cache.point.degenerate) return false;

  // Through the normalization: g_raw = (g_unit - u (u . g_unit)) / |raw|.
  const ProjectedPoint& p = cache.point;
  double dot = 0.0;
  for (std::size_t i = 0; i < d.d_out; ++i) dot += p.unit[i] * unit_grad[i];
  double inv_norm = 1.0 / p.raw_norm;
  std::vector<double> g_raw(d.d_out);
  for (std::size_t i = 0; i < d.d_out; ++i) {
    g_raw[i] = (unit_grad[i] - p.unit[i] * dot) * inv_norm;
  }

  // Second linear layer: g_w2 += g_raw h1^T, g_b2 += g_raw, g_h1 = W2^T g_raw.
  std::vector<double> g_h1(d.hidden, 0.0);
  for (std::size_t i = 0; i < d.d_out; ++i) {
    double gi = g_raw[i];
    grads.b2[i] += gi;
    const double* w2_row = params.w2.data() + i * d.hidden;
    double* gw2_row = grads.w2.data() + i * d.hidden;
    for (std::size_t j = 0; j < d.hidden; ++j) {
      gw2_row[j] += gi * cache.h1[j];
      g_h1[j] += w2_row[j] * gi;
    }
  }

  // ReLU gate, then the first linear layer.
  for (std::size_t i = 0; i < d.hidden; ++i) {
    if (cache.z1[i] <= 0.0) continue;
    double gi = g_h1[i];
    grads.b1[i] += gi;
    double* gw1_row = grads.w1.data() + i * d.d_in;
    for (std::size_t j = 0; j < d.d_in; ++j) {
      gw1_row[j] += gi * cache.input[j];
    }
  }
  return true;
}

ParamGradients backward(const ProjectionParams& params,
                        std::span<const ForwardCache> batch,
                        std::span<const std::vector<double>> unit_grads,
                        std::size_t* degenerate_count) {
  if (batch.size() != unit_grads.size()) {
    throw DataError("backward: batch and gradient counts differ");
  }
  ParamGradients grads = zero_gradients(params.dims);
  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!backward_into(params, batch[i], unit_grads[i], grads)) ++degenerate;
  }
  if (degenerate_count != nullptr) *degenerate_count = degenerate;
  return grads;
}

}  // namespace quadnet
