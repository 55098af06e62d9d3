#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace quadnet {

// Raw outputs with Euclidean norm at or below this are treated as
// degenerate instead of being normalized.
inline constexpr double kNormEpsilon = 1e-12;

struct Dims {
  std::size_t d_in = 512;
  std::size_t hidden = 256;
  std::size_t d_out = 128;
};

// Two-layer fully connected map with ReLU: raw = W2 * relu(W1 * x + b1) + b2.
// Matrices are row-major.
struct ProjectionParams {
  Dims dims;
  std::vector<double> w1;  // hidden x d_in
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // d_out x hidden
  std::vector<double> b2;  // d_out

  std::size_t weight_count() const { return w1.size() + w2.size(); }
};

struct ProjectedPoint {
  std::vector<double> raw;   // d_out
  std::vector<double> unit;  // raw / |raw|, or zeros when degenerate
  double raw_norm = 0.0;
  bool degenerate = false;
};

// Per-example intermediates retained for the backward pass.
struct ForwardCache {
  std::vector<double> input;  // d_in
  std::vector<double> z1;     // hidden, pre-activation
  std::vector<double> h1;     // hidden, relu(z1)
  ProjectedPoint point;
};

struct ParamGradients {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;
};

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
ProjectionParams init_params(const Dims& dims, std::mt19937_64& rng);

ProjectedPoint forward(const ProjectionParams& params, std::span<const double> x);
ForwardCache forward_cached(const ProjectionParams& params, std::span<const double> x);

// Euclidean distance between unit vectors; throws NumericError on a
// degenerate point.
double distance(const ProjectedPoint& p, const ProjectedPoint& q);

ParamGradients zero_gradients(const Dims& dims);

// Accumulates one example's analytic parameter gradient given the upstream
// gradient w.r.t. its unit vector, chaining through the normalization
// Jacobian (I - u u^T)/|raw|. Degenerate examples contribute nothing and
// return false.
bool backward_into(const ProjectionParams& params, const ForwardCache& cache,
                   std::span<const double> unit_grad, ParamGradients& grads);

// Sum of per-example gradients over a batch. degenerate_count, when given,
// receives the number of skipped degenerate examples.
ParamGradients backward(const ProjectionParams& params,
                        std::span<const ForwardCache> batch,
                        std::span<const std::vector<double>> unit_grads,
                        std::size_t* degenerate_count = nullptr);

}  // namespace quadnet
