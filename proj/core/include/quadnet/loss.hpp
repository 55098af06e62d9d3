#pragma once

#include <vector>

#include "quadnet/projector.hpp"

namespace quadnet {

// Zero-distance guard for the d(u,v) gradient.
inline constexpr double kDistanceEpsilon = 1e-12;

enum class LossMode { kQuadruplet, kTriplet };

struct LossConfig {
  double margin_similar = 0.1;        // m_s
  double margin_complementary = 0.4;  // m_c
  double margin_negative = 0.8;       // m_n
  double lambda = 1e-4;               // L2 weight on W1 and W2
  LossMode mode = LossMode::kQuadruplet;
  double triplet_margin = 0.2;

  // Enforces 0 < m_s < m_c < m_n and lambda >= 0; throws DataError.
  void validate() const;
};

struct LossBreakdown {
  double similar = 0.0;
  double comp = 0.0;
  double negative = 0.0;
  double regularizer = 0.0;  // unweighted sum of squared weights
  double total = 0.0;        // similar + comp + negative + lambda * regularizer
};

// Hinge components on unit-vector distances.
double loss_sim(double d_as, double m_s);
double loss_comp(double d_ac, double m_s, double m_c);
double loss_neg(double d_an, double m_n);
double loss_triplet(double d_ac, double d_an, double margin);

// Sum of squared entries of W1 and W2; biases excluded.
double l2_penalty(const ProjectionParams& params);

struct QuadProjection {
  ProjectedPoint anchor;
  ProjectedPoint similar;
  ProjectedPoint complementary;
  ProjectedPoint negative;
};

// The three hinge components of one example (regularizer left 0); in
// triplet mode the similar and negative components are zero and the single
// triplet term is reported under comp.
LossBreakdown hinge_losses(const QuadProjection& proj, const LossConfig& config);

// hinge_losses plus the weighted L2 term.
LossBreakdown total_loss(const QuadProjection& proj, const ProjectionParams& params,
                         const LossConfig& config);

struct UnitGradients {
  std::vector<double> anchor;
  std::vector<double> similar;
  std::vector<double> complementary;
  std::vector<double> negative;
};

// Exact subgradients of the hinge terms w.r.t. each unit vector; the zero
// subgradient is chosen at hinge kinks, and the d(u,v) gradient (u-v)/d is
// zeroed below kDistanceEpsilon.
UnitGradients loss_gradients(const QuadProjection& proj, const LossConfig& config);

}  // namespace quadnet
