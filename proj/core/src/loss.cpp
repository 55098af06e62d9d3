#include "quadnet/loss.hpp"

#include <algorithm>
#include <cmath>

#include "quadnet/error.hpp"

namespace quadnet {

void LossConfig::validate() const {
  if (!(margin_similar > 0.0 && margin_similar < margin_complementary &&
        margin_complementary < margin_negative)) {
    throw DataError("margins must satisfy 0 < m_s < m_c < m_n");
  }
  if (lambda < 0.0) throw DataError("lambda must be >= 0");
  if (mode == LossMode::kTriplet && triplet_margin <= 0.0) {
    throw DataError("triplet margin must be positive");
  }
}

double loss_sim(double d_as, double m_s) { return std::max(d_as - m_s, 0.0); }

double loss_comp(double d_ac, double m_s, double m_c) {
  return std::max(d_ac - m_c, 0.0) + std::max(m_s - d_ac, 0.0);
}

double loss_neg(double d_an, double m_n) { return std::max(m_n - d_an, 0.0); }

double loss_triplet(double d_ac, double d_an, double margin) {
  return std::max(d_ac - d_an + margin, 0.0);
}

double l2_penalty(const ProjectionParams& params) {
  double acc = 0.0;
  for (double w : params.w1) acc += w * w;
  for (double w : params.w2) acc += w * w;
  return acc;
}

LossBreakdown hinge_losses(const QuadProjection& proj, const LossConfig& config) {
  LossBreakdown out;
  if (config.mode == LossMode::kQuadruplet) {
    out.similar = loss_sim(distance(proj.anchor, proj.similar), config.margin_similar);
    out.comp = loss_comp(distance(proj.anchor, proj.complementary),
                         config.margin_similar, config.margin_complementary);
    out.negative =
        loss_neg(distance(proj.anchor, proj.negative), config.margin_negative);
  } else {
    out.comp = loss_triplet(distance(proj.anchor, proj.complementary),
                            distance(proj.anchor, proj.negative), config.triplet_margin);
  }
  out.total = out.similar + out.comp + out.negative;
  return out;
}

LossBreakdown total_loss(const QuadProjection& proj, const ProjectionParams& params,
                         const LossConfig& config) {
  LossBreakdown out = hinge_losses(proj, config);
  out.regularizer = l2_penalty(params);
  out.total += config.lambda * out.regularizer;
  return out;
}

namespace {

// grad_u d(u,v) = (u - v)/d; adds scale * that into g_u and the mirrored
// term into g_v. No-op below the zero-distance guard.
void add_distance_grad(const std::vector<double>& u, const std::vector<double>& v,
                       double dist, double scale, std::vector<double>& g_u,
                       std::vector<double>& g_v) {
  if (dist <= kDistanceEpsilon) return;
  double k = scale / dist;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double diff = u[i] - v[i];
    g_u[i] += k * diff;
    g_v[i] -= k * diff;
  }
}

}  // namespace

UnitGradients loss_gradients(const QuadProjection& proj, const LossConfig& config) {
  std::size_t dim = proj.anchor.unit.size();
  UnitGradients g;
  g.anchor.assign(dim, 0.0);
  g.similar.assign(dim, 0.0);
  g.complementary.assign(dim, 0.0);
  g.negative.assign(dim, 0.0);

  const auto& a = proj.anchor.unit;
  const auto& s = proj.similar.unit;
  const auto& c = proj.complementary.unit;
  const auto& n = proj.negative.unit;

  if (config.mode == LossMode::kQuadruplet) {
    double d_as = distance(proj.anchor, proj.similar);
    double d_ac = distance(proj.anchor, proj.complementary);
    double d_an = distance(proj.anchor, proj.negative);

    // Open hinges only; equality keeps the zero subgradient.
    if (d_as > config.margin_similar) {
      add_distance_grad(a, s, d_as, 1.0, g.anchor, g.similar);
    }
    if (d_ac > config.margin_complementary) {
      add_distance_grad(a, c, d_ac, 1.0, g.anchor, g.complementary);
    }
    if (d_ac < config.margin_similar) {
      add_distance_grad(a, c, d_ac, -1.0, g.anchor, g.complementary);
    }
    if (d_an < config.margin_negative) {
      add_distance_grad(a, n, d_an, -1.0, g.anchor, g.negative);
    }
  } else {
    double d_ac = distance(proj.anchor, proj.complementary);
    double d_an = distance(proj.anchor, proj.negative);
    if (d_ac - d_an + config.triplet_margin > 0.0) {
      add_distance_grad(a, c, d_ac, 1.0, g.anchor, g.complementary);
      add_distance_grad(a, n, d_an, -1.0, g.anchor, g.negative);
    }
  }
  return g;
}

}  // namespace quadnet
