#include "augcl/loss.hpp"

#include <algorithm>
#include <cmath>

#include "augcl/error.hpp"

namespace augcl {

void ContrastiveConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ConfigError("temperature must be positive");
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  const double na = l2_norm(a), nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

namespace {

// One direction: rows of `anchors` against rows of `candidates`.
NodeId directional(ComputationGraph& g, NodeId anchors, NodeId candidates, const Tensor* full_weights,
                   const ContrastiveConfig& cfg) {
  const NodeId sim = g.scale(g.matmul(anchors, g.transpose(candidates)), 1.0 / cfg.temperature);
  const NodeId lse = full_weights ? g.log_sum_exp_rows(sim, *full_weights) : g.log_sum_exp_rows(sim);
  return g.mean(g.sub(lse, g.diagonal(sim)));
}

NodeId build(ComputationGraph& g, NodeId z_tilde, NodeId z_hat, const WeightMatrix* weights,
             const ContrastiveConfig& cfg) {
  cfg.validate();
  const NodeId a = g.l2_normalize(z_tilde);
  const NodeId b = g.l2_normalize(z_hat);
  Tensor full, full_t;
  if (weights) {
    weights->validate();
    full = weights->full();
    full_t = transpose(full);
  }
  const NodeId forward = directional(g, a, b, weights ? &full : nullptr, cfg);
  if (!cfg.symmetric) return forward;
  const NodeId backward = directional(g, b, a, weights ? &full_t : nullptr, cfg);
  return g.scale(g.add(forward, backward), 0.5);
}

void check_batch(const EmbeddingBatch& batch) {
  batch.validate();
  if (batch.size() < 2) throw ContractError("contrastive loss needs at least 2 graphs (no negatives otherwise)");
}

}  // namespace

NodeId build_info_nce(ComputationGraph& g, NodeId z_tilde, NodeId z_hat, const ContrastiveConfig& cfg) {
  return build(g, z_tilde, z_hat, nullptr, cfg);
}

NodeId build_augcl_loss(ComputationGraph& g, NodeId z_tilde, NodeId z_hat, const WeightMatrix& weights,
                        const ContrastiveConfig& cfg) {
  return build(g, z_tilde, z_hat, &weights, cfg);
}

double info_nce(const EmbeddingBatch& batch, const ContrastiveConfig& cfg) {
  check_batch(batch);
  ComputationGraph g;
  const NodeId loss = build_info_nce(g, g.constant(batch.z_tilde), g.constant(batch.z_hat), cfg);
  g.forward_eval();
  return g.value(loss).item();
}

double augcl_loss(const EmbeddingBatch& batch, const WeightMatrix& weights, const ContrastiveConfig& cfg) {
  check_batch(batch);
  if (weights.anchors() != batch.size())
    throw ShapeError("weight matrix has " + std::to_string(weights.anchors()) + " rows for a batch of " +
                     std::to_string(batch.size()));
  ComputationGraph g;
  const NodeId loss = build_augcl_loss(g, g.constant(batch.z_tilde), g.constant(batch.z_hat), weights, cfg);
  g.forward_eval();
  return g.value(loss).item();
}

double adaptive_margin(double u, double alpha, const ContrastiveConfig& cfg) {
  cfg.validate();
  if (!(alpha > 0.0)) throw ContractError("adaptive_margin: alpha must be positive");
  const double clamped = std::clamp(u, kMinUncertainty, 1.0);
  return 0.5 * cfg.temperature * std::log(alpha * clamped);
}

MarginDiagnostic triplet_surrogate(const EmbeddingBatch& batch, const WeightMatrix& weights,
                                   const ContrastiveConfig& cfg) {
  check_batch(batch);
  weights.validate();
  if (weights.anchors() != batch.size()) throw ShapeError("triplet_surrogate: weight matrix rows mismatch");
  if (!(weights.alpha > 0.0)) throw ContractError("triplet_surrogate: alpha must be positive");

  const std::size_t n = batch.size();
  MarginDiagnostic d;
  d.z_tilde_normalized = batch.z_tilde;
  d.z_hat_normalized = batch.z_hat;
  normalize_rows(d.z_tilde_normalized);
  normalize_rows(d.z_hat_normalized);
  d.margins = Tensor({n, n - 1});
  d.satisfied.assign(n, std::vector<bool>(n - 1, false));

  auto dist = [&](std::size_t i, std::size_t j) {
    return std::sqrt(squared_distance(d.z_tilde_normalized.row(i), d.z_hat_normalized.row(j)));
  };
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = dist(i, i);
    double row = 0.0;
    for (std::size_t c = 0; c + 1 < n; ++c) {
      const std::size_t j = candidate_of(i, c);
      const double u = weights.values(i, c) / weights.alpha;
      const double m = adaptive_margin(u, weights.alpha, cfg);
      const double neg = dist(i, j);
      d.margins(i, c) = m;
      d.satisfied[i][c] = pos < neg - m;
      row += pos - neg + m;
    }
    total += row / (2.0 * cfg.temperature);
  }
  d.triplet_value = total / static_cast<double>(n);
  return d;
}

}  // namespace augcl
