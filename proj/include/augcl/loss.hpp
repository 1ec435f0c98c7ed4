#pragma once

#include <span>
#include <vector>

#include "augcl/autodiff.hpp"
#include "augcl/encoder.hpp"
#include "augcl/weights.hpp"

namespace augcl {

struct ContrastiveConfig {
  double temperature = 0.2;
  // Average the view1->view2 and view2->view1 directions.
  bool symmetric = false;

  void validate() const;
};

// Cosine similarity; 0 when either vector is zero.
double cosine_sim(std::span<const double> a, std::span<const double> b);

// Mean over anchors i of
//   -log( e^{s_ii/t} / (e^{s_ii/t} + sum_{j!=i} w_ij e^{s_ij/t}) )
// with s the cosine similarity between view-1 row i and view-2 row j.
// The unweighted form is InfoNCE. Weights are constants.
NodeId build_info_nce(ComputationGraph& graph, NodeId z_tilde, NodeId z_hat, const ContrastiveConfig& config);
NodeId build_augcl_loss(ComputationGraph& graph, NodeId z_tilde, NodeId z_hat, const WeightMatrix& weights,
                        const ContrastiveConfig& config);

double info_nce(const EmbeddingBatch& batch, const ContrastiveConfig& config);
double augcl_loss(const EmbeddingBatch& batch, const WeightMatrix& weights, const ContrastiveConfig& config);

inline constexpr double kMinUncertainty = 1e-6;

// m = (t / 2) * ln(alpha * u), u clamped to [1e-6, 1].
double adaptive_margin(double u, double alpha, const ContrastiveConfig& config);

struct MarginDiagnostic {
  Tensor margins;            // N x (N-1)
  Tensor z_tilde_normalized;
  Tensor z_hat_normalized;
  // Mean over anchors of (1/2t) sum_j (|a - p| - |a - n_j| + m_ij).
  double triplet_value = 0.0;
  // satisfied(i, c): |a_i - p_i| < |a_i - n_j| - m_ij for j = candidate_of(i, c).
  std::vector<std::vector<bool>> satisfied;
};

// Triplet form of the weighted loss with per-pair adaptive margins; the
// projection is taken as the identity on the given embeddings.
MarginDiagnostic triplet_surrogate(const EmbeddingBatch& batch, const WeightMatrix& weights,
                                   const ContrastiveConfig& config);

}  // namespace augcl
