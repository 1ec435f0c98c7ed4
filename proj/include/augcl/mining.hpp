#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "augcl/encoder.hpp"
#include "augcl/tensor.hpp"
#include "augcl/weights.hpp"

namespace augcl {

// ---------------------------------------------------------------------------
// Binary partition
// ---------------------------------------------------------------------------

struct KMeansConfig {
  std::size_t restarts = 3;
  std::size_t max_iterations = 50;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

struct KMeansResult {
  std::vector<int> assignments;  // 0 or 1 per point
  Tensor centroids;              // 2 x D
  double sse = 0.0;
  // All points coincide; everything sits in cluster 0.
  bool degenerate = false;
};

// k = 2 Lloyd iterations, then a single-point move refinement; best of
// `restarts` by SSE. Restart 0 starts from the best split along the leading
// principal axis, the others from greedy k-means++ seeds.
// Nearest-centroid ties go to the lower index; an emptied cluster is refilled
// with the point farthest from its centroid.
KMeansResult kmeans2(const Tensor& points, const KMeansConfig& config);

// Sum of squared distances of points to the mean of their group.
double partition_sse(const Tensor& points, const std::vector<int>& assignments);

struct PartitionResult {
  // 1 marks the group around the anchor, 0 the rest; one entry per candidate.
  std::vector<int> labels;
  Tensor centroids;               // 2 x D, on L2-normalized candidates
  std::size_t anchor_cluster = 0;  // centroid nearest to the normalized anchor
  bool degenerate = false;
};

// Normalizes the candidates and the anchor, clusters the candidates with
// kmeans2 and labels the cluster whose centroid is nearest to the anchor.
PartitionResult partition_negatives(std::span<const double> anchor, const Tensor& candidates,
                                    const KMeansConfig& config);

// ---------------------------------------------------------------------------
// Uncertainty estimators
// ---------------------------------------------------------------------------

// One anchor with its negative candidates and their affinity labels.
struct AffinitySamples {
  std::vector<double> anchor;
  Tensor candidates;
  std::vector<int> labels;
};

// Estimator input: [normalize(anchor) || normalize(candidate)].
std::vector<double> affinity_features(std::span<const double> anchor, std::span<const double> candidate);

struct GamblerConfig {
  double reward = 1.8;           // o, in (1, 2]
  std::size_t epochs = 10;       // K
  std::size_t layers = 3;        // linear layers, ReLU in between
  std::size_t hidden_dim = 128;  // d
  double learning_rate = 0.01;   // plain SGD
  std::size_t batch_size = 32;

  void validate() const;
};

// Plain MLP; outputs are softmax probabilities.
// Output columns: 0 = label 0 (other group), 1 = label 1 (anchor group),
// 2 = abstention (only for the extra-class estimator).
struct MlpModel {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t layers = 0;
  std::size_t outputs = 0;
  NamedTensors tensors;

  Tensor probabilities(const Tensor& inputs) const;
};

using GamblerParams = MlpModel;

MlpModel init_mlp(std::size_t input_dim, std::size_t hidden_dim, std::size_t layers, std::size_t outputs,
                  std::uint64_t seed);

// Per-sample extra-class loss -log(p_correct * o + u).
double gambler_sample_loss(double p_correct, double u, double reward);

// Minimizes the mean extra-class loss over minibatches of all pooled samples
// for `epochs` passes, reshuffled each epoch.
GamblerParams train_gambler(std::span<const AffinitySamples> samples, const GamblerConfig& config,
                            std::uint64_t seed);

// Same architecture with two outputs, trained with cross-entropy on the
// partition labels (used by the softmax-response and entropy estimators).
MlpModel train_affinity_classifier(std::span<const AffinitySamples> samples, const GamblerConfig& config,
                                   std::uint64_t seed);

struct GamblerOutput {
  double p_anchor_side = 0.0;  // label 1
  double p_other = 0.0;        // label 0
  double u = 0.0;              // abstention
};

GamblerOutput gambler_infer(const GamblerParams& params, std::span<const double> anchor,
                            std::span<const double> candidate);

// Row i: u for every candidate j != i (view-2 rows) against anchor i (view-1 row).
UncertaintyMatrix build_uncertainty_matrix(const EmbeddingBatch& embeddings, const GamblerParams& params);

enum class EstimatorKind { kExtraClass, kSoftmaxResponse, kEntropy, kDistance };

EstimatorKind parse_estimator_kind(const std::string& name);
std::string to_string(EstimatorKind kind);

// u = 2 (1 - max_c p_c)
double softmax_response_uncertainty(double p0, double p1);
// u = H(p) / ln 2
double entropy_uncertainty(double p0, double p1);
// u = 1 - |d1 - d2| / (d1 + d2); 1 when both distances vanish.
double distance_uncertainty(double d1, double d2);

// Alternative estimators. softmax_response and entropy need `classifier`;
// distance needs one PartitionResult per anchor (candidates j != i).
UncertaintyMatrix alt_uncertainty(EstimatorKind method, const EmbeddingBatch& embeddings,
                                  const MlpModel* classifier, std::span<const PartitionResult> partitions);

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

enum class WeightPolicyKind {
  kReciprocalMean,    // alpha = 1 / mean(U)
  kFixed,             // alpha given
  kDeltaCoefficient,  // alpha = 1 / (mean + c * std)
};

struct WeightPolicy {
  WeightPolicyKind kind = WeightPolicyKind::kReciprocalMean;
  double alpha = 1.0;
  double delta_coefficient = 0.0;
};

WeightPolicyKind parse_weight_policy(const std::string& name);
std::string to_string(WeightPolicyKind kind);

struct UncertaintyStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

UncertaintyStats uncertainty_stats(std::span<const UncertaintyMatrix> matrices);

// alpha for the pooled entries of all matrices.
double resolve_alpha(std::span<const UncertaintyMatrix> matrices, const WeightPolicy& policy);

WeightMatrix weights_from_uncertainty(const UncertaintyMatrix& u, const WeightPolicy& policy);
// One alpha shared by every matrix.
std::vector<WeightMatrix> weights_from_uncertainty(std::span<const UncertaintyMatrix> matrices,
                                                   const WeightPolicy& policy);

// ---------------------------------------------------------------------------
// Instrumentation
// ---------------------------------------------------------------------------

struct MiningCounters {
  std::uint64_t partition_calls = 0;
  std::uint64_t estimator_trainings = 0;
};

// Per-thread counters incremented by partition_negatives and by the
// estimator training functions, so concurrent runs do not mix.
MiningCounters mining_counters();
void reset_mining_counters();

}  // namespace augcl
