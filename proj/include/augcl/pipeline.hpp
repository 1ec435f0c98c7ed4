#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "augcl/config.hpp"
#include "augcl/graph.hpp"
#include "augcl/mining.hpp"

namespace augcl {

// Resolves the dataset root ($AUGCL_DATA_DIR, then ./data when empty) and
// loads the TU files or generates the synthetic collection.
GraphCollection load_dataset(const DatasetConfig& config);
std::string resolve_data_root(const DatasetConfig& config);

struct MiningSummary {
  bool ran = false;
  double alpha = 1.0;  // pooled alpha, or the mean of per-batch alphas
  UncertaintyStats uncertainty;
  double weight_mean = 1.0;
  std::size_t batches = 0;
  std::size_t degenerate_batches = 0;
  std::uint64_t partition_calls = 0;
  std::uint64_t estimator_trainings = 0;
};

// Per-batch weights produced by one mining phase, keyed by batch position.
struct WeightCache {
  std::vector<std::vector<std::size_t>> batches;  // frozen composition (graph indices)
  std::vector<UncertaintyMatrix> uncertainties;
  std::vector<WeightMatrix> weights;
  std::vector<bool> degenerate;
  MiningSummary summary;
};

// Estimators trained during a mining phase; reused when re-inferring weights.
struct TrainedEstimator {
  EstimatorKind kind = EstimatorKind::kExtraClass;
  std::optional<MlpModel> model;
};

// Random batches of `batch_size`, last incomplete batch dropped.
std::vector<std::vector<std::size_t>> make_batches(std::size_t graph_count, std::size_t batch_size,
                                                   std::uint64_t seed);

// Projected embeddings of both views of one batch. Each graph's views are
// drawn with derive_seed(view_seed, {graph index}).
EmbeddingBatch encode_batch(const EncoderParams& encoder, const GraphCollection& data,
                            const std::vector<std::size_t>& batch, const std::vector<AugmentationSpec>& pool,
                            std::uint64_t view_seed);

// Per-anchor partitions of one batch: anchor i against view-2 rows j != i.
std::vector<PartitionResult> partition_batch(const EmbeddingBatch& embeddings, const KMeansConfig& config,
                                             std::uint64_t seed);

// One pass over `batches`: encode once, partition every anchor, train the
// estimator once on the pooled triples, build U per batch and convert to W.
WeightCache mine_phase(const EncoderParams& encoder, const GraphCollection& data,
                       const std::vector<std::vector<std::size_t>>& batches, const ExperimentConfig& config,
                       TrainedEstimator* estimator_out = nullptr);

// Weights for new batches from an already trained estimator (no training).
WeightCache reinfer_weights(const EncoderParams& encoder, const GraphCollection& data,
                            const std::vector<std::vector<std::size_t>>& batches, const ExperimentConfig& config,
                            const TrainedEstimator& estimator, std::uint64_t view_seed);

struct PretrainResult {
  EncoderParams encoder;
  WeightCache cache;
  std::vector<double> loss_curve;  // mean batch loss per epoch
  std::map<std::string, double> timings;
};

// Epochs 1..W: InfoNCE on random batches. At W: mining (augcl mode) and the
// batch composition is frozen. Epochs W+1..E: weighted loss on the frozen
// batches (weights 1 in baseline mode), views re-drawn every epoch.
PretrainResult pretrain(const ExperimentConfig& config, const GraphCollection& data);

// Pre-projection readout embeddings of every graph, no augmentation.
Tensor embed_all(const EncoderParams& encoder, const GraphCollection& data);

struct ProbeResult {
  std::vector<double> fold_accuracies;  // folds x repeats, repeat-major
  double mean = 0.0;
  double std = 0.0;  // population standard deviation over all folds
};

// L2-regularized multinomial logistic regression, full-batch gradient
// descent, features standardized with training-fold statistics.
struct LogisticModel {
  Tensor weights;  // D x C
  Tensor bias;     // 1 x C
  std::vector<double> mean, scale;
  std::size_t iterations = 0;

  std::vector<int> predict(const Tensor& x) const;
};

LogisticModel fit_logistic(const Tensor& x, const std::vector<int>& labels, std::size_t classes,
                           const ProbeConfig& config);

ProbeResult linear_probe_eval(const Tensor& embeddings, const std::vector<int>& labels, const ProbeConfig& config,
                              std::uint64_t seed);

struct RunReport {
  std::uint64_t seed = 0;
  std::string mode;
  std::string config_text;
  std::vector<double> loss_curve;
  MiningSummary mining;
  ProbeResult probe;
  std::size_t graph_count = 0;
  std::map<std::string, double> timings;  // seconds; excluded from determinism checks

  std::string to_json(bool include_timings = true) const;
  std::string loss_csv() const;
};

struct ExperimentOutput {
  RunReport report;
  EncoderParams encoder;
};

ExperimentOutput run_experiment(const ExperimentConfig& config, const GraphCollection& data);
ExperimentOutput run_experiment(const ExperimentConfig& config);

// Encoder tensors plus the readout settings, in the checkpoint format.
NamedTensors encoder_checkpoint(const EncoderParams& encoder);
EncoderParams encoder_from_checkpoint(const NamedTensors& tensors);

// Sweep grid. `param` is a dotted config key or one of the shorthands
// "reward" (gambler.reward), "estimator" (mining.estimator) and
// "alpha_coefficient" (delta_coefficient policy with coefficient c, i.e.
// alpha = 1 / (mean + c * std)).
struct SweepPoint {
  std::string label;
  ExperimentConfig config;
};

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& base, const std::string& param,
                                     const std::vector<std::string>& values);

}  // namespace augcl
