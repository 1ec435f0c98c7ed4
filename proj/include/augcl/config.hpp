#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "augcl/augment.hpp"
#include "augcl/encoder.hpp"
#include "augcl/loss.hpp"
#include "augcl/mining.hpp"
#include "augcl/optimizer.hpp"
#include "augcl/synthetic.hpp"

namespace augcl {

struct DatasetConfig {
  // TU dataset name, or "synthetic" for the planted-partition generator.
  std::string name = "MUTAG";
  // Directory holding <name>/<name>_A.txt ...; empty means $AUGCL_DATA_DIR,
  // then ./data.
  std::string root;
  std::size_t degree_cap = 64;
  bool use_cache = true;
  SyntheticSpec synthetic;
  std::uint64_t synthetic_seed = 0;
};

enum class TrainMode { kAugcl, kBaseline };
TrainMode parse_train_mode(const std::string& name);
std::string to_string(TrainMode mode);

struct TrainConfig {
  TrainMode mode = TrainMode::kAugcl;
  // 0 picks 32 below 500 graphs and 128 otherwise.
  std::size_t batch_size = 0;
  std::size_t epochs = 20;        // E
  std::size_t switch_epoch = 10;  // W
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  // After the switch, draw fresh batches every epoch and re-infer weights
  // with the estimator trained at the switch.
  bool reinfer = false;
  // Compute alpha per batch instead of over the pooled uncertainties.
  bool per_batch_alpha = false;
};

struct ProbeConfig {
  std::size_t folds = 10;
  std::size_t repeats = 1;
  double l2 = 1e-3;
  double tolerance = 1e-6;
  std::size_t max_iterations = 2000;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  EncoderConfig encoder;  // input_dim is taken from the data
  std::vector<AugmentationKind> augmentations = {AugmentationKind::kNodeDrop, AugmentationKind::kEdgePerturb,
                                                 AugmentationKind::kAttrMask, AugmentationKind::kSubgraph};
  double augmentation_ratio = 0.2;
  TrainConfig train;
  ContrastiveConfig contrastive;
  KMeansConfig kmeans;  // seed is derived from the master seed
  GamblerConfig gambler;
  WeightPolicy weights;
  EstimatorKind estimator = EstimatorKind::kExtraClass;
  ProbeConfig probe;
  std::uint64_t seed = 0;

  std::vector<AugmentationSpec> augmentation_pool() const;
  std::size_t resolved_batch_size(std::size_t graph_count) const;
  void validate() const;

  // Dotted key, e.g. "gambler.reward", "seed".
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  static const std::vector<std::string>& keys();

  // INI-style text: top-level keys, then one [section] per module.
  std::string to_text() const;
  static ExperimentConfig from_text(const std::string& text, const std::string& origin = "<config>");
  static ExperimentConfig load(const std::string& path);
};

// Applies "key=value" overrides in order.
void apply_overrides(ExperimentConfig& config, const std::vector<std::string>& overrides);

}  // namespace augcl
