#include "augcl/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>

#include "augcl/augment.hpp"
#include "augcl/error.hpp"
#include "augcl/loss.hpp"
#include "augcl/optimizer.hpp"
#include "augcl/rng.hpp"
#include "augcl/synthetic.hpp"
#include "augcl/tu_dataset.hpp"

namespace augcl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

bool all_rows_identical(const EmbeddingBatch& emb) {
  for (const Tensor* t : {&emb.z_tilde, &emb.z_hat})
    for (std::size_t i = 0; i < t->rows(); ++i)
      if (squared_distance(t->row(i), emb.z_tilde.row(0)) != 0.0) return false;
  return true;
}

Tensor candidates_for(const EmbeddingBatch& emb, std::size_t anchor) {
  const std::size_t n = emb.size(), d = emb.dim();
  Tensor c({n - 1, d});
  for (std::size_t col = 0; col + 1 < n; ++col)
    std::copy_n(emb.z_hat.row(candidate_of(anchor, col)).begin(), d, c.row(col).begin());
  return c;
}

// Uncertainties of one batch from a trained (or training-free) estimator.
UncertaintyMatrix infer_uncertainty(const TrainedEstimator& est, const EmbeddingBatch& emb,
                                    std::span<const PartitionResult> partitions) {
  switch (est.kind) {
    case EstimatorKind::kExtraClass: return build_uncertainty_matrix(emb, *est.model);
    case EstimatorKind::kSoftmaxResponse:
    case EstimatorKind::kEntropy: return alt_uncertainty(est.kind, emb, &*est.model, {});
    case EstimatorKind::kDistance: return alt_uncertainty(est.kind, emb, nullptr, partitions);
  }
  throw ContractError("unknown estimator");
}

// Turns per-batch uncertainties into weights; degenerate batches get 1.
void finish_weights(WeightCache& cache, const ExperimentConfig& cfg) {
  std::vector<UncertaintyMatrix> pool;
  for (std::size_t b = 0; b < cache.batches.size(); ++b)
    if (!cache.degenerate[b]) pool.push_back(cache.uncertainties[b]);

  cache.weights.assign(cache.batches.size(), WeightMatrix{});
  double alpha_sum = 0.0;
  if (!pool.empty()) {
    cache.summary.uncertainty = uncertainty_stats(pool);
    const double global_alpha = cfg.train.per_batch_alpha ? 0.0 : resolve_alpha(pool, cfg.weights);
    for (std::size_t b = 0; b < cache.batches.size(); ++b) {
      if (cache.degenerate[b]) continue;
      const double alpha =
          cfg.train.per_batch_alpha
              ? resolve_alpha(std::span<const UncertaintyMatrix>(&cache.uncertainties[b], 1), cfg.weights)
              : global_alpha;
      WeightMatrix w{cache.uncertainties[b].values, alpha};
      for (double& v : w.values.data()) v *= alpha;
      cache.weights[b] = std::move(w);
      alpha_sum += alpha;
    }
    cache.summary.alpha = cfg.train.per_batch_alpha ? alpha_sum / static_cast<double>(pool.size()) : global_alpha;
  }
  double wsum = 0.0;
  std::size_t wcount = 0;
  for (std::size_t b = 0; b < cache.batches.size(); ++b) {
    if (cache.degenerate[b]) cache.weights[b] = WeightMatrix::uniform(cache.batches[b].size());
    for (double v : cache.weights[b].values.data()) {
      wsum += v;
      ++wcount;
    }
  }
  cache.summary.weight_mean = wcount ? wsum / static_cast<double>(wcount) : 1.0;
  cache.summary.batches = cache.batches.size();
  cache.summary.degenerate_batches = static_cast<std::size_t>(std::count(cache.degenerate.begin(), cache.degenerate.end(), true));
  cache.summary.ran = true;
  if (cache.summary.degenerate_batches > 0)
    std::cerr << "warning: " << cache.summary.degenerate_batches << " of " << cache.summary.batches
              << " batches have identical embeddings; they keep uniform weights\n";
}

}  // namespace

std::string resolve_data_root(const DatasetConfig& config) {
  if (!config.root.empty()) return config.root;
  if (const char* env = std::getenv("AUGCL_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return "data";
}

GraphCollection load_dataset(const DatasetConfig& config) {
  if (config.name == "synthetic") return gen_synthetic(config.synthetic, config.synthetic_seed);
  const std::filesystem::path root = resolve_data_root(config);
  std::filesystem::path dir = root / config.name;
  if (!std::filesystem::exists(dir / (config.name + "_A.txt")) && std::filesystem::exists(root / (config.name + "_A.txt")))
    dir = root;
  if (!std::filesystem::exists(dir / (config.name + "_A.txt")))
    throw IoError("dataset " + config.name + " not found under '" + root.string() +
                  "' (set dataset.root or AUGCL_DATA_DIR)");
  return parse_tu_dataset(dir, config.name, TuOptions{config.degree_cap, config.use_cache});
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t graph_count, std::size_t batch_size,
                                                   std::uint64_t seed) {
  if (batch_size < 2) throw ConfigError("batch size must be at least 2");
  if (graph_count < batch_size)
    throw ContractError("dataset has " + std::to_string(graph_count) + " graphs, fewer than batch size " +
                        std::to_string(batch_size));
  std::vector<std::size_t> order(graph_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start + batch_size <= graph_count; start += batch_size)
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(start + batch_size));
  return out;
}

namespace {

std::pair<GraphBatch, GraphBatch> view_batches(const GraphCollection& data, const std::vector<std::size_t>& batch,
                                               const std::vector<AugmentationSpec>& pool, std::uint64_t view_seed) {
  std::vector<Graph> first, second;
  first.reserve(batch.size());
  second.reserve(batch.size());
  for (std::size_t g : batch) {
    ViewPair v = sample_two_views(data.graphs.at(g), pool, derive_seed(view_seed, {g}));
    first.push_back(std::move(v.first));
    second.push_back(std::move(v.second));
  }
  return {batch_graphs(first), batch_graphs(second)};
}

}  // namespace

EmbeddingBatch encode_batch(const EncoderParams& encoder, const GraphCollection& data,
                            const std::vector<std::size_t>& batch, const std::vector<AugmentationSpec>& pool,
                            std::uint64_t view_seed) {
  const auto [v1, v2] = view_batches(data, batch, pool, view_seed);
  return encode_views(v1, v2, encoder);
}

std::vector<PartitionResult> partition_batch(const EmbeddingBatch& emb, const KMeansConfig& config,
                                             std::uint64_t seed) {
  const std::size_t n = emb.size();
  if (n < 3) throw ContractError("partitioning needs batches of at least 3 graphs");
  std::vector<PartitionResult> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    KMeansConfig k = config;
    k.seed = derive_seed(seed, {i});
    out.push_back(partition_negatives(emb.z_tilde.row(i), candidates_for(emb, i), k));
  }
  return out;
}

WeightCache mine_phase(const EncoderParams& encoder, const GraphCollection& data,
                       const std::vector<std::vector<std::size_t>>& batches, const ExperimentConfig& cfg,
                       TrainedEstimator* estimator_out) {
  const MiningCounters before = mining_counters();
  const auto pool = cfg.augmentation_pool();
  WeightCache cache;
  cache.batches = batches;
  cache.degenerate.assign(batches.size(), false);

  std::vector<EmbeddingBatch> embeddings;
  std::vector<std::vector<PartitionResult>> partitions(batches.size());
  std::vector<AffinitySamples> samples;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    embeddings.push_back(encode_batch(encoder, data, batches[b], pool, derive_seed(cfg.seed, SeedStream::kMiningViews, {b})));
    const EmbeddingBatch& emb = embeddings.back();
    if (all_rows_identical(emb)) {
      cache.degenerate[b] = true;
      continue;
    }
    partitions[b] = partition_batch(emb, cfg.kmeans, derive_seed(cfg.seed, SeedStream::kPartition, {b}));
    for (std::size_t i = 0; i < emb.size(); ++i) {
      const auto row = emb.z_tilde.row(i);
      samples.push_back({std::vector<double>(row.begin(), row.end()), candidates_for(emb, i), partitions[b][i].labels});
    }
  }

  TrainedEstimator est;
  est.kind = cfg.estimator;
  if (!samples.empty()) {
    const std::uint64_t seed = derive_seed(cfg.seed, SeedStream::kEstimator);
    if (cfg.estimator == EstimatorKind::kExtraClass) est.model = train_gambler(samples, cfg.gambler, seed);
    if (cfg.estimator == EstimatorKind::kSoftmaxResponse || cfg.estimator == EstimatorKind::kEntropy)
      est.model = train_affinity_classifier(samples, cfg.gambler, seed);
  }

  cache.uncertainties.resize(batches.size());
  for (std::size_t b = 0; b < batches.size(); ++b)
    if (!cache.degenerate[b]) cache.uncertainties[b] = infer_uncertainty(est, embeddings[b], partitions[b]);
  finish_weights(cache, cfg);

  const MiningCounters after = mining_counters();
  cache.summary.partition_calls = after.partition_calls - before.partition_calls;
  cache.summary.estimator_trainings = after.estimator_trainings - before.estimator_trainings;
  if (estimator_out != nullptr) *estimator_out = std::move(est);
  return cache;
}

WeightCache reinfer_weights(const EncoderParams& encoder, const GraphCollection& data,
                            const std::vector<std::vector<std::size_t>>& batches, const ExperimentConfig& cfg,
                            const TrainedEstimator& est, std::uint64_t view_seed) {
  const MiningCounters before = mining_counters();
  const auto pool = cfg.augmentation_pool();
  WeightCache cache;
  cache.batches = batches;
  cache.degenerate.assign(batches.size(), false);
  cache.uncertainties.resize(batches.size());
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const EmbeddingBatch emb = encode_batch(encoder, data, batches[b], pool, derive_seed(view_seed, {b}));
    if (all_rows_identical(emb) || (est.kind != EstimatorKind::kDistance && !est.model)) {
      cache.degenerate[b] = true;
      continue;
    }
    std::vector<PartitionResult> parts;
    if (est.kind == EstimatorKind::kDistance)
      parts = partition_batch(emb, cfg.kmeans, derive_seed(view_seed, {b, 0x9a27ULL}));
    cache.uncertainties[b] = infer_uncertainty(est, emb, parts);
  }
  finish_weights(cache, cfg);
  const MiningCounters after = mining_counters();
  cache.summary.partition_calls = after.partition_calls - before.partition_calls;
  cache.summary.estimator_trainings = after.estimator_trainings - before.estimator_trainings;
  return cache;
}

PretrainResult pretrain(const ExperimentConfig& cfg, const GraphCollection& data) {
  cfg.validate();
  data.validate();
  if (data.size() == 0) throw ContractError("pretrain: empty dataset");
  const std::size_t bsz = cfg.resolved_batch_size(data.size());
  const auto pool = cfg.augmentation_pool();
  const bool weighted = cfg.train.mode == TrainMode::kAugcl;

  PretrainResult out;
  EncoderConfig ec = cfg.encoder;
  ec.input_dim = data.feature_dim;
  out.encoder = init_encoder(ec, derive_seed(cfg.seed, SeedStream::kEncoderInit));
  OptimizerState opt = make_optimizer(cfg.train.optimizer, cfg.train.learning_rate);
  TrainedEstimator estimator;

  double warm = 0.0, mining = 0.0, tuned = 0.0;
  for (std::size_t epoch = 1; epoch <= cfg.train.epochs; ++epoch) {
    const auto start = Clock::now();
    const bool after_switch = epoch > cfg.train.switch_epoch;
    std::vector<std::vector<std::size_t>> batches;
    std::vector<std::size_t> order;
    if (!after_switch) {
      batches = make_batches(data.size(), bsz, derive_seed(cfg.seed, SeedStream::kEpochShuffle, {epoch}));
    } else if (cfg.train.reinfer) {
      batches = make_batches(data.size(), bsz, derive_seed(cfg.seed, SeedStream::kEpochShuffle, {epoch}));
      if (weighted) {
        const auto t = Clock::now();
        // The report keeps describing the one-shot mining phase.
        const MiningSummary mined = out.cache.summary;
        out.cache = reinfer_weights(out.encoder, data, batches, cfg, estimator,
                                    derive_seed(cfg.seed, SeedStream::kMiningViews, {epoch}));
        out.cache.summary = mined;
        mining += seconds_since(t);
      }
    } else {
      batches = out.cache.batches;
    }
    order.resize(batches.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (after_switch && !cfg.train.reinfer) {
      Rng rng(derive_seed(cfg.seed, SeedStream::kEpochShuffle, {epoch}));
      std::shuffle(order.begin(), order.end(), rng);
    }

    double total = 0.0;
    for (std::size_t b : order) {
      const auto [v1, v2] =
          view_batches(data, batches[b], pool, derive_seed(cfg.seed, SeedStream::kAugmentation, {epoch, b}));
      ComputationGraph g;
      const ViewNodes views = build_encode_views(g, v1, v2, out.encoder);
      const NodeId loss = after_switch && weighted
                              ? build_augcl_loss(g, views.z_tilde, views.z_hat, out.cache.weights.at(b), cfg.contrastive)
                              : build_info_nce(g, views.z_tilde, views.z_hat, cfg.contrastive);
      g.forward_eval();
      const double value = g.value(loss).item();
      if (!std::isfinite(value))
        throw DomainError("non-finite contrastive loss at epoch " + std::to_string(epoch) + ", batch " +
                          std::to_string(b));
      total += value;
      optimizer_step(opt, out.encoder.tensors, g.backward_grad(loss));
    }
    out.loss_curve.push_back(total / static_cast<double>(batches.size()));
    (after_switch ? tuned : warm) += seconds_since(start);

    if (epoch == cfg.train.switch_epoch) {
      const auto t = Clock::now();
      auto frozen = make_batches(data.size(), bsz, derive_seed(cfg.seed, SeedStream::kFrozenBatches));
      if (weighted) {
        out.cache = mine_phase(out.encoder, data, frozen, cfg, &estimator);
      } else {
        out.cache = WeightCache{};
        out.cache.batches = std::move(frozen);
      }
      mining += seconds_since(t);
    }
  }
  out.timings = {{"warmup", warm}, {"mining", mining}, {"weighted", tuned}};
  return out;
}

Tensor embed_all(const EncoderParams& encoder, const GraphCollection& data) {
  const std::size_t n = data.size(), width = encoder.config.embedding_dim();
  Tensor out({n, width});
  constexpr std::size_t kChunk = 256;
  for (std::size_t start = 0; start < n; start += kChunk) {
    std::vector<std::size_t> idx(std::min(kChunk, n - start));
    std::iota(idx.begin(), idx.end(), start);
    const Tensor part = graph_embeddings(batch_graphs(data, idx), encoder);
    std::copy(part.data().begin(), part.data().end(), out.row(start).begin());
  }
  return out;
}

// ---- linear probe ----

std::vector<int> LogisticModel::predict(const Tensor& x) const {
  const std::size_t d = weights.rows(), c = weights.cols();
  if (x.cols() != d) throw ShapeError("probe input width mismatch");
  std::vector<int> out(x.rows());
  std::vector<double> z(d);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < d; ++k) z[k] = (x(i, k) - mean[k]) / scale[k];
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t cls = 0; cls < c; ++cls) {
      double s = bias[cls];
      for (std::size_t k = 0; k < d; ++k) s += z[k] * weights(k, cls);
      if (s > best_score) {
        best_score = s;
        best = cls;
      }
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

LogisticModel fit_logistic(const Tensor& x, const std::vector<int>& labels, std::size_t classes,
                           const ProbeConfig& cfg) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n == 0 || labels.size() != n) throw ShapeError("fit_logistic: label count differs from rows");
  if (classes < 2) throw ContractError("fit_logistic: need at least 2 classes");
  LogisticModel m;
  m.mean.assign(d, 0.0);
  m.scale.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) m.mean[k] += x(i, k);
  for (double& v : m.mean) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) m.scale[k] += (x(i, k) - m.mean[k]) * (x(i, k) - m.mean[k]);
  for (double& v : m.scale) {
    v = std::sqrt(v / static_cast<double>(n));
    if (!(v > 1e-12)) v = 1.0;
  }
  Tensor z({n, d});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) z(i, k) = (x(i, k) - m.mean[k]) / m.scale[k];

  // Step 1/L with L bounding the Hessian: 0.5 * lambda_max([z 1]^T [z 1] / n) + l2.
  std::vector<double> v(d + 1, 1.0), w(d + 1);
  double lambda = 1.0;
  for (int it = 0; it < 100; ++it) {
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = v[d];
      for (std::size_t k = 0; k < d; ++k) s += z(i, k) * v[k];
      for (std::size_t k = 0; k < d; ++k) w[k] += z(i, k) * s;
      w[d] += s;
    }
    double norm = 0.0;
    for (double& e : w) {
      e /= static_cast<double>(n);
      norm += e * e;
    }
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) break;
    lambda = norm / l2_norm(v);
    for (std::size_t k = 0; k <= d; ++k) v[k] = w[k] / norm;
  }
  const double step = 1.0 / (0.5 * lambda + cfg.l2);

  m.weights = Tensor({d, classes});
  m.bias = Tensor({1, classes});
  Tensor grad({d, classes});
  std::vector<double> gb(classes), p(classes);
  for (m.iterations = 0; m.iterations < cfg.max_iterations; ++m.iterations) {
    std::fill(grad.data().begin(), grad.data().end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < classes; ++c) {
        double s = m.bias[c];
        for (std::size_t k = 0; k < d; ++k) s += z(i, k) * m.weights(k, c);
        p[c] = s;
        top = std::max(top, s);
      }
      double sum = 0.0;
      for (double& e : p) sum += (e = std::exp(e - top));
      for (std::size_t c = 0; c < classes; ++c) {
        const double r = p[c] / sum - (labels[i] == static_cast<int>(c) ? 1.0 : 0.0);
        gb[c] += r;
        for (std::size_t k = 0; k < d; ++k) grad(k, c) += z(i, k) * r;
      }
    }
    double largest = 0.0;
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t c = 0; c < classes; ++c) {
        grad(k, c) = grad(k, c) / static_cast<double>(n) + cfg.l2 * m.weights(k, c);
        largest = std::max(largest, std::abs(grad(k, c)));
      }
    for (double& e : gb) {
      e /= static_cast<double>(n);
      largest = std::max(largest, std::abs(e));
    }
    if (largest < cfg.tolerance) break;
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t c = 0; c < classes; ++c) m.weights(k, c) -= step * grad(k, c);
    for (std::size_t c = 0; c < classes; ++c) m.bias[c] -= step * gb[c];
  }
  return m;
}

ProbeResult linear_probe_eval(const Tensor& embeddings, const std::vector<int>& labels, const ProbeConfig& cfg,
                              std::uint64_t seed) {
  if (embeddings.rows() != labels.size()) throw ShapeError("linear_probe_eval: label count differs from rows");
  int top = 0;
  for (int l : labels) {
    if (l < 0) throw ContractError("linear_probe_eval: negative label");
    top = std::max(top, l);
  }
  const std::size_t classes = static_cast<std::size_t>(top) + 1;
  const std::size_t d = embeddings.cols();
  ProbeResult r;
  for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
    const auto folds = stratified_folds(labels, cfg.folds, derive_seed(seed, SeedStream::kFolds, {rep}));
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<bool> held(labels.size(), false);
      for (std::size_t i : folds[f]) held[i] = true;
      std::vector<std::size_t> train;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (!held[i]) train.push_back(i);
      Tensor xt({train.size(), d});
      std::vector<int> yt;
      for (std::size_t r2 = 0; r2 < train.size(); ++r2) {
        std::copy_n(embeddings.row(train[r2]).begin(), d, xt.row(r2).begin());
        yt.push_back(labels[train[r2]]);
      }
      if (std::all_of(yt.begin(), yt.end(), [&](int y) { return y == yt.front(); }))
        throw ContractError("linear_probe_eval: training fold " + std::to_string(f) + " has a single class");
      const LogisticModel model = fit_logistic(xt, yt, classes, cfg);
      Tensor xs({folds[f].size(), d});
      for (std::size_t r2 = 0; r2 < folds[f].size(); ++r2)
        std::copy_n(embeddings.row(folds[f][r2]).begin(), d, xs.row(r2).begin());
      const auto pred = model.predict(xs);
      std::size_t correct = 0;
      for (std::size_t r2 = 0; r2 < pred.size(); ++r2) correct += pred[r2] == labels[folds[f][r2]];
      r.fold_accuracies.push_back(static_cast<double>(correct) / static_cast<double>(pred.size()));
    }
  }
  double sum = 0.0;
  for (double a : r.fold_accuracies) sum += a;
  r.mean = sum / static_cast<double>(r.fold_accuracies.size());
  double sq = 0.0;
  for (double a : r.fold_accuracies) sq += (a - r.mean) * (a - r.mean);
  r.std = std::sqrt(sq / static_cast<double>(r.fold_accuracies.size()));
  return r;
}

// ---- experiment ----

ExperimentOutput run_experiment(const ExperimentConfig& cfg, const GraphCollection& data) {
  cfg.validate();
  ExperimentOutput out;
  RunReport& rep = out.report;
  rep.seed = cfg.seed;
  rep.mode = to_string(cfg.train.mode);
  rep.config_text = cfg.to_text();
  rep.graph_count = data.size();

  PretrainResult pre = pretrain(cfg, data);
  rep.loss_curve = pre.loss_curve;
  rep.mining = pre.cache.summary;
  rep.timings = pre.timings;

  auto t = Clock::now();
  const Tensor emb = embed_all(pre.encoder, data);
  rep.timings["embed"] = seconds_since(t);
  t = Clock::now();
  rep.probe = linear_probe_eval(emb, data.labels(), cfg.probe, cfg.seed);
  rep.timings["probe"] = seconds_since(t);
  out.encoder = std::move(pre.encoder);
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  const auto t = Clock::now();
  const GraphCollection data = load_dataset(cfg.dataset);
  const double load = seconds_since(t);
  ExperimentOutput out = run_experiment(cfg, data);
  out.report.timings["load"] = load;
  return out;
}

NamedTensors encoder_checkpoint(const EncoderParams& encoder) {
  NamedTensors t = encoder.tensors;
  t["meta.readout_mean"] = Tensor::scalar(encoder.config.readout == ReadoutMode::kMean ? 1.0 : 0.0);
  t["meta.concat_layers"] = Tensor::scalar(encoder.config.concat_layers ? 1.0 : 0.0);
  return t;
}

EncoderParams encoder_from_checkpoint(const NamedTensors& tensors) {
  auto need = [&](const std::string& name) -> const Tensor& {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw ContractError("checkpoint lacks tensor '" + name + "'");
    return it->second;
  };
  EncoderParams p;
  std::size_t layers = 0;
  while (tensors.count("gin." + std::to_string(layers) + ".eps")) ++layers;
  if (layers == 0) throw ContractError("checkpoint holds no GIN layers");
  p.config.layers = layers;
  p.config.input_dim = need("gin.0.w1").rows();
  p.config.hidden_dim = need("gin.0.w1").cols();
  p.config.projection_dim = need("proj.w1").cols();
  p.config.readout = need("meta.readout_mean").item() != 0.0 ? ReadoutMode::kMean : ReadoutMode::kSum;
  p.config.concat_layers = need("meta.concat_layers").item() != 0.0;
  for (const auto& [name, value] : tensors)
    if (name.rfind("meta.", 0) != 0) p.tensors[name] = value;
  p.validate();
  return p;
}

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& base, const std::string& param,
                                     const std::vector<std::string>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<SweepPoint> out;
  for (const std::string& v : values) {
    SweepPoint p{param + "=" + v, base};
    if (param == "reward") {
      p.config.set("gambler.reward", v);
    } else if (param == "estimator") {
      p.config.set("mining.estimator", v);
    } else if (param == "alpha_coefficient") {
      p.config.set("weights.policy", "delta_coefficient");
      p.config.set("weights.delta_coefficient", v);
    } else {
      p.config.set(param, v);
    }
    p.config.validate();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace augcl
