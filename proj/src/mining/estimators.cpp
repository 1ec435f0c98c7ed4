#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "augcl/autodiff.hpp"
#include "augcl/error.hpp"
#include "augcl/mining.hpp"
#include "augcl/optimizer.hpp"
#include "augcl/rng.hpp"

namespace augcl {

namespace detail {
extern thread_local std::uint64_t g_estimator_trainings;
}

void GamblerConfig::validate() const {
  if (!(reward > 1.0 && reward <= 2.0)) throw ConfigError("gambler reward must lie in (1, 2]");
  if (epochs == 0 || layers == 0 || hidden_dim == 0 || batch_size == 0)
    throw ConfigError("gambler epochs, layers, hidden width and batch size must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("gambler learning rate must be positive");
}

std::vector<double> affinity_features(std::span<const double> anchor, std::span<const double> candidate) {
  if (anchor.size() != candidate.size()) throw ShapeError("affinity_features: anchor and candidate widths differ");
  std::vector<double> out(anchor.begin(), anchor.end());
  out.insert(out.end(), candidate.begin(), candidate.end());
  const std::size_t d = anchor.size();
  const double na = l2_norm(anchor), nc = l2_norm(candidate);
  for (std::size_t k = 0; k < d; ++k) {
    if (na > 0.0) out[k] /= na;
    if (nc > 0.0) out[d + k] /= nc;
  }
  return out;
}

namespace {

std::string weight_name(std::size_t l) { return "mlp." + std::to_string(l) + ".w"; }
std::string bias_name(std::size_t l) { return "mlp." + std::to_string(l) + ".b"; }

NodeId build_logits(ComputationGraph& g, const MlpModel& m, NodeId x) {
  NodeId h = x;
  for (std::size_t l = 0; l < m.layers; ++l) {
    h = g.add(g.matmul(h, g.parameter(weight_name(l), m.tensors.at(weight_name(l)))),
              g.parameter(bias_name(l), m.tensors.at(bias_name(l))));
    if (l + 1 < m.layers) h = g.relu(h);
  }
  return h;
}

void check_labels(std::span<const AffinitySamples> samples) {
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const AffinitySamples& a = samples[s];
    if (a.labels.size() != a.candidates.rows())
      throw ShapeError("affinity samples " + std::to_string(s) + ": label count differs from candidate count");
    if (a.anchor.size() != a.candidates.cols())
      throw ShapeError("affinity samples " + std::to_string(s) + ": anchor width differs from candidates");
    for (int label : a.labels)
      if (label != 0 && label != 1)
        throw ContractError("affinity label " + std::to_string(label) + " outside {0, 1} in anchor group " +
                            std::to_string(s));
  }
}

struct Pooled {
  Tensor features;  // one row per (anchor, candidate) pair
  std::vector<int> labels;
  std::vector<std::pair<std::size_t, std::size_t>> origin;  // (group, candidate)
};

Pooled pool(std::span<const AffinitySamples> samples) {
  check_labels(samples);
  if (samples.empty()) throw ContractError("estimator training needs at least one anchor group");
  const std::size_t d = samples.front().anchor.size();
  std::size_t total = 0;
  for (const auto& s : samples) {
    if (s.anchor.size() != d) throw ShapeError("affinity samples differ in embedding width");
    total += s.labels.size();
  }
  if (total == 0) throw ContractError("estimator training needs at least one candidate");
  Pooled p;
  p.features = Tensor({total, 2 * d});
  p.labels.reserve(total);
  std::size_t r = 0;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (std::size_t j = 0; j < samples[s].labels.size(); ++j, ++r) {
      const auto f = affinity_features(samples[s].anchor, samples[s].candidates.row(j));
      std::copy(f.begin(), f.end(), p.features.row(r).begin());
      p.labels.push_back(samples[s].labels[j]);
      p.origin.emplace_back(s, j);
    }
  }
  return p;
}

// Minibatch SGD on the mean of -log(sum_c P_c * T_c), where T = targets(rows)
// is a constant selection matrix: o at the label and 1 at the abstention
// column for the gambler, one-hot for cross-entropy.
template <typename TargetFn>
MlpModel train_mlp(const Pooled& data, std::size_t outputs, const GamblerConfig& cfg, std::uint64_t seed,
                   TargetFn targets, const char* what) {
  cfg.validate();
  MlpModel model = init_mlp(data.features.cols(), cfg.hidden_dim, cfg.layers, outputs, seed);
  OptimizerState opt = make_optimizer(OptimizerKind::kSgd, cfg.learning_rate);
  const std::size_t n = data.labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t width = data.features.cols();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(derive_seed(seed, {epoch, 0x5eedULL}));
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      const std::size_t rows = stop - start;
      Tensor x({rows, width});
      std::vector<std::size_t> picked(order.begin() + static_cast<std::ptrdiff_t>(start),
                                      order.begin() + static_cast<std::ptrdiff_t>(stop));
      for (std::size_t r = 0; r < rows; ++r)
        std::copy_n(data.features.row(picked[r]).begin(), width, x.row(r).begin());

      ComputationGraph g;
      const NodeId probs = g.softmax(build_logits(g, model, g.constant(std::move(x))));
      const NodeId selected = g.sum_rows(g.mul(probs, g.constant(targets(picked))));
      const NodeId per_sample = g.log(selected);
      const NodeId loss = g.scale(g.mean(per_sample), -1.0);
      try {
        g.forward_eval();
      } catch (const DomainError&) {
        // Locate the sample whose selected probability mass vanished.
        Tensor xr({rows, width});
        for (std::size_t r = 0; r < rows; ++r)
          std::copy_n(data.features.row(picked[r]).begin(), width, xr.row(r).begin());
        const Tensor p = model.probabilities(xr);
        const Tensor t = targets(picked);
        for (std::size_t r = 0; r < rows; ++r) {
          double mass = 0.0;
          for (std::size_t c = 0; c < outputs; ++c) mass += p(r, c) * t(r, c);
          if (!(mass > 0.0) || !std::isfinite(mass)) {
            const auto [group, cand] = data.origin[picked[r]];
            throw DomainError(std::string(what) + ": non-finite loss at epoch " + std::to_string(epoch) +
                              " for anchor group " + std::to_string(group) + ", candidate " + std::to_string(cand));
          }
        }
        throw;
      }
      const double value = g.value(loss).item();
      if (!std::isfinite(value)) {
        const auto [group, cand] = data.origin[picked.front()];
        throw DomainError(std::string(what) + ": non-finite loss at epoch " + std::to_string(epoch) +
                          " in the minibatch starting at anchor group " + std::to_string(group) + ", candidate " +
                          std::to_string(cand));
      }
      optimizer_step(opt, model.tensors, g.backward_grad(loss));
    }
  }
  ++detail::g_estimator_trainings;
  return model;
}

}  // namespace

Tensor MlpModel::probabilities(const Tensor& inputs) const {
  if (inputs.cols() != input_dim)
    throw ShapeError("estimator input width " + std::to_string(inputs.cols()) + " but model expects " +
                     std::to_string(input_dim));
  ComputationGraph g;
  const NodeId out = g.softmax(build_logits(g, *this, g.constant(inputs)));
  g.forward_eval();
  return g.value(out);
}

MlpModel init_mlp(std::size_t input_dim, std::size_t hidden_dim, std::size_t layers, std::size_t outputs,
                  std::uint64_t seed) {
  if (input_dim == 0 || hidden_dim == 0 || layers == 0 || outputs == 0)
    throw ConfigError("MLP widths and depth must be positive");
  MlpModel m{input_dim, hidden_dim, layers, outputs, {}};
  Rng rng(seed);
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = l == 0 ? input_dim : hidden_dim;
    const std::size_t out = l + 1 == layers ? outputs : hidden_dim;
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Tensor w({in, out});
    for (double& v : w.data()) v = dist(rng);
    m.tensors[weight_name(l)] = std::move(w);
    m.tensors[bias_name(l)] = Tensor({1, out});
  }
  return m;
}

double gambler_sample_loss(double p_correct, double u, double reward) {
  const double mass = p_correct * reward + u;
  if (!(mass > 0.0)) throw DomainError("gambler loss: p * o + u must be positive");
  return -std::log(mass);
}

GamblerParams train_gambler(std::span<const AffinitySamples> samples, const GamblerConfig& config,
                            std::uint64_t seed) {
  config.validate();
  const Pooled data = pool(samples);
  const double o = config.reward;
  auto targets = [&](const std::vector<std::size_t>& picked) {
    Tensor t({picked.size(), 3});
    for (std::size_t r = 0; r < picked.size(); ++r) {
      t(r, static_cast<std::size_t>(data.labels[picked[r]])) = o;
      t(r, 2) = 1.0;
    }
    return t;
  };
  return train_mlp(data, 3, config, seed, targets, "train_gambler");
}

MlpModel train_affinity_classifier(std::span<const AffinitySamples> samples, const GamblerConfig& config,
                                   std::uint64_t seed) {
  config.validate();
  const Pooled data = pool(samples);
  auto targets = [&](const std::vector<std::size_t>& picked) {
    Tensor t({picked.size(), 2});
    for (std::size_t r = 0; r < picked.size(); ++r) t(r, static_cast<std::size_t>(data.labels[picked[r]])) = 1.0;
    return t;
  };
  return train_mlp(data, 2, config, seed, targets, "train_affinity_classifier");
}

GamblerOutput gambler_infer(const GamblerParams& params, std::span<const double> anchor,
                            std::span<const double> candidate) {
  if (params.outputs != 3) throw ShapeError("gambler_infer: model must have 3 outputs");
  const auto f = affinity_features(anchor, candidate);
  const Tensor p = params.probabilities(Tensor::row_vector(f));
  return {p(0, 1), p(0, 0), p(0, 2)};
}

namespace {

// Probabilities for every ordered pair (i, j != i), laid out N x (N-1) x C.
Tensor pair_probabilities(const EmbeddingBatch& emb, const MlpModel& model) {
  emb.validate();
  const std::size_t n = emb.size(), d = emb.dim();
  if (n < 2) throw ContractError("uncertainty matrix needs at least 2 anchors");
  if (model.input_dim != 2 * d)
    throw ShapeError("estimator was trained on width " + std::to_string(model.input_dim) +
                     " but the batch yields pair features of width " + std::to_string(2 * d));
  Tensor x({n * (n - 1), 2 * d});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c + 1 < n; ++c) {
      const auto f = affinity_features(emb.z_tilde.row(i), emb.z_hat.row(candidate_of(i, c)));
      std::copy(f.begin(), f.end(), x.row(i * (n - 1) + c).begin());
    }
  return model.probabilities(x);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

UncertaintyMatrix build_uncertainty_matrix(const EmbeddingBatch& embeddings, const GamblerParams& params) {
  if (params.outputs != 3) throw ShapeError("build_uncertainty_matrix: model must have 3 outputs");
  const Tensor p = pair_probabilities(embeddings, params);
  const std::size_t n = embeddings.size();
  UncertaintyMatrix u{Tensor({n, n - 1})};
  for (std::size_t r = 0; r < p.rows(); ++r) u.values[r] = clamp01(p(r, 2));
  return u;
}

EstimatorKind parse_estimator_kind(const std::string& name) {
  if (name == "extra_class") return EstimatorKind::kExtraClass;
  if (name == "softmax_response") return EstimatorKind::kSoftmaxResponse;
  if (name == "entropy") return EstimatorKind::kEntropy;
  if (name == "distance") return EstimatorKind::kDistance;
  throw ConfigError("unknown estimator '" + name + "' (expected extra_class, softmax_response, entropy or distance)");
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kExtraClass: return "extra_class";
    case EstimatorKind::kSoftmaxResponse: return "softmax_response";
    case EstimatorKind::kEntropy: return "entropy";
    case EstimatorKind::kDistance: return "distance";
  }
  return "?";
}

double softmax_response_uncertainty(double p0, double p1) { return clamp01(2.0 * (1.0 - std::max(p0, p1))); }

double entropy_uncertainty(double p0, double p1) {
  double h = 0.0;
  for (double p : {p0, p1})
    if (p > 0.0) h -= p * std::log(p);
  return clamp01(h / std::log(2.0));
}

double distance_uncertainty(double d1, double d2) {
  const double s = d1 + d2;
  if (!(s > 0.0)) return 1.0;
  return clamp01(1.0 - std::abs(d1 - d2) / s);
}

UncertaintyMatrix alt_uncertainty(EstimatorKind method, const EmbeddingBatch& embeddings,
                                  const MlpModel* classifier, std::span<const PartitionResult> partitions) {
  const std::size_t n = embeddings.size();
  if (n < 2) throw ContractError("alt_uncertainty: need at least 2 anchors");
  UncertaintyMatrix u{Tensor({n, n - 1})};
  switch (method) {
    case EstimatorKind::kExtraClass:
      throw ContractError("alt_uncertainty: use build_uncertainty_matrix for the extra-class estimator");
    case EstimatorKind::kSoftmaxResponse:
    case EstimatorKind::kEntropy: {
      if (classifier == nullptr || classifier->outputs != 2)
        throw ContractError("alt_uncertainty: a 2-output classifier is required");
      const Tensor p = pair_probabilities(embeddings, *classifier);
      for (std::size_t r = 0; r < p.rows(); ++r)
        u.values[r] = method == EstimatorKind::kEntropy ? entropy_uncertainty(p(r, 0), p(r, 1))
                                                        : softmax_response_uncertainty(p(r, 0), p(r, 1));
      return u;
    }
    case EstimatorKind::kDistance: {
      embeddings.validate();
      if (partitions.size() != n) throw ShapeError("alt_uncertainty: need one partition per anchor");
      Tensor normalized = embeddings.z_hat;
      normalize_rows(normalized);
      for (std::size_t i = 0; i < n; ++i) {
        const Tensor& c = partitions[i].centroids;
        if (c.rows() != 2 || c.cols() != embeddings.dim())
          throw ShapeError("alt_uncertainty: partition " + std::to_string(i) + " has wrong centroid shape");
        for (std::size_t col = 0; col + 1 < n; ++col) {
          const auto z = normalized.row(candidate_of(i, col));
          u.values(i, col) =
              distance_uncertainty(std::sqrt(squared_distance(z, c.row(0))), std::sqrt(squared_distance(z, c.row(1))));
        }
      }
      return u;
    }
  }
  return u;
}

// ---- weights ----

WeightPolicyKind parse_weight_policy(const std::string& name) {
  if (name == "reciprocal_mean") return WeightPolicyKind::kReciprocalMean;
  if (name == "fixed") return WeightPolicyKind::kFixed;
  if (name == "delta_coefficient") return WeightPolicyKind::kDeltaCoefficient;
  throw ConfigError("unknown weight policy '" + name + "' (expected reciprocal_mean, fixed or delta_coefficient)");
}

std::string to_string(WeightPolicyKind kind) {
  switch (kind) {
    case WeightPolicyKind::kReciprocalMean: return "reciprocal_mean";
    case WeightPolicyKind::kFixed: return "fixed";
    case WeightPolicyKind::kDeltaCoefficient: return "delta_coefficient";
  }
  return "?";
}

UncertaintyStats uncertainty_stats(std::span<const UncertaintyMatrix> matrices) {
  UncertaintyStats s;
  double sum = 0.0;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  for (const auto& m : matrices)
    for (double v : m.values.data()) {
      sum += v;
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
      ++s.count;
    }
  if (s.count == 0) throw ContractError("uncertainty statistics of an empty pool");
  s.mean = sum / static_cast<double>(s.count);
  double sq = 0.0;
  for (const auto& m : matrices)
    for (double v : m.values.data()) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(s.count));
  return s;
}

double resolve_alpha(std::span<const UncertaintyMatrix> matrices, const WeightPolicy& policy) {
  for (const auto& m : matrices) m.validate();
  switch (policy.kind) {
    case WeightPolicyKind::kFixed:
      if (!(policy.alpha > 0.0) || !std::isfinite(policy.alpha)) throw ConfigError("fixed alpha must be positive");
      return policy.alpha;
    case WeightPolicyKind::kReciprocalMean: {
      const UncertaintyStats s = uncertainty_stats(matrices);
      if (!(s.mean > 0.0))
        throw DomainError("mean uncertainty is zero; fall back to uniform weights (baseline mode)");
      return 1.0 / s.mean;
    }
    case WeightPolicyKind::kDeltaCoefficient: {
      const UncertaintyStats s = uncertainty_stats(matrices);
      const double denom = s.mean + policy.delta_coefficient * s.std;
      if (!(denom > 0.0))
        throw DomainError("mean + " + std::to_string(policy.delta_coefficient) +
                          " * std of the uncertainties is not positive; choose a smaller coefficient");
      return 1.0 / denom;
    }
  }
  return 1.0;
}

WeightMatrix weights_from_uncertainty(const UncertaintyMatrix& u, const WeightPolicy& policy) {
  return weights_from_uncertainty(std::span<const UncertaintyMatrix>(&u, 1), policy).front();
}

std::vector<WeightMatrix> weights_from_uncertainty(std::span<const UncertaintyMatrix> matrices,
                                                   const WeightPolicy& policy) {
  const double alpha = resolve_alpha(matrices, policy);
  std::vector<WeightMatrix> out;
  out.reserve(matrices.size());
  for (const auto& m : matrices) {
    WeightMatrix w{m.values, alpha};
    for (double& v : w.values.data()) v *= alpha;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace augcl
