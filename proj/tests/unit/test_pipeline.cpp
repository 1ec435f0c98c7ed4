#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "augcl/error.hpp"
#include "augcl/pipeline.hpp"
#include "augcl/rng.hpp"

using namespace augcl;

namespace {

ExperimentConfig small_config(std::uint64_t seed = 3) {
  ExperimentConfig cfg;
  cfg.dataset.name = "synthetic";
  cfg.dataset.synthetic = {2, 12, 0.5, 0.05, 10, 8};
  cfg.dataset.synthetic_seed = seed;
  cfg.encoder.hidden_dim = 8;
  cfg.encoder.layers = 2;
  cfg.encoder.projection_dim = 8;
  cfg.train.batch_size = 8;
  cfg.train.epochs = 3;
  cfg.train.switch_epoch = 1;
  cfg.gambler.hidden_dim = 16;
  cfg.gambler.epochs = 2;
  cfg.probe.folds = 4;
  cfg.seed = seed;
  return cfg;
}

EncoderParams encoder_for(const ExperimentConfig& cfg, const GraphCollection& data) {
  EncoderConfig ec = cfg.encoder;
  ec.input_dim = data.feature_dim;
  return init_encoder(ec, derive_seed(cfg.seed, SeedStream::kEncoderInit));
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("batches") {
    const auto b = make_batches(23, 5, 1);
    CHECK(b.size() == 4);
    std::vector<std::size_t> seen;
    for (const auto& batch : b) {
      CHECK(batch.size() == 5);
      seen.insert(seen.end(), batch.begin(), batch.end());
    }
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    CHECK(make_batches(23, 5, 1) == b);
    CHECK(make_batches(23, 5, 2) != b);
    CHECK_THROWS(make_batches(3, 5, 1));
  }

  TEST_CASE("config invariants") {
    ExperimentConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.train.switch_epoch = cfg.train.epochs;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.train.switch_epoch = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.train.batch_size = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK(ExperimentConfig{}.resolved_batch_size(188) == 32);
    CHECK(ExperimentConfig{}.resolved_batch_size(1000) == 128);
  }

  TEST_CASE("config text round trip and overrides") {
    ExperimentConfig cfg = small_config();
    apply_overrides(cfg, {"gambler.reward=1.6", "weights.policy=delta_coefficient", "weights.delta_coefficient=-0.5",
                          "augment.pool=node_drop,subgraph", "contrastive.temperature=0.35"});
    const std::string text = cfg.to_text();
    CHECK(text.find("reward = 1.6\n") != std::string::npos);
    CHECK(text.find("temperature = 0.35\n") != std::string::npos);
    CHECK(cfg.get("augment.pool") == "node_drop,subgraph");
    const ExperimentConfig back = ExperimentConfig::from_text(text);
    CHECK(back.to_text() == text);
    for (const auto& key : ExperimentConfig::keys()) CHECK(back.get(key) == cfg.get(key));

    CHECK_THROWS_AS(apply_overrides(cfg, {"gambler.nope=1"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(cfg, {"gambler.reward"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(cfg, {"gambler.reward=abc"}), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_text("[train]\nepochs = 3\nbogus\n"), ConfigError);
  }

  TEST_CASE("datasets") {
    DatasetConfig dc;
    dc.name = "NO_SUCH_SET";
    dc.root = "/nonexistent-augcl";
    CHECK_THROWS_AS(load_dataset(dc), IoError);
    const GraphCollection c = load_dataset(small_config().dataset);
    CHECK(c.size() == 24);
    CHECK(c.class_count == 2);
  }

  TEST_CASE("mining phase") {
    const ExperimentConfig cfg = small_config();
    const GraphCollection data = load_dataset(cfg.dataset);
    const EncoderParams enc = encoder_for(cfg, data);
    const auto batches = make_batches(data.size(), 8, 5);
    reset_mining_counters();
    TrainedEstimator est;
    const WeightCache cache = mine_phase(enc, data, batches, cfg, &est);
    CHECK(cache.weights.size() == 3);
    double total = 0;
    std::size_t count = 0;
    for (std::size_t b = 0; b < 3; ++b) {
      CHECK(cache.weights[b].values.rows() == 8);
      CHECK(cache.weights[b].values.cols() == 7);
      CHECK(cache.uncertainties[b].values.rows() == 8);
      for (double w : cache.weights[b].values.data()) total += w, ++count;
    }
    CHECK(std::abs(total / count - 1.0) <= 1e-9);
    CHECK(cache.summary.ran);
    CHECK(cache.summary.partition_calls == 24);
    CHECK(cache.summary.estimator_trainings == 1);
    CHECK(cache.summary.alpha == doctest::Approx(cache.weights[0].alpha));
    CHECK(est.model.has_value());

    // mining twice gives the same cache
    const WeightCache again = mine_phase(enc, data, batches, cfg);
    for (std::size_t b = 0; b < 3; ++b) CHECK(again.weights[b].values == cache.weights[b].values);

    // re-inference with the trained estimator does not train again
    reset_mining_counters();
    const WeightCache re = reinfer_weights(enc, data, batches, cfg, est, 99);
    CHECK(mining_counters().estimator_trainings == 0);
    CHECK(re.weights.size() == 3);

    ExperimentConfig per = cfg;
    per.train.per_batch_alpha = true;
    const WeightCache pb = mine_phase(enc, data, batches, per);
    for (const auto& w : pb.weights) {
      double m = 0;
      for (double x : w.values.data()) m += x;
      CHECK(std::abs(m / 56.0 - 1.0) <= 1e-9);
    }
  }

  TEST_CASE("alternative estimators in the mining phase") {
    const GraphCollection data = load_dataset(small_config().dataset);
    for (auto kind : {EstimatorKind::kSoftmaxResponse, EstimatorKind::kEntropy, EstimatorKind::kDistance}) {
      ExperimentConfig cfg = small_config();
      cfg.estimator = kind;
      reset_mining_counters();
      const WeightCache cache = mine_phase(encoder_for(cfg, data), data, make_batches(24, 8, 1), cfg);
      CHECK(cache.weights.size() == 3);
      CHECK(cache.summary.estimator_trainings == (kind == EstimatorKind::kDistance ? 0 : 1));
      for (const auto& u : cache.uncertainties)
        for (double x : u.values.data()) CHECK((x >= 0.0 && x <= 1.0));
    }
  }

  TEST_CASE("degenerate batches fall back to uniform weights") {
    const ExperimentConfig cfg = small_config();
    const GraphCollection data = load_dataset(cfg.dataset);
    EncoderParams enc = encoder_for(cfg, data);
    for (auto& [name, t] : enc.tensors) t = Tensor(t.shape());
    const WeightCache cache = mine_phase(enc, data, make_batches(24, 8, 1), cfg);
    CHECK(cache.summary.degenerate_batches == 3);
    for (const auto& w : cache.weights)
      for (double x : w.values.data()) CHECK(x == 1.0);
  }

  TEST_CASE("embeddings") {
    const ExperimentConfig cfg = small_config();
    const GraphCollection data = load_dataset(cfg.dataset);
    const EncoderParams enc = encoder_for(cfg, data);
    const Tensor e = embed_all(enc, data);
    CHECK(e.rows() == data.size());
    CHECK(e.cols() == enc.config.embedding_dim());
    CHECK(embed_all(enc, data) == e);

    const EncoderParams back = encoder_from_checkpoint(encoder_checkpoint(enc));
    CHECK(back.tensors == enc.tensors);
    CHECK(back.config.readout == enc.config.readout);
    CHECK(back.config.layers == enc.config.layers);
    CHECK(embed_all(back, data) == e);
  }

  TEST_CASE("linear probe") {
    Rng rng(1);
    std::normal_distribution<double> noise(0.0, 0.3);
    const std::size_t n = 80;
    Tensor x({n, 4});
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(i % 2);
      x(i, 0) = (y[i] ? 3.0 : -3.0) + noise(rng);
      for (std::size_t k = 1; k < 4; ++k) x(i, k) = noise(rng);
    }
    ProbeConfig pc;
    const ProbeResult sep = linear_probe_eval(x, y, pc, 0);
    CHECK(sep.mean == 1.0);
    CHECK(sep.fold_accuracies.size() == 10);

    pc.repeats = 2;
    const ProbeResult twice = linear_probe_eval(x, y, pc, 0);
    CHECK(twice.fold_accuracies.size() == 20);
    double m = mean_of(twice.fold_accuracies), var = 0;
    for (double a : twice.fold_accuracies) var += (a - m) * (a - m);
    CHECK(twice.mean == m);
    CHECK(twice.std == std::sqrt(var / 20.0));

    // pure noise features with shuffled labels
    Tensor z({n, 4});
    for (double& v : z.data()) v = noise(rng);
    pc.repeats = 1;
    std::vector<double> chance;
    for (int s = 0; s < 20; ++s) {
      std::vector<int> shuffled = y;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      chance.push_back(linear_probe_eval(z, shuffled, pc, s).mean);
    }
    CHECK(std::abs(mean_of(chance) - 0.5) <= 0.1);

    const LogisticModel lm = fit_logistic(x, y, 2, pc);
    CHECK(lm.predict(x) == y);
    CHECK(lm.iterations <= pc.max_iterations);

    std::vector<int> one_class(n, 0);
    one_class[0] = 1;
    CHECK_THROWS_AS(linear_probe_eval(x, one_class, ProbeConfig{}, 0), ContractError);
  }

  TEST_CASE("runs are deterministic") {
    const ExperimentConfig cfg = small_config();
    const ExperimentOutput a = run_experiment(cfg), b = run_experiment(cfg);
    CHECK(a.report.to_json(false) == b.report.to_json(false));
    CHECK(a.report.loss_csv() == b.report.loss_csv());
    CHECK(a.report.loss_curve.size() == 3);
    CHECK(a.encoder.tensors == b.encoder.tensors);
    CHECK(a.report.mining.partition_calls == 24);
    CHECK(a.report.mining.estimator_trainings == 1);

    // the echoed config reproduces the run
    const ExperimentConfig echoed = ExperimentConfig::from_text(a.report.config_text);
    CHECK(run_experiment(echoed).report.to_json(false) == a.report.to_json(false));

    ExperimentConfig other = cfg;
    other.seed = 4;
    CHECK(run_experiment(other).report.loss_curve != a.report.loss_curve);

    ExperimentConfig re = cfg;
    re.train.reinfer = true;
    const ExperimentOutput r = run_experiment(re);
    CHECK(r.report.mining.estimator_trainings == 1);
    CHECK(r.report.loss_curve.size() == 3);
  }

  TEST_CASE("baseline mode has no hidden coupling to mining") {
    ExperimentConfig base = small_config();
    base.train.mode = TrainMode::kBaseline;
    const ExperimentOutput b = run_experiment(base);
    CHECK(!b.report.mining.ran);
    CHECK(b.report.mining.partition_calls == 0);

    ExperimentConfig knobs = base;
    knobs.gambler.reward = 1.5;
    knobs.gambler.epochs = 7;
    knobs.estimator = EstimatorKind::kEntropy;
    knobs.weights = {WeightPolicyKind::kFixed, 3.0, 0.0};
    knobs.kmeans.restarts = 5;
    const auto strip_config = [](RunReport r) {
      r.config_text.clear();
      return r.to_json(false);
    };
    CHECK(strip_config(run_experiment(knobs).report) == strip_config(b.report));

    // identical until the switch, then the weighted loss takes over
    const ExperimentOutput a = run_experiment(small_config());
    CHECK(a.report.loss_curve[0] == b.report.loss_curve[0]);
    CHECK(a.report.loss_curve[2] != b.report.loss_curve[2]);
  }

  TEST_CASE("reports") {
    const ExperimentOutput a = run_experiment(small_config());
    const std::string json = a.report.to_json();
    for (const char* key : {"\"seed\"", "\"loss_curve\"", "\"mining\"", "\"alpha\"", "\"fold_accuracies\"",
                            "\"mean\"", "\"std\"", "\"config\"", "\"timings\""})
      CHECK(json.find(key) != std::string::npos);
    CHECK(a.report.to_json(false).find("\"timings\"") == std::string::npos);
    const std::string csv = a.report.loss_csv();
    CHECK(csv.rfind("epoch,loss\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }

  TEST_CASE("sweep grids") {
    const ExperimentConfig base = small_config();
    const auto rewards = expand_sweep(base, "reward", {"1.5", "1.6", "1.7", "1.8", "1.9"});
    REQUIRE(rewards.size() == 5);
    CHECK(rewards[0].label == "reward=1.5");
    CHECK(rewards[4].config.gambler.reward == 1.9);

    const auto alphas = expand_sweep(base, "alpha_coefficient", {"-1", "-0.5", "0", "0.5", "1"});
    REQUIRE(alphas.size() == 5);
    for (const auto& p : alphas) CHECK(p.config.weights.kind == WeightPolicyKind::kDeltaCoefficient);
    CHECK(alphas[1].config.weights.delta_coefficient == -0.5);

    const auto est = expand_sweep(base, "estimator", {"extra_class", "distance"});
    CHECK(est[1].config.estimator == EstimatorKind::kDistance);
    const auto keyed = expand_sweep(base, "train.epochs", {"4", "5"});
    CHECK(keyed[1].config.train.epochs == 5);
    CHECK_THROWS_AS(expand_sweep(base, "reward", {"0.5"}), ConfigError);

    // alpha from the delta grid
    const GraphCollection data = load_dataset(base.dataset);
    const auto batches = make_batches(24, 8, 2);
    const EncoderParams enc = encoder_for(base, data);
    const WeightCache mu = mine_phase(enc, data, batches, alphas[2].config);
    const WeightCache plus = mine_phase(enc, data, batches, alphas[4].config);
    const auto& s = mu.summary.uncertainty;
    CHECK(mu.summary.alpha == doctest::Approx(1.0 / s.mean));
    CHECK(plus.summary.alpha == doctest::Approx(1.0 / (s.mean + s.std)));
  }
}
