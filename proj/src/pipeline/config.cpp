#include "augcl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "augcl/error.hpp"

namespace augcl {

TrainMode parse_train_mode(const std::string& name) {
  if (name == "augcl") return TrainMode::kAugcl;
  if (name == "baseline") return TrainMode::kBaseline;
  throw ConfigError("unknown train mode '" + name + "' (expected augcl or baseline)");
}

std::string to_string(TrainMode mode) { return mode == TrainMode::kAugcl ? "augcl" : "baseline"; }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) { return static_cast<std::size_t>(to_u64(key, v)); }

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty() || !std::isfinite(out))
    throw ConfigError("'" + key + "' expects a finite number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

struct Field {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define AUGCL_SIZE(k, member)                                                                  \
  Field {                                                                                      \
    k, [](const ExperimentConfig& c) { return fmt(static_cast<std::uint64_t>(c.member)); },  \
        [](ExperimentConfig& c, const std::string& v) { c.member = to_size(k, v); }          \
  }
#define AUGCL_DOUBLE(k, member)                                                                                 \
  Field {                                                                                                       \
    k, [](const ExperimentConfig& c) { return fmt(c.member); },                                               \
        [](ExperimentConfig& c, const std::string& v) { c.member = to_double(k, v); }                         \
  }
#define AUGCL_BOOL(k, member)                                                                                   \
  Field {                                                                                                       \
    k, [](const ExperimentConfig& c) { return fmt(c.member); },                                               \
        [](ExperimentConfig& c, const std::string& v) { c.member = to_bool(k, v); }                           \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"seed", [](const ExperimentConfig& c) { return fmt(c.seed); },
       [](ExperimentConfig& c, const std::string& v) { c.seed = to_u64("seed", v); }},

      {"dataset.name", [](const ExperimentConfig& c) { return c.dataset.name; },
       [](ExperimentConfig& c, const std::string& v) { c.dataset.name = v; }},
      {"dataset.root", [](const ExperimentConfig& c) { return c.dataset.root; },
       [](ExperimentConfig& c, const std::string& v) { c.dataset.root = v; }},
      AUGCL_SIZE("dataset.degree_cap", dataset.degree_cap),
      AUGCL_BOOL("dataset.use_cache", dataset.use_cache),
      AUGCL_SIZE("dataset.synthetic_classes", dataset.synthetic.classes),
      AUGCL_SIZE("dataset.synthetic_graphs_per_class", dataset.synthetic.graphs_per_class),
      AUGCL_SIZE("dataset.synthetic_nodes", dataset.synthetic.nodes),
      AUGCL_DOUBLE("dataset.synthetic_intra_p", dataset.synthetic.intra_p),
      AUGCL_DOUBLE("dataset.synthetic_inter_p", dataset.synthetic.inter_p),
      AUGCL_SIZE("dataset.synthetic_degree_cap", dataset.synthetic.degree_cap),
      {"dataset.synthetic_seed", [](const ExperimentConfig& c) { return fmt(c.dataset.synthetic_seed); },
       [](ExperimentConfig& c, const std::string& v) { c.dataset.synthetic_seed = to_u64("dataset.synthetic_seed", v); }},

      AUGCL_SIZE("encoder.hidden_dim", encoder.hidden_dim),
      AUGCL_SIZE("encoder.layers", encoder.layers),
      AUGCL_SIZE("encoder.projection_dim", encoder.projection_dim),
      {"encoder.readout", [](const ExperimentConfig& c) { return to_string(c.encoder.readout); },
       [](ExperimentConfig& c, const std::string& v) { c.encoder.readout = parse_readout_mode(v); }},
      AUGCL_BOOL("encoder.concat_layers", encoder.concat_layers),

      {"augment.pool",
       [](const ExperimentConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.augmentations.size(); ++i)
           out += (i ? "," : "") + to_string(c.augmentations[i]);
         return out;
       },
       [](ExperimentConfig& c, const std::string& v) {
         std::vector<AugmentationKind> kinds;
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) kinds.push_back(parse_augmentation_kind(trim(item)));
         if (kinds.empty()) throw ConfigError("augment.pool must name at least one augmentation");
         c.augmentations = std::move(kinds);
       }},
      AUGCL_DOUBLE("augment.ratio", augmentation_ratio),

      {"train.mode", [](const ExperimentConfig& c) { return to_string(c.train.mode); },
       [](ExperimentConfig& c, const std::string& v) { c.train.mode = parse_train_mode(v); }},
      AUGCL_SIZE("train.batch_size", train.batch_size),
      AUGCL_SIZE("train.epochs", train.epochs),
      AUGCL_SIZE("train.switch_epoch", train.switch_epoch),
      {"train.optimizer", [](const ExperimentConfig& c) { return to_string(c.train.optimizer); },
       [](ExperimentConfig& c, const std::string& v) { c.train.optimizer = parse_optimizer_kind(v); }},
      AUGCL_DOUBLE("train.learning_rate", train.learning_rate),
      AUGCL_BOOL("train.reinfer", train.reinfer),
      AUGCL_BOOL("train.per_batch_alpha", train.per_batch_alpha),

      AUGCL_DOUBLE("contrastive.temperature", contrastive.temperature),
      AUGCL_BOOL("contrastive.symmetric", contrastive.symmetric),

      AUGCL_SIZE("kmeans.restarts", kmeans.restarts),
      AUGCL_SIZE("kmeans.max_iterations", kmeans.max_iterations),
      AUGCL_DOUBLE("kmeans.tolerance", kmeans.tolerance),

      AUGCL_DOUBLE("gambler.reward", gambler.reward),
      AUGCL_SIZE("gambler.epochs", gambler.epochs),
      AUGCL_SIZE("gambler.layers", gambler.layers),
      AUGCL_SIZE("gambler.hidden_dim", gambler.hidden_dim),
      AUGCL_DOUBLE("gambler.learning_rate", gambler.learning_rate),
      AUGCL_SIZE("gambler.batch_size", gambler.batch_size),

      {"weights.policy", [](const ExperimentConfig& c) { return to_string(c.weights.kind); },
       [](ExperimentConfig& c, const std::string& v) { c.weights.kind = parse_weight_policy(v); }},
      AUGCL_DOUBLE("weights.alpha", weights.alpha),
      AUGCL_DOUBLE("weights.delta_coefficient", weights.delta_coefficient),

      {"mining.estimator", [](const ExperimentConfig& c) { return to_string(c.estimator); },
       [](ExperimentConfig& c, const std::string& v) { c.estimator = parse_estimator_kind(v); }},

      AUGCL_SIZE("probe.folds", probe.folds),
      AUGCL_SIZE("probe.repeats", probe.repeats),
      AUGCL_DOUBLE("probe.l2", probe.l2),
      AUGCL_DOUBLE("probe.tolerance", probe.tolerance),
      AUGCL_SIZE("probe.max_iterations", probe.max_iterations),
  };
  return table;
}

#undef AUGCL_SIZE
#undef AUGCL_DOUBLE
#undef AUGCL_BOOL

const Field& field(const std::string& key) {
  for (const Field& f : fields())
    if (f.key == key) return f;
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

std::vector<AugmentationSpec> ExperimentConfig::augmentation_pool() const {
  std::vector<AugmentationSpec> pool;
  for (AugmentationKind k : augmentations) pool.push_back({k, augmentation_ratio});
  return pool;
}

std::size_t ExperimentConfig::resolved_batch_size(std::size_t graph_count) const {
  if (train.batch_size != 0) return train.batch_size;
  return graph_count < 500 ? 32 : 128;
}

void ExperimentConfig::validate() const {
  if (train.switch_epoch == 0 || train.switch_epoch >= train.epochs)
    throw ConfigError("train.switch_epoch must satisfy 0 < W < E (W=" + std::to_string(train.switch_epoch) +
                      ", E=" + std::to_string(train.epochs) + ")");
  if (train.batch_size == 1) throw ConfigError("train.batch_size must be at least 2");
  if (!(train.learning_rate > 0.0)) throw ConfigError("train.learning_rate must be positive");
  if (augmentations.empty()) throw ConfigError("augment.pool is empty");
  if (!(augmentation_ratio >= 0.0 && augmentation_ratio < 1.0)) throw ConfigError("augment.ratio must be in [0, 1)");
  if (encoder.hidden_dim == 0 || encoder.layers == 0 || encoder.projection_dim == 0)
    throw ConfigError("encoder widths and layer count must be positive");
  contrastive.validate();
  kmeans.validate();
  gambler.validate();
  if (weights.kind == WeightPolicyKind::kFixed && !(weights.alpha > 0.0))
    throw ConfigError("weights.alpha must be positive for the fixed policy");
  if (probe.folds < 2) throw ConfigError("probe.folds must be at least 2");
  if (probe.repeats == 0) throw ConfigError("probe.repeats must be positive");
  if (!(probe.l2 >= 0.0) || !(probe.tolerance > 0.0) || probe.max_iterations == 0)
    throw ConfigError("probe settings out of range");
}

void ExperimentConfig::set(const std::string& key, const std::string& value) { field(key).set(*this, trim(value)); }

std::string ExperimentConfig::get(const std::string& key) const { return field(key).get(*this); }

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> all = [] {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
  }();
  return all;
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  std::string section;
  for (const Field& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string s = dot == std::string::npos ? "" : f.key.substr(0, dot);
    const std::string leaf = dot == std::string::npos ? f.key : f.key.substr(dot + 1);
    if (s != section) {
      out += "\n[" + s + "]\n";
      section = s;
    }
    out += leaf + " = " + f.get(*this) + "\n";
  }
  return out;
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin + ":" + std::to_string(number) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    try {
      cfg.set(full, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path);
}

void apply_overrides(ExperimentConfig& config, const std::vector<std::string>& overrides) {
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
    config.set(trim(o.substr(0, eq)), o.substr(eq + 1));
  }
}

}  // namespace augcl
