#include "augcl/cli.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "augcl/binary_io.hpp"
#include "augcl/checkpoint.hpp"
#include "augcl/error.hpp"
#include "augcl/pipeline.hpp"
#include "augcl/rng.hpp"
#include "augcl/synthetic.hpp"
#include "augcl/tu_dataset.hpp"

namespace augcl {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = "out";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Experiment config file");
  cmd->add_option("--set", c.overrides, "Override a config key (key=value), repeatable")->allow_extra_args(false);
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--out", c.out_dir, "Output directory");
}

ExperimentConfig resolve_config(const Common& c, CLI::App* cmd) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(c.config_path);
  apply_overrides(cfg, c.overrides);
  if (cmd->count("--seed") > 0) cfg.seed = c.seed;
  return cfg;
}

void write_report(const fs::path& dir, const RunReport& report) {
  fs::create_directories(dir);
  write_file((dir / "report.json").string(), report.to_json());
  write_file((dir / "loss.csv").string(), report.loss_csv());
  write_file((dir / "config.cfg").string(), report.config_text);
}

std::string format9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string uw_csv(const UncertaintyMatrix& u, const WeightMatrix& w, const std::vector<std::size_t>& batch) {
  std::string out = "anchor,candidate,u,w\n";
  const std::size_t n = w.values.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c + 1 < n; ++c) {
      const std::size_t j = candidate_of(i, c);
      const double uv = u.values.empty() ? 1.0 : u.values(i, c);
      out += std::to_string(batch[i]) + "," + std::to_string(batch[j]) + "," + format9(uv) + "," +
             format9(w.values(i, c)) + "\n";
    }
  return out;
}

EncoderParams load_encoder(const std::string& path, const GraphCollection& data) {
  EncoderParams enc = encoder_from_checkpoint(load_checkpoint(path));
  if (enc.config.input_dim != data.feature_dim)
    throw ContractError("checkpoint expects feature width " + std::to_string(enc.config.input_dim) +
                        " but the dataset has " + std::to_string(data.feature_dim));
  return enc;
}

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Affinity-uncertainty hard negative mining for graph contrastive learning"};
  app.name("augcl");
  app.require_subcommand(1);

  Common pre, ev, ins, sw;
  CLI::App* c_pretrain = app.add_subcommand("pretrain", "Pretrain an encoder, probe it and write the report");
  add_common(c_pretrain, pre);

  std::string eval_ckpt;
  CLI::App* c_eval = app.add_subcommand("eval", "Linear-probe a saved encoder");
  add_common(c_eval, ev);
  c_eval->add_option("--checkpoint", eval_ckpt, "Encoder checkpoint")->required();

  std::string inspect_ckpt;
  CLI::App* c_inspect = app.add_subcommand("inspect", "Run the mining phase on a saved encoder and dump U and W");
  add_common(c_inspect, ins);
  c_inspect->add_option("--checkpoint", inspect_ckpt, "Encoder checkpoint")->required();

  std::string sweep_param, sweep_values;
  std::size_t parallel = 1;
  CLI::App* c_sweep = app.add_subcommand("sweep", "Run one experiment per grid value");
  add_common(c_sweep, sw);
  c_sweep->add_option("--param", sweep_param, "reward, estimator, alpha_coefficient or a dotted key")->required();
  c_sweep->add_option("--values", sweep_values, "Comma-separated values")->required();
  c_sweep->add_option("--parallel", parallel, "Concurrent runs")->check(CLI::PositiveNumber);

  Common gen;
  std::string gen_name = "SYNTH";
  CLI::App* c_gen = app.add_subcommand("gen-synth", "Write a planted-partition collection in TU format");
  add_common(c_gen, gen);
  c_gen->add_option("--name", gen_name, "Dataset name");

  if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
    err << "error: unknown command '" << argv[1] << "'\n" << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (c_pretrain->parsed()) {
      const ExperimentConfig cfg = resolve_config(pre, c_pretrain);
      cfg.validate();
      const ExperimentOutput r = run_experiment(cfg);
      write_report(pre.out_dir, r.report);
      save_checkpoint((fs::path(pre.out_dir) / "encoder.ckpt").string(), encoder_checkpoint(r.encoder));
      out << "accuracy " << r.report.probe.mean << " +- " << r.report.probe.std << "\n";
      return 0;
    }
    if (c_eval->parsed()) {
      const ExperimentConfig cfg = resolve_config(ev, c_eval);
      cfg.validate();
      const GraphCollection data = load_dataset(cfg.dataset);
      const EncoderParams enc = load_encoder(eval_ckpt, data);
      const ProbeResult p = linear_probe_eval(embed_all(enc, data), data.labels(), cfg.probe, cfg.seed);
      nlohmann::ordered_json j;
      j["seed"] = cfg.seed;
      j["checkpoint"] = eval_ckpt;
      j["fold_accuracies"] = p.fold_accuracies;
      j["mean"] = p.mean;
      j["std"] = p.std;
      fs::create_directories(ev.out_dir);
      write_file((fs::path(ev.out_dir) / "eval.json").string(), j.dump(2) + "\n");
      out << "accuracy " << p.mean << " +- " << p.std << "\n";
      return 0;
    }
    if (c_inspect->parsed()) {
      ExperimentConfig cfg = resolve_config(ins, c_inspect);
      cfg.validate();
      const GraphCollection data = load_dataset(cfg.dataset);
      const EncoderParams enc = load_encoder(inspect_ckpt, data);
      const auto batches = make_batches(data.size(), cfg.resolved_batch_size(data.size()),
                                        derive_seed(cfg.seed, SeedStream::kFrozenBatches));
      const WeightCache cache = mine_phase(enc, data, batches, cfg);
      fs::create_directories(ins.out_dir);
      for (std::size_t b = 0; b < cache.batches.size(); ++b) {
        const UncertaintyMatrix u = cache.degenerate[b] ? UncertaintyMatrix{} : cache.uncertainties[b];
        write_file((fs::path(ins.out_dir) / ("uw_batch" + std::to_string(b) + ".csv")).string(),
                   uw_csv(u, cache.weights[b], cache.batches[b]));
      }
      const MiningSummary& s = cache.summary;
      nlohmann::ordered_json j = {{"alpha", s.alpha},
                                  {"uncertainty_mean", s.uncertainty.mean},
                                  {"uncertainty_std", s.uncertainty.std},
                                  {"uncertainty_min", s.uncertainty.min},
                                  {"uncertainty_max", s.uncertainty.max},
                                  {"weight_mean", s.weight_mean},
                                  {"batches", s.batches},
                                  {"degenerate_batches", s.degenerate_batches},
                                  {"partition_calls", s.partition_calls},
                                  {"estimator_trainings", s.estimator_trainings}};
      write_file((fs::path(ins.out_dir) / "summary.json").string(), j.dump(2) + "\n");
      out << "alpha " << s.alpha << ", mean u " << s.uncertainty.mean << ", " << s.batches << " batches\n";
      return 0;
    }
    if (c_sweep->parsed()) {
      const ExperimentConfig base = resolve_config(sw, c_sweep);
      const auto points = expand_sweep(base, sweep_param, split_values(sweep_values));
      const GraphCollection data = load_dataset(base.dataset);
      std::atomic<std::size_t> next{0};
      std::mutex mu;
      std::string failure;
      auto worker = [&] {
        for (std::size_t k = next++; k < points.size(); k = next++) {
          try {
            const ExperimentOutput r = run_experiment(points[k].config, data);
            write_report(fs::path(sw.out_dir) / points[k].label, r.report);
            std::lock_guard lock(mu);
            out << points[k].label << ": accuracy " << r.report.probe.mean << " +- " << r.report.probe.std << "\n";
          } catch (const std::exception& e) {
            std::lock_guard lock(mu);
            if (failure.empty()) failure = points[k].label + ": " + e.what();
          }
        }
      };
      std::vector<std::thread> pool;
      for (std::size_t t = 1; t < std::min(parallel, points.size()); ++t) pool.emplace_back(worker);
      worker();
      for (auto& t : pool) t.join();
      if (!failure.empty()) throw Error(failure);
      return 0;
    }
    if (c_gen->parsed()) {
      const ExperimentConfig cfg = resolve_config(gen, c_gen);
      const std::uint64_t seed = c_gen->count("--seed") > 0 ? gen.seed : cfg.dataset.synthetic_seed;
      const GraphCollection data = gen_synthetic(cfg.dataset.synthetic, seed);
      const fs::path dir = fs::path(gen.out_dir) / gen_name;
      fs::create_directories(dir);
      write_tu_dataset(data, dir, gen_name);
      out << "wrote " << data.size() << " graphs to " << dir.string() << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace augcl
