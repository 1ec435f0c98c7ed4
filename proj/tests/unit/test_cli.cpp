#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "augcl/cli.hpp"
#include "augcl/config.hpp"
#include "../support/temp_dir.hpp"

using namespace augcl;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "augcl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Drops the "timings" block, the only non-deterministic part of a report.
std::string without_timings(const std::string& json) {
  const auto at = json.find("\"timings\"");
  return at == std::string::npos ? json : json.substr(0, at);
}

std::vector<std::string> small_run(const fs::path& root, const std::string& name, const fs::path& out) {
  return {"--set",     "dataset.name=" + name,  "--set", "dataset.root=" + root.string(),
          "--set",     "encoder.hidden_dim=8",  "--set", "encoder.projection_dim=8",
          "--set",     "encoder.layers=2",      "--set", "train.epochs=3",
          "--set",     "train.switch_epoch=1",  "--set", "gambler.hidden_dim=16",
          "--set",     "gambler.epochs=2",      "--set", "probe.folds=3",
          "--set",     "train.batch_size=6",    "--out", out.string()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("exit codes") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"--help"}).out.find("pretrain") != std::string::npos);
    const Result none = run({});
    CHECK(none.code == 1);
    CHECK(!none.err.empty());
    const Result unknown = run({"frobnicate"});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("frobnicate") != std::string::npos);
    CHECK(run({"pretrain", "--no-such-flag"}).code == 1);
    CHECK(run({"eval"}).code == 1);  // --checkpoint is required

    testing::TempDir tmp("cli_codes");
    const Result bad_key = run({"pretrain", "--set", "train.nope=1", "--out", tmp.path.string()});
    CHECK(bad_key.code == 2);
    CHECK(bad_key.err.find("train.nope") != std::string::npos);
    const Result missing = run({"pretrain", "--set", "dataset.root=/nonexistent-augcl", "--out", tmp.path.string()});
    CHECK(missing.code == 2);
    CHECK(run({"pretrain", "--config", (tmp.path / "absent.cfg").string()}).code == 2);
  }

  TEST_CASE("gen-synth, pretrain twice, eval") {
    testing::TempDir tmp("cli_runs");
    const Result gen = run({"gen-synth", "--name", "TOY", "--out", tmp.path.string(), "--set",
                            "dataset.synthetic_graphs_per_class=9", "--seed", "5"});
    REQUIRE(gen.code == 0);
    CHECK(fs::exists(tmp.path / "TOY" / "TOY_A.txt"));
    CHECK(fs::exists(tmp.path / "TOY" / "TOY_graph_labels.txt"));

    auto a = small_run(tmp.path, "TOY", tmp.path / "a");
    auto b = small_run(tmp.path, "TOY", tmp.path / "b");
    a.insert(a.begin(), {"pretrain", "--seed", "7"});
    b.insert(b.begin(), {"pretrain", "--seed", "7"});
    const Result ra = run(a), rb = run(b);
    INFO(ra.err);
    REQUIRE(ra.code == 0);
    REQUIRE(rb.code == 0);
    for (const char* f : {"report.json", "loss.csv", "config.cfg", "encoder.ckpt"}) CHECK(fs::exists(tmp.path / "a" / f));
    CHECK(without_timings(slurp(tmp.path / "a" / "report.json")) ==
          without_timings(slurp(tmp.path / "b" / "report.json")));
    CHECK(slurp(tmp.path / "a" / "loss.csv") == slurp(tmp.path / "b" / "loss.csv"));
    CHECK(slurp(tmp.path / "a" / "encoder.ckpt") == slurp(tmp.path / "b" / "encoder.ckpt"));

    // overrides and the seed are echoed, and the echo reproduces the run
    const std::string echoed = slurp(tmp.path / "a" / "config.cfg");
    CHECK(echoed.find("seed = 7") != std::string::npos);
    CHECK(echoed.find("switch_epoch = 1") != std::string::npos);
    const Result rc = run({"pretrain", "--config", (tmp.path / "a" / "config.cfg").string(), "--out",
                           (tmp.path / "c").string()});
    REQUIRE(rc.code == 0);
    CHECK(without_timings(slurp(tmp.path / "c" / "report.json")) ==
          without_timings(slurp(tmp.path / "a" / "report.json")));

    const Result ev = run({"eval", "--config", (tmp.path / "a" / "config.cfg").string(), "--checkpoint",
                           (tmp.path / "a" / "encoder.ckpt").string(), "--out", (tmp.path / "e").string()});
    INFO(ev.err);
    CHECK(ev.code == 0);
    CHECK(slurp(tmp.path / "e" / "eval.json").find("\"fold_accuracies\"") != std::string::npos);

    const Result wrong = run({"eval", "--config", (tmp.path / "a" / "config.cfg").string(), "--checkpoint",
                              (tmp.path / "a" / "loss.csv").string(), "--out", (tmp.path / "e").string()});
    CHECK(wrong.code == 2);
  }

  TEST_CASE("inspect a 4-graph toy") {
    testing::TempDir tmp("cli_inspect");
    REQUIRE(run({"gen-synth", "--name", "TINY", "--out", tmp.path.string(), "--set",
                 "dataset.synthetic_graphs_per_class=2"})
                .code == 0);
    auto args = small_run(tmp.path, "TINY", tmp.path / "run");
    args.insert(args.begin(), "pretrain");
    args.insert(args.end(), {"--set", "train.batch_size=4", "--set", "probe.folds=2"});
    const Result pre = run(args);
    INFO(pre.err);
    REQUIRE(pre.code == 0);

    const Result ins = run({"inspect", "--config", (tmp.path / "run" / "config.cfg").string(), "--checkpoint",
                            (tmp.path / "run" / "encoder.ckpt").string(), "--out", (tmp.path / "ins").string()});
    INFO(ins.err);
    REQUIRE(ins.code == 0);
    const std::string csv = slurp(tmp.path / "ins" / "uw_batch0.csv");
    CHECK(csv.rfind("anchor,candidate,u,w\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 12);
    CHECK(!fs::exists(tmp.path / "ins" / "uw_batch1.csv"));
    const std::string summary = slurp(tmp.path / "ins" / "summary.json");
    CHECK(summary.find("\"partition_calls\": 4") != std::string::npos);
    CHECK(summary.find("\"estimator_trainings\": 1") != std::string::npos);
  }

  TEST_CASE("sweep writes one report per value") {
    testing::TempDir tmp("cli_sweep");
    REQUIRE(run({"gen-synth", "--name", "SW", "--out", tmp.path.string(), "--set",
                 "dataset.synthetic_graphs_per_class=8"})
                .code == 0);
    auto args = small_run(tmp.path, "SW", tmp.path / "sweep");
    args.insert(args.begin(), {"sweep", "--param", "reward", "--values", "1.5,1.6,1.7,1.8,1.9", "--parallel", "2"});
    const Result r = run(args);
    INFO(r.err);
    REQUIRE(r.code == 0);
    std::size_t reports = 0;
    for (const auto& entry : fs::directory_iterator(tmp.path / "sweep")) reports += fs::exists(entry.path() / "report.json");
    CHECK(reports == 5);
    CHECK(slurp(tmp.path / "sweep" / "reward=1.7" / "config.cfg").find("reward = 1.7") != std::string::npos);

    // parallel and sequential sweeps agree
    auto seq = small_run(tmp.path, "SW", tmp.path / "seq");
    seq.insert(seq.begin(), {"sweep", "--param", "reward", "--values", "1.5,1.6,1.7,1.8,1.9"});
    REQUIRE(run(seq).code == 0);
    for (const char* v : {"1.5", "1.9"}) {
      const std::string label = std::string("reward=") + v;
      CHECK(without_timings(slurp(tmp.path / "sweep" / label / "report.json")) ==
            without_timings(slurp(tmp.path / "seq" / label / "report.json")));
    }

    auto bad = small_run(tmp.path, "SW", tmp.path / "bad");
    bad.insert(bad.begin(), {"sweep", "--param", "reward", "--values", "0.2"});
    CHECK(run(bad).code == 2);
  }
}
