#include <cstdio>

#include "json.hpp"

#include "augcl/pipeline.hpp"

namespace augcl {

std::string RunReport::to_json(bool include_timings) const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["mode"] = mode;
  j["graph_count"] = graph_count;
  j["loss_curve"] = loss_curve;
  j["mining"] = {
      {"ran", mining.ran},
      {"alpha", mining.alpha},
      {"uncertainty_mean", mining.uncertainty.mean},
      {"uncertainty_std", mining.uncertainty.std},
      {"uncertainty_min", mining.uncertainty.min},
      {"uncertainty_max", mining.uncertainty.max},
      {"uncertainty_count", mining.uncertainty.count},
      {"weight_mean", mining.weight_mean},
      {"batches", mining.batches},
      {"degenerate_batches", mining.degenerate_batches},
      {"partition_calls", mining.partition_calls},
      {"estimator_trainings", mining.estimator_trainings},
  };
  j["probe"] = {{"fold_accuracies", probe.fold_accuracies}, {"mean", probe.mean}, {"std", probe.std}};
  j["config"] = config_text;
  if (include_timings) j["timings"] = timings;
  return j.dump(2) + "\n";
}

std::string RunReport::loss_csv() const {
  std::string out = "epoch,loss\n";
  char buf[64];
  for (std::size_t e = 0; e < loss_curve.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e + 1, loss_curve[e]);
    out += buf;
  }
  return out;
}

}  // namespace augcl
