#pragma once

#include <cstdint>
#include <string>

#include "augcl/tensor.hpp"

namespace augcl {

enum class OptimizerKind { kSgd, kAdam };

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(OptimizerKind kind);

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Adam moment buffers, keyed like the parameters they track.
  NamedTensors first_moment;
  NamedTensors second_moment;
  std::uint64_t step_count = 0;
};

OptimizerState make_optimizer(OptimizerKind kind, double learning_rate);

// One update of every parameter that has a gradient entry.
// sgd:  p <- p - lr * g
// adam: bias-corrected moments with beta1=0.9, beta2=0.999, eps=1e-8
// Throws on a non-finite gradient (naming the parameter) or shape mismatch.
void optimizer_step(OptimizerState& state, NamedTensors& params, const NamedTensors& grads);

}  // namespace augcl
