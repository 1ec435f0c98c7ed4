#include "augcl/optimizer.hpp"

#include <cmath>

#include "augcl/error.hpp"

namespace augcl {

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + name + "' (expected sgd or adam)");
}

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::kSgd ? "sgd" : "adam"; }

OptimizerState make_optimizer(OptimizerKind kind, double learning_rate) {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  OptimizerState s;
  s.kind = kind;
  s.learning_rate = learning_rate;
  return s;
}

void optimizer_step(OptimizerState& state, NamedTensors& params, const NamedTensors& grads) {
  for (const auto& [name, g] : grads) {
    auto it = params.find(name);
    if (it == params.end()) throw ContractError("gradient for unknown parameter '" + name + "'");
    if (it->second.shape() != g.shape())
      throw ShapeError("parameter '" + name + "' has shape " + shape_string(it->second.shape()) + ", gradient " +
                       shape_string(g.shape()));
    if (!g.all_finite()) throw DomainError("non-finite gradient for parameter '" + name + "'");
  }

  ++state.step_count;
  const double lr = state.learning_rate;
  if (state.kind == OptimizerKind::kSgd) {
    for (const auto& [name, g] : grads) {
      Tensor& p = params.at(name);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
    }
    return;
  }

  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (const auto& [name, g] : grads) {
    Tensor& p = params.at(name);
    auto [m_it, m_new] = state.first_moment.try_emplace(name, Tensor(p.shape()));
    auto [v_it, v_new] = state.second_moment.try_emplace(name, Tensor(p.shape()));
    Tensor& m = m_it->second;
    Tensor& v = v_it->second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

}  // namespace augcl
