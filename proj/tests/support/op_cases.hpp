#pragma once

#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "augcl/autodiff.hpp"
#include "augcl/rng.hpp"
#include "gradcheck.hpp"

namespace augcl::testing {

inline Tensor random_tensor(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Tensor t({r, c});
  for (double& v : t.data()) v = d(rng);
  return t;
}

// Builds sum(op(x) * c) for a random constant c so every output entry matters.
using UnaryBuilder = std::function<NodeId(ComputationGraph&, NodeId)>;

inline double unary_fd_error(const UnaryBuilder& op, std::size_t r, std::size_t c, std::uint64_t seed,
                             double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  NamedTensors params{{"x", random_tensor(r, c, rng, lo, hi)}};
  ComputationGraph g;
  const NodeId x = g.parameter("x", params["x"]);
  const NodeId y = op(g, x);
  g.forward_eval();
  const Tensor& out = g.value(y);
  const NodeId loss = g.sum_rows(g.mul(y, g.constant(random_tensor(out.rows(), out.cols(), rng))));
  const NodeId total = g.mean(loss);
  return check_gradients(g, total, params).max_rel_error;
}

// One entry per differentiable op; each applies the op to a 3 x 4 input.
inline std::vector<std::pair<std::string, UnaryBuilder>> op_cases() {
  return {
      {"matmul", [](ComputationGraph& g, NodeId x) { return g.matmul(x, g.transpose(x)); }},
      {"transpose", [](ComputationGraph& g, NodeId x) { return g.transpose(x); }},
      {"add", [](ComputationGraph& g, NodeId x) { return g.add(x, g.mul(x, x)); }},
      {"add_row", [](ComputationGraph& g, NodeId x) {
         return g.add(x, g.parameter("b", Tensor::row_vector({0.3, -0.2, 0.1, 0.5})));
       }},
      {"sub", [](ComputationGraph& g, NodeId x) { return g.sub(g.mul(x, x), x); }},
      {"mul_scalar", [](ComputationGraph& g, NodeId x) { return g.mul(x, g.parameter("s", Tensor::scalar(0.7))); }},
      {"scale", [](ComputationGraph& g, NodeId x) { return g.scale(x, -2.5); }},
      {"relu", [](ComputationGraph& g, NodeId x) { return g.relu(x); }},
      {"exp", [](ComputationGraph& g, NodeId x) { return g.exp(x); }},
      {"log", [](ComputationGraph& g, NodeId x) { return g.log(g.exp(x)); }},
      {"softmax", [](ComputationGraph& g, NodeId x) { return g.softmax(x); }},
      {"l2_normalize", [](ComputationGraph& g, NodeId x) { return g.l2_normalize(x); }},
      {"segment_sum", [](ComputationGraph& g, NodeId x) { return g.segment_sum(x, {1, 0, 1}, 2); }},
      {"gather_rows", [](ComputationGraph& g, NodeId x) { return g.gather_rows(x, {2, 0, 2, 1}); }},
      {"mean", [](ComputationGraph& g, NodeId x) { return g.mean(g.mul(x, x)); }},
      {"sum_rows", [](ComputationGraph& g, NodeId x) { return g.sum_rows(g.mul(x, x)); }},
      {"concat", [](ComputationGraph& g, NodeId x) { return g.concat({x, g.exp(x), x}); }},
      {"diagonal", [](ComputationGraph& g, NodeId x) { return g.diagonal(g.matmul(x, g.transpose(x))); }},
      {"log_sum_exp", [](ComputationGraph& g, NodeId x) { return g.log_sum_exp_rows(g.scale(x, 5.0)); }},
      {"log_sum_exp_weighted", [](ComputationGraph& g, NodeId x) {
         return g.log_sum_exp_rows(x, Tensor::matrix(3, 4, {1, 0.5, 2, 0, 0.1, 1, 1, 3, 0, 0, 1, 0.2}));
       }},
  };
}

}  // namespace augcl::testing
