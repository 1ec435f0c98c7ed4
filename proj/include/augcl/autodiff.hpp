#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "augcl/tensor.hpp"

namespace augcl {

using NodeId = std::size_t;

enum class OpKind {
  kInput,
  kConstant,
  kParameter,
  kMatMul,
  kTranspose,
  kAdd,
  kSub,
  kMul,
  kScale,
  kRelu,
  kLog,
  kExp,
  kSoftmax,
  kL2Normalize,
  kSegmentSum,
  kGatherRows,
  kMean,
  kSumRows,
  kConcat,
  kDiagonal,
  kLogSumExpRows,
};

std::string_view op_name(OpKind op);

// Define-then-run record of a dense-tensor expression.
//
// Nodes are appended in topological order (every input id is smaller than the
// node id). forward_eval() fills every node's value; backward_grad() runs
// reverse-mode differentiation from a scalar node and returns the gradient of
// every parameter, keyed by parameter name.
//
// Not thread-safe: one writer per instance.
class ComputationGraph {
 public:
  // Placeholder whose value is supplied by name at forward time.
  NodeId input(std::string name);
  NodeId constant(Tensor value);
  // Trainable leaf. Registering an existing name returns the existing node, so
  // a parameter used in several places accumulates a single gradient.
  NodeId parameter(const std::string& name, Tensor value);

  NodeId matmul(NodeId a, NodeId b);
  NodeId transpose(NodeId a);
  // b may have the shape of a, be a 1 x cols row (broadcast over rows), or 1 x 1.
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  // Elementwise product; b may be 1 x 1 (scalar broadcast).
  NodeId mul(NodeId a, NodeId b);
  NodeId scale(NodeId a, double factor);
  NodeId relu(NodeId a);
  NodeId log(NodeId a);
  NodeId exp(NodeId a);
  NodeId softmax(NodeId a);
  NodeId l2_normalize(NodeId a);
  // out[index[r]] += a[r]; out has `segments` rows.
  NodeId segment_sum(NodeId a, std::vector<std::size_t> index, std::size_t segments);
  // out[k] = a[index[k]].
  NodeId gather_rows(NodeId a, std::vector<std::size_t> index);
  NodeId mean(NodeId a);
  // Sum over the last axis: n x m -> n x 1.
  NodeId sum_rows(NodeId a);
  NodeId concat(std::vector<NodeId> parts);
  NodeId diagonal(NodeId a);
  // out[i] = log(sum_j w[i,j] * exp(a[i,j])), evaluated with max subtraction.
  // Weights are constants (no gradient) and must be non-negative with at
  // least one positive entry per row.
  NodeId log_sum_exp_rows(NodeId a, Tensor weights);
  NodeId log_sum_exp_rows(NodeId a);

  void mark_output(std::string name, NodeId id);

  // Evaluates every node. `inputs` must provide each input placeholder and may
  // also override parameter values by name.
  NamedTensors forward_eval(const NamedTensors& inputs = {});

  // Gradients of a scalar node with respect to every parameter.
  NamedTensors backward_grad(NodeId loss) const;

  const Tensor& value(NodeId id) const;
  std::size_t size() const noexcept { return nodes_.size(); }
  OpKind op(NodeId id) const { return nodes_.at(id).op; }
  const std::vector<NodeId>& inputs(NodeId id) const { return nodes_.at(id).inputs; }
  std::vector<std::string> parameter_names() const;
  bool evaluated() const noexcept { return evaluated_; }

 private:
  struct Node {
    OpKind op;
    std::vector<NodeId> inputs;
    Tensor value;
    std::string name;
    double factor = 1.0;
    std::vector<std::size_t> index;
    std::size_t count = 0;
    Tensor aux;
    bool requires_grad = false;
  };

  NodeId push(Node node);
  void check_id(NodeId id) const;
  void evaluate(NodeId id, const NamedTensors& inputs);
  [[noreturn]] void fail_shape(NodeId id, const std::string& detail) const;

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> parameter_ids_;
  std::vector<std::pair<std::string, NodeId>> outputs_;
  bool evaluated_ = false;
};

}  // namespace augcl
