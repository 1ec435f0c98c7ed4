#include "augcl/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "augcl/error.hpp"

namespace augcl {

std::string_view op_name(OpKind op) {
  switch (op) {
    case OpKind::kInput: return "input";
    case OpKind::kConstant: return "constant";
    case OpKind::kParameter: return "parameter";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kRelu: return "relu";
    case OpKind::kLog: return "log";
    case OpKind::kExp: return "exp";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kL2Normalize: return "l2_normalize";
    case OpKind::kSegmentSum: return "segment_sum";
    case OpKind::kGatherRows: return "gather_rows";
    case OpKind::kMean: return "mean";
    case OpKind::kSumRows: return "sum_rows";
    case OpKind::kConcat: return "concat";
    case OpKind::kDiagonal: return "diagonal";
    case OpKind::kLogSumExpRows: return "log_sum_exp_rows";
  }
  return "unknown";
}

namespace {

bool same_matrix_shape(const Tensor& a, const Tensor& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

void accumulate(Tensor& dst, const Tensor& src) {
  if (dst.empty() && src.size() != 0) {
    dst = src;
    return;
  }
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

Tensor zeros_like(const Tensor& t) { return Tensor(t.shape()); }

}  // namespace

NodeId ComputationGraph::push(Node node) {
  for (NodeId in : node.inputs) {
    check_id(in);
    node.requires_grad = node.requires_grad || nodes_[in].requires_grad;
  }
  nodes_.push_back(std::move(node));
  evaluated_ = false;
  return nodes_.size() - 1;
}

void ComputationGraph::check_id(NodeId id) const {
  if (id >= nodes_.size()) throw ContractError("unknown node id " + std::to_string(id));
}

void ComputationGraph::fail_shape(NodeId id, const std::string& detail) const {
  throw ShapeError("node " + std::to_string(id) + " (" + std::string(op_name(nodes_[id].op)) + "): " + detail);
}

NodeId ComputationGraph::input(std::string name) {
  for (const auto& n : nodes_)
    if (n.op == OpKind::kInput && n.name == name) throw ContractError("duplicate input name '" + name + "'");
  Node n{OpKind::kInput, {}, {}, std::move(name)};
  return push(std::move(n));
}

NodeId ComputationGraph::constant(Tensor value) {
  Node n{OpKind::kConstant, {}, std::move(value), {}};
  return push(std::move(n));
}

NodeId ComputationGraph::parameter(const std::string& name, Tensor value) {
  if (auto it = parameter_ids_.find(name); it != parameter_ids_.end()) return it->second;
  Node n{OpKind::kParameter, {}, std::move(value), name};
  n.requires_grad = true;
  const NodeId id = push(std::move(n));
  parameter_ids_.emplace(name, id);
  return id;
}

NodeId ComputationGraph::matmul(NodeId a, NodeId b) { return push({OpKind::kMatMul, {a, b}}); }
NodeId ComputationGraph::transpose(NodeId a) { return push({OpKind::kTranspose, {a}}); }
NodeId ComputationGraph::add(NodeId a, NodeId b) { return push({OpKind::kAdd, {a, b}}); }
NodeId ComputationGraph::sub(NodeId a, NodeId b) { return push({OpKind::kSub, {a, b}}); }
NodeId ComputationGraph::mul(NodeId a, NodeId b) { return push({OpKind::kMul, {a, b}}); }

NodeId ComputationGraph::scale(NodeId a, double factor) {
  Node n{OpKind::kScale, {a}};
  n.factor = factor;
  return push(std::move(n));
}

NodeId ComputationGraph::relu(NodeId a) { return push({OpKind::kRelu, {a}}); }
NodeId ComputationGraph::log(NodeId a) { return push({OpKind::kLog, {a}}); }
NodeId ComputationGraph::exp(NodeId a) { return push({OpKind::kExp, {a}}); }
NodeId ComputationGraph::softmax(NodeId a) { return push({OpKind::kSoftmax, {a}}); }
NodeId ComputationGraph::l2_normalize(NodeId a) { return push({OpKind::kL2Normalize, {a}}); }

NodeId ComputationGraph::segment_sum(NodeId a, std::vector<std::size_t> index, std::size_t segments) {
  Node n{OpKind::kSegmentSum, {a}};
  n.index = std::move(index);
  n.count = segments;
  return push(std::move(n));
}

NodeId ComputationGraph::gather_rows(NodeId a, std::vector<std::size_t> index) {
  Node n{OpKind::kGatherRows, {a}};
  n.index = std::move(index);
  return push(std::move(n));
}

NodeId ComputationGraph::mean(NodeId a) { return push({OpKind::kMean, {a}}); }
NodeId ComputationGraph::sum_rows(NodeId a) { return push({OpKind::kSumRows, {a}}); }

NodeId ComputationGraph::concat(std::vector<NodeId> parts) {
  if (parts.empty()) throw ContractError("concat of zero tensors");
  return push({OpKind::kConcat, std::move(parts)});
}

NodeId ComputationGraph::diagonal(NodeId a) { return push({OpKind::kDiagonal, {a}}); }

NodeId ComputationGraph::log_sum_exp_rows(NodeId a, Tensor weights) {
  for (double w : weights.data())
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("log_sum_exp_rows weight must be finite and >= 0");
  Node n{OpKind::kLogSumExpRows, {a}};
  n.aux = std::move(weights);
  return push(std::move(n));
}

NodeId ComputationGraph::log_sum_exp_rows(NodeId a) { return log_sum_exp_rows(a, Tensor{}); }

void ComputationGraph::mark_output(std::string name, NodeId id) {
  check_id(id);
  outputs_.emplace_back(std::move(name), id);
}

const Tensor& ComputationGraph::value(NodeId id) const {
  check_id(id);
  if (!evaluated_) throw ContractError("value() before forward_eval()");
  return nodes_[id].value;
}

std::vector<std::string> ComputationGraph::parameter_names() const {
  std::vector<std::string> names;
  for (const auto& n : nodes_)
    if (n.op == OpKind::kParameter) names.push_back(n.name);
  return names;
}

NamedTensors ComputationGraph::forward_eval(const NamedTensors& inputs) {
  for (NodeId id = 0; id < nodes_.size(); ++id) evaluate(id, inputs);
  evaluated_ = true;
  NamedTensors out;
  for (const auto& [name, id] : outputs_) out[name] = nodes_[id].value;
  return out;
}

void ComputationGraph::evaluate(NodeId id, const NamedTensors& inputs) {
  Node& n = nodes_[id];
  auto in = [&](std::size_t k) -> const Tensor& { return nodes_[n.inputs[k]].value; };

  switch (n.op) {
    case OpKind::kInput: {
      auto it = inputs.find(n.name);
      if (it == inputs.end()) throw ContractError("missing input '" + n.name + "'");
      n.value = it->second;
      return;
    }
    case OpKind::kConstant:
      return;
    case OpKind::kParameter: {
      auto it = inputs.find(n.name);
      if (it != inputs.end()) {
        if (it->second.shape() != n.value.shape())
          fail_shape(id, "override for '" + n.name + "' has shape " + shape_string(it->second.shape()));
        n.value = it->second;
      }
      return;
    }
    case OpKind::kMatMul: {
      const Tensor &a = in(0), &b = in(1);
      if (a.cols() != b.rows()) fail_shape(id, shape_string(a.shape()) + " x " + shape_string(b.shape()));
      n.value = augcl::matmul(a, b);
      return;
    }
    case OpKind::kTranspose:
      n.value = augcl::transpose(in(0));
      return;
    case OpKind::kAdd:
    case OpKind::kSub: {
      const Tensor &a = in(0), &b = in(1);
      const double sign = n.op == OpKind::kAdd ? 1.0 : -1.0;
      Tensor out = Tensor({a.rows(), a.cols()}, std::vector<double>(a.data().begin(), a.data().end()));
      if (same_matrix_shape(a, b)) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += sign * b[i];
      } else if (n.op == OpKind::kAdd && b.rows() == 1 && b.cols() == a.cols()) {
        for (std::size_t r = 0; r < a.rows(); ++r)
          for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) += b[c];
      } else if (n.op == OpKind::kAdd && b.size() == 1) {
        for (double& v : out.data()) v += b[0];
      } else {
        fail_shape(id, shape_string(a.shape()) + " vs " + shape_string(b.shape()));
      }
      n.value = std::move(out);
      return;
    }
    case OpKind::kMul: {
      const Tensor &a = in(0), &b = in(1);
      Tensor out = Tensor({a.rows(), a.cols()}, std::vector<double>(a.data().begin(), a.data().end()));
      if (same_matrix_shape(a, b)) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
      } else if (b.size() == 1) {
        for (double& v : out.data()) v *= b[0];
      } else {
        fail_shape(id, shape_string(a.shape()) + " vs " + shape_string(b.shape()));
      }
      n.value = std::move(out);
      return;
    }
    case OpKind::kScale: {
      Tensor out = in(0);
      for (double& v : out.data()) v *= n.factor;
      n.value = std::move(out);
      return;
    }
    case OpKind::kRelu: {
      Tensor out = in(0);
      for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
      n.value = std::move(out);
      return;
    }
    case OpKind::kLog: {
      Tensor out = in(0);
      for (double& v : out.data()) {
        if (!(v > 0.0)) throw DomainError("node " + std::to_string(id) + " (log): non-positive argument " + std::to_string(v));
        v = std::log(v);
      }
      n.value = std::move(out);
      return;
    }
    case OpKind::kExp: {
      Tensor out = in(0);
      for (double& v : out.data()) v = std::exp(v);
      n.value = std::move(out);
      return;
    }
    case OpKind::kSoftmax: {
      const Tensor& a = in(0);
      Tensor out({a.rows(), a.cols()});
      for (std::size_t r = 0; r < a.rows(); ++r) {
        auto x = a.row(r);
        auto y = out.row(r);
        const double m = *std::max_element(x.begin(), x.end());
        double s = 0.0;
        for (std::size_t c = 0; c < x.size(); ++c) s += (y[c] = std::exp(x[c] - m));
        for (double& v : y) v /= s;
      }
      n.value = std::move(out);
      return;
    }
    case OpKind::kL2Normalize: {
      const Tensor& a = in(0);
      Tensor out({a.rows(), a.cols()}, std::vector<double>(a.data().begin(), a.data().end()));
      normalize_rows(out);
      n.value = std::move(out);
      return;
    }
    case OpKind::kSegmentSum: {
      const Tensor& a = in(0);
      if (n.index.size() != a.rows())
        fail_shape(id, "index length " + std::to_string(n.index.size()) + " vs " + std::to_string(a.rows()) + " rows");
      Tensor out({n.count, a.cols()});
      for (std::size_t r = 0; r < a.rows(); ++r) {
        if (n.index[r] >= n.count) fail_shape(id, "segment id out of range");
        auto src = a.row(r);
        auto dst = out.row(n.index[r]);
        for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
      }
      n.value = std::move(out);
      return;
    }
    case OpKind::kGatherRows: {
      const Tensor& a = in(0);
      Tensor out({n.index.size(), a.cols()});
      for (std::size_t k = 0; k < n.index.size(); ++k) {
        if (n.index[k] >= a.rows()) fail_shape(id, "gather index out of range");
        auto src = a.row(n.index[k]);
        std::copy(src.begin(), src.end(), out.row(k).begin());
      }
      n.value = std::move(out);
      return;
    }
    case OpKind::kMean: {
      const Tensor& a = in(0);
      if (a.size() == 0) fail_shape(id, "mean of empty tensor");
      double s = 0.0;
      for (double v : a.data()) s += v;
      n.value = Tensor::scalar(s / static_cast<double>(a.size()));
      return;
    }
    case OpKind::kSumRows: {
      const Tensor& a = in(0);
      Tensor out({a.rows(), 1});
      for (std::size_t r = 0; r < a.rows(); ++r)
        for (double v : a.row(r)) out[r] += v;
      n.value = std::move(out);
      return;
    }
    case OpKind::kConcat: {
      const std::size_t rows = in(0).rows();
      std::size_t cols = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        if (in(k).rows() != rows) fail_shape(id, "row counts differ");
        cols += in(k).cols();
      }
      Tensor out({rows, cols});
      std::size_t offset = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        const Tensor& p = in(k);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < p.cols(); ++c) out(r, offset + c) = p(r, c);
        offset += p.cols();
      }
      n.value = std::move(out);
      return;
    }
    case OpKind::kDiagonal: {
      const Tensor& a = in(0);
      if (a.rows() != a.cols()) fail_shape(id, "diagonal of non-square " + shape_string(a.shape()));
      Tensor out({a.rows(), 1});
      for (std::size_t i = 0; i < a.rows(); ++i) out[i] = a(i, i);
      n.value = std::move(out);
      return;
    }
    case OpKind::kLogSumExpRows: {
      const Tensor& a = in(0);
      const bool weighted = !n.aux.empty();
      if (weighted && !same_matrix_shape(a, n.aux))
        fail_shape(id, "weights " + shape_string(n.aux.shape()) + " vs " + shape_string(a.shape()));
      Tensor out({a.rows(), 1});
      for (std::size_t r = 0; r < a.rows(); ++r) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < a.cols(); ++c)
          if (!weighted || n.aux(r, c) > 0.0) m = std::max(m, a(r, c));
        if (!std::isfinite(m)) throw DomainError("node " + std::to_string(id) + " (log_sum_exp_rows): row without positive weight");
        double s = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c) s += (weighted ? n.aux(r, c) : 1.0) * std::exp(a(r, c) - m);
        out[r] = m + std::log(s);
      }
      n.value = std::move(out);
      return;
    }
  }
}

NamedTensors ComputationGraph::backward_grad(NodeId loss) const {
  check_id(loss);
  if (!evaluated_) throw ContractError("backward_grad() before forward_eval()");
  if (nodes_[loss].value.size() != 1)
    throw ContractError("backward_grad() needs a scalar loss, node " + std::to_string(loss) + " has shape " +
                        shape_string(nodes_[loss].value.shape()));

  std::vector<Tensor> grads(nodes_.size());
  grads[loss] = Tensor(nodes_[loss].value.shape(), 1.0);

  for (NodeId id = loss + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (grads[id].empty() || !n.requires_grad) continue;
    const Tensor& g = grads[id];
    auto needs = [&](std::size_t k) { return nodes_[n.inputs[k]].requires_grad; };
    auto in = [&](std::size_t k) -> const Tensor& { return nodes_[n.inputs[k]].value; };
    auto give = [&](std::size_t k, const Tensor& t) { accumulate(grads[n.inputs[k]], t); };

    switch (n.op) {
      case OpKind::kInput:
      case OpKind::kConstant:
      case OpKind::kParameter:
        break;
      case OpKind::kMatMul: {
        if (needs(0)) give(0, augcl::matmul(g, augcl::transpose(in(1))));
        if (needs(1)) give(1, augcl::matmul(augcl::transpose(in(0)), g));
        break;
      }
      case OpKind::kTranspose:
        give(0, augcl::transpose(g));
        break;
      case OpKind::kAdd:
      case OpKind::kSub: {
        const Tensor &a = in(0), &b = in(1);
        if (needs(0)) give(0, Tensor(a.shape(), std::vector<double>(g.data().begin(), g.data().end())));
        if (needs(1)) {
          Tensor gb = zeros_like(b);
          const double sign = n.op == OpKind::kAdd ? 1.0 : -1.0;
          if (same_matrix_shape(a, b)) {
            for (std::size_t i = 0; i < gb.size(); ++i) gb[i] = sign * g[i];
          } else if (b.rows() == 1 && b.cols() == a.cols() && b.size() != 1) {
            for (std::size_t r = 0; r < a.rows(); ++r)
              for (std::size_t c = 0; c < a.cols(); ++c) gb[c] += g(r, c);
          } else {
            for (double v : g.data()) gb[0] += v;
          }
          give(1, gb);
        }
        break;
      }
      case OpKind::kMul: {
        const Tensor &a = in(0), &b = in(1);
        const bool scalar_b = !same_matrix_shape(a, b);
        if (needs(0)) {
          Tensor ga = zeros_like(a);
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] = g[i] * (scalar_b ? b[0] : b[i]);
          give(0, ga);
        }
        if (needs(1)) {
          Tensor gb = zeros_like(b);
          if (scalar_b) {
            for (std::size_t i = 0; i < a.size(); ++i) gb[0] += g[i] * a[i];
          } else {
            for (std::size_t i = 0; i < gb.size(); ++i) gb[i] = g[i] * a[i];
          }
          give(1, gb);
        }
        break;
      }
      case OpKind::kScale: {
        Tensor ga = zeros_like(in(0));
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] = g[i] * n.factor;
        give(0, ga);
        break;
      }
      case OpKind::kRelu: {
        const Tensor& x = in(0);
        Tensor ga = zeros_like(x);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] = x[i] > 0.0 ? g[i] : 0.0;
        give(0, ga);
        break;
      }
      case OpKind::kLog: {
        const Tensor& x = in(0);
        Tensor ga = zeros_like(x);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] = g[i] / x[i];
        give(0, ga);
        break;
      }
      case OpKind::kExp: {
        Tensor ga = zeros_like(n.value);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] = g[i] * n.value[i];
        give(0, Tensor(in(0).shape(), std::vector<double>(ga.data().begin(), ga.data().end())));
        break;
      }
      case OpKind::kSoftmax: {
        const Tensor& y = n.value;
        Tensor ga(in(0).shape());
        for (std::size_t r = 0; r < y.rows(); ++r) {
          double s = 0.0;
          for (std::size_t c = 0; c < y.cols(); ++c) s += g(r, c) * y(r, c);
          for (std::size_t c = 0; c < y.cols(); ++c) ga[r * y.cols() + c] = y(r, c) * (g(r, c) - s);
        }
        give(0, ga);
        break;
      }
      case OpKind::kL2Normalize: {
        const Tensor& x = in(0);
        const Tensor& y = n.value;
        Tensor ga(x.shape());
        const std::size_t cols = x.cols();
        for (std::size_t r = 0; r < x.rows(); ++r) {
          const double norm = l2_norm(x.row(r));
          if (norm == 0.0) continue;
          double yg = 0.0;
          for (std::size_t c = 0; c < cols; ++c) yg += y(r, c) * g(r, c);
          for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] = (g(r, c) - y(r, c) * yg) / norm;
        }
        give(0, ga);
        break;
      }
      case OpKind::kSegmentSum: {
        const Tensor& x = in(0);
        Tensor ga(x.shape());
        const std::size_t cols = x.cols();
        for (std::size_t r = 0; r < x.rows(); ++r)
          for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] = g(n.index[r], c);
        give(0, ga);
        break;
      }
      case OpKind::kGatherRows: {
        const Tensor& x = in(0);
        Tensor ga(x.shape());
        const std::size_t cols = x.cols();
        for (std::size_t k = 0; k < n.index.size(); ++k)
          for (std::size_t c = 0; c < cols; ++c) ga[n.index[k] * cols + c] += g(k, c);
        give(0, ga);
        break;
      }
      case OpKind::kMean: {
        const Tensor& x = in(0);
        give(0, Tensor(x.shape(), g[0] / static_cast<double>(x.size())));
        break;
      }
      case OpKind::kSumRows: {
        const Tensor& x = in(0);
        Tensor ga(x.shape());
        const std::size_t cols = x.cols();
        for (std::size_t r = 0; r < x.rows(); ++r)
          for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] = g[r];
        give(0, ga);
        break;
      }
      case OpKind::kConcat: {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          const Tensor& p = in(k);
          if (needs(k)) {
            Tensor gp(p.shape());
            for (std::size_t r = 0; r < p.rows(); ++r)
              for (std::size_t c = 0; c < p.cols(); ++c) gp[r * p.cols() + c] = g(r, offset + c);
            give(k, gp);
          }
          offset += p.cols();
        }
        break;
      }
      case OpKind::kDiagonal: {
        const Tensor& x = in(0);
        Tensor ga(x.shape());
        for (std::size_t i = 0; i < x.rows(); ++i) ga[i * x.cols() + i] = g[i];
        give(0, ga);
        break;
      }
      case OpKind::kLogSumExpRows: {
        const Tensor& x = in(0);
        const bool weighted = !n.aux.empty();
        Tensor ga(x.shape());
        const std::size_t cols = x.cols();
        for (std::size_t r = 0; r < x.rows(); ++r)
          for (std::size_t c = 0; c < cols; ++c) {
            const double w = weighted ? n.aux(r, c) : 1.0;
            ga[r * cols + c] = g[r] * w * std::exp(x(r, c) - n.value[r]);
          }
        give(0, ga);
        break;
      }
    }
  }

  NamedTensors out;
  for (const auto& [name, id] : parameter_ids_) {
    out[name] = grads[id].empty() ? zeros_like(nodes_[id].value) : grads[id];
  }
  return out;
}

}  // namespace augcl
