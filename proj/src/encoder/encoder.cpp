#include "augcl/encoder.hpp"

#include <cmath>
#include <random>

#include "augcl/error.hpp"
#include "augcl/rng.hpp"

namespace augcl {

ReadoutMode parse_readout_mode(const std::string& name) {
  if (name == "sum") return ReadoutMode::kSum;
  if (name == "mean") return ReadoutMode::kMean;
  throw ConfigError("unknown readout '" + name + "' (expected sum or mean)");
}

std::string to_string(ReadoutMode mode) { return mode == ReadoutMode::kSum ? "sum" : "mean"; }

void EncoderConfig::validate() const {
  if (input_dim == 0 || hidden_dim == 0 || layers == 0 || projection_dim == 0)
    throw ConfigError("encoder widths and layer count must be positive");
}

namespace {

std::string layer_name(std::size_t l, const char* what) { return "gin." + std::to_string(l) + "." + what; }

Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t({fan_in, fan_out});
  for (double& v : t.data()) v = dist(rng);
  return t;
}

NodeId param(ComputationGraph& g, const EncoderParams& p, const std::string& name) {
  return g.parameter(name, p.at(name));
}

NodeId linear(ComputationGraph& g, const EncoderParams& p, NodeId x, const std::string& w, const std::string& b) {
  return g.add(g.matmul(x, param(g, p, w)), param(g, p, b));
}

}  // namespace

const Tensor& EncoderParams::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw ContractError("encoder parameter '" + name + "' missing");
  return it->second;
}

void EncoderParams::validate() const {
  config.validate();
  auto expect = [&](const std::string& name, std::size_t rows, std::size_t cols) {
    const Tensor& t = at(name);
    if (t.rows() != rows || t.cols() != cols)
      throw ShapeError("encoder parameter '" + name + "' has shape " + shape_string(t.shape()) + ", expected [" +
                       std::to_string(rows) + "," + std::to_string(cols) + "]");
  };
  const std::size_t h = config.hidden_dim;
  for (std::size_t l = 0; l < config.layers; ++l) {
    expect(layer_name(l, "eps"), 1, 1);
    expect(layer_name(l, "w1"), l == 0 ? config.input_dim : h, h);
    expect(layer_name(l, "b1"), 1, h);
    expect(layer_name(l, "w2"), h, h);
    expect(layer_name(l, "b2"), 1, h);
  }
  expect("proj.w1", config.embedding_dim(), config.projection_dim);
  expect("proj.b1", 1, config.projection_dim);
  expect("proj.w2", config.projection_dim, config.projection_dim);
  expect("proj.b2", 1, config.projection_dim);
}

EncoderParams init_encoder(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  EncoderParams p;
  p.config = config;
  const std::size_t h = config.hidden_dim;
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::size_t in = l == 0 ? config.input_dim : h;
    p.tensors[layer_name(l, "eps")] = Tensor({1, 1});
    p.tensors[layer_name(l, "w1")] = glorot(in, h, rng);
    p.tensors[layer_name(l, "b1")] = Tensor({1, h});
    p.tensors[layer_name(l, "w2")] = glorot(h, h, rng);
    p.tensors[layer_name(l, "b2")] = Tensor({1, h});
  }
  const std::size_t e = config.embedding_dim(), d = config.projection_dim;
  p.tensors["proj.w1"] = glorot(e, d, rng);
  p.tensors["proj.b1"] = Tensor({1, d});
  p.tensors["proj.w2"] = glorot(d, d, rng);
  p.tensors["proj.b2"] = Tensor({1, d});
  return p;
}

void EmbeddingBatch::validate() const {
  if (z_tilde.shape() != z_hat.shape())
    throw ShapeError("embedding views differ in shape: " + shape_string(z_tilde.shape()) + " vs " +
                     shape_string(z_hat.shape()));
  if (!z_tilde.all_finite() || !z_hat.all_finite()) throw DomainError("non-finite embedding");
}

std::vector<NodeId> build_gin(ComputationGraph& g, const GraphBatch& batch, const EncoderParams& params) {
  const EncoderConfig& cfg = params.config;
  if (batch.features.cols() != cfg.input_dim)
    throw ShapeError("batch feature width " + std::to_string(batch.features.cols()) + " but encoder expects " +
                     std::to_string(cfg.input_dim));
  const std::size_t n = batch.node_count();
  const auto sources = batch.message_sources();
  const auto targets = batch.message_targets();

  std::vector<NodeId> layers;
  NodeId h = g.constant(batch.features);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const NodeId eps = param(g, params, layer_name(l, "eps"));
    const NodeId neighbours = g.segment_sum(g.gather_rows(h, sources), targets, n);
    const NodeId combined = g.add(g.add(h, g.mul(h, eps)), neighbours);
    const NodeId hidden = g.relu(linear(g, params, combined, layer_name(l, "w1"), layer_name(l, "b1")));
    h = g.relu(linear(g, params, hidden, layer_name(l, "w2"), layer_name(l, "b2")));
    layers.push_back(h);
  }
  return layers;
}

NodeId build_readout(ComputationGraph& g, NodeId node_embeddings, const std::vector<std::size_t>& pooling_index,
                     std::size_t batch_size, ReadoutMode mode) {
  const NodeId pooled = g.segment_sum(node_embeddings, pooling_index, batch_size);
  if (mode == ReadoutMode::kSum) return pooled;
  std::vector<double> counts(batch_size, 0.0);
  for (std::size_t gid : pooling_index) counts.at(gid) += 1.0;
  Tensor inv({batch_size, 1});
  for (std::size_t i = 0; i < batch_size; ++i) inv[i] = counts[i] > 0.0 ? 1.0 / counts[i] : 0.0;
  // Row scaling through a matmul with a diagonal matrix keeps the op set small.
  Tensor diag({batch_size, batch_size});
  for (std::size_t i = 0; i < batch_size; ++i) diag(i, i) = inv[i];
  return g.matmul(g.constant(std::move(diag)), pooled);
}

NodeId build_graph_embedding(ComputationGraph& g, const GraphBatch& batch, const EncoderParams& params) {
  const auto layers = build_gin(g, batch, params);
  const ReadoutMode mode = params.config.readout;
  if (!params.config.concat_layers) return build_readout(g, layers.back(), batch.pooling_index, batch.batch_size, mode);
  std::vector<NodeId> parts;
  for (NodeId h : layers) parts.push_back(build_readout(g, h, batch.pooling_index, batch.batch_size, mode));
  return g.concat(std::move(parts));
}

NodeId build_projection(ComputationGraph& g, NodeId graph_embeddings, const EncoderParams& params) {
  const NodeId hidden = g.relu(linear(g, params, graph_embeddings, "proj.w1", "proj.b1"));
  return linear(g, params, hidden, "proj.w2", "proj.b2");
}

ViewNodes build_encode_views(ComputationGraph& g, const GraphBatch& view1, const GraphBatch& view2,
                             const EncoderParams& params) {
  if (view1.batch_size != view2.batch_size)
    throw ContractError("encode_views: batch sizes differ (" + std::to_string(view1.batch_size) + " vs " +
                        std::to_string(view2.batch_size) + ")");
  ViewNodes v;
  v.z_tilde = build_projection(g, build_graph_embedding(g, view1, params), params);
  v.z_hat = build_projection(g, build_graph_embedding(g, view2, params), params);
  return v;
}

Tensor gin_forward(const GraphBatch& batch, const EncoderParams& params) {
  ComputationGraph g;
  const NodeId out = build_gin(g, batch, params).back();
  g.forward_eval();
  return g.value(out);
}

Tensor readout(const Tensor& node_embeddings, const std::vector<std::size_t>& pooling_index, std::size_t batch_size,
               ReadoutMode mode) {
  if (pooling_index.size() != node_embeddings.rows()) throw ShapeError("readout: pooling index length mismatch");
  ComputationGraph g;
  const NodeId out = build_readout(g, g.constant(node_embeddings), pooling_index, batch_size, mode);
  g.forward_eval();
  return g.value(out);
}

Tensor graph_embeddings(const GraphBatch& batch, const EncoderParams& params) {
  ComputationGraph g;
  const NodeId out = build_graph_embedding(g, batch, params);
  g.forward_eval();
  return g.value(out);
}

Tensor project(const Tensor& embeddings, const EncoderParams& params) {
  if (embeddings.cols() != params.config.embedding_dim())
    throw ShapeError("project: input width " + std::to_string(embeddings.cols()) + " but head expects " +
                     std::to_string(params.config.embedding_dim()));
  ComputationGraph g;
  const NodeId out = build_projection(g, g.constant(embeddings), params);
  g.forward_eval();
  return g.value(out);
}

EmbeddingBatch encode_views(const GraphBatch& view1, const GraphBatch& view2, const EncoderParams& params) {
  ComputationGraph g;
  const ViewNodes v = build_encode_views(g, view1, view2, params);
  g.forward_eval();
  EmbeddingBatch out{g.value(v.z_tilde), g.value(v.z_hat)};
  out.validate();
  return out;
}

}  // namespace augcl
