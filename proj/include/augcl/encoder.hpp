#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "augcl/autodiff.hpp"
#include "augcl/graph.hpp"

namespace augcl {

enum class ReadoutMode { kSum, kMean };

ReadoutMode parse_readout_mode(const std::string& name);
std::string to_string(ReadoutMode mode);

struct EncoderConfig {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 32;
  std::size_t layers = 3;
  std::size_t projection_dim = 32;
  ReadoutMode readout = ReadoutMode::kSum;
  // Concatenate the readout of every GIN layer instead of using the last one.
  bool concat_layers = false;

  // Width of the pre-projection graph embedding.
  std::size_t embedding_dim() const noexcept { return concat_layers ? layers * hidden_dim : hidden_dim; }
  void validate() const;
};

// GIN stack followed by a two-layer projection head. Tensors are named
//   gin.<l>.eps  gin.<l>.w1  gin.<l>.b1  gin.<l>.w2  gin.<l>.b2
//   proj.w1  proj.b1  proj.w2  proj.b2
struct EncoderParams {
  EncoderConfig config;
  NamedTensors tensors;

  const Tensor& at(const std::string& name) const;
  void validate() const;
};

// Glorot-uniform weights, zero biases, eps = 0.
EncoderParams init_encoder(const EncoderConfig& config, std::uint64_t seed);

// Projected embeddings of the two views of one minibatch; row i of both
// matrices comes from source graph i.
struct EmbeddingBatch {
  Tensor z_tilde;
  Tensor z_hat;

  std::size_t size() const noexcept { return z_tilde.rows(); }
  std::size_t dim() const noexcept { return z_tilde.cols(); }
  void validate() const;
};

// ---- graph builders (differentiable) ----

// Per layer: h <- relu(MLP((1 + eps) * h + sum of neighbour h)), MLP =
// Linear-ReLU-Linear. Returns the node embeddings of every layer.
std::vector<NodeId> build_gin(ComputationGraph& graph, const GraphBatch& batch, const EncoderParams& params);
NodeId build_readout(ComputationGraph& graph, NodeId node_embeddings, const std::vector<std::size_t>& pooling_index,
                     std::size_t batch_size, ReadoutMode mode);
// Pre-projection graph embeddings (last layer, or all layers concatenated).
NodeId build_graph_embedding(ComputationGraph& graph, const GraphBatch& batch, const EncoderParams& params);
NodeId build_projection(ComputationGraph& graph, NodeId graph_embeddings, const EncoderParams& params);

struct ViewNodes {
  NodeId z_tilde;
  NodeId z_hat;
};

// Both views share one set of parameter nodes.
ViewNodes build_encode_views(ComputationGraph& graph, const GraphBatch& view1, const GraphBatch& view2,
                             const EncoderParams& params);

// ---- eager evaluation ----

Tensor gin_forward(const GraphBatch& batch, const EncoderParams& params);
Tensor readout(const Tensor& node_embeddings, const std::vector<std::size_t>& pooling_index, std::size_t batch_size,
               ReadoutMode mode);
Tensor graph_embeddings(const GraphBatch& batch, const EncoderParams& params);
Tensor project(const Tensor& graph_embeddings, const EncoderParams& params);
EmbeddingBatch encode_views(const GraphBatch& view1, const GraphBatch& view2, const EncoderParams& params);

}  // namespace augcl
