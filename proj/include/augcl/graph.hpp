#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "augcl/tensor.hpp"

namespace augcl {

// Undirected edge stored once with u < v.
struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

Edge make_edge(std::size_t a, std::size_t b);

// Sorts and removes duplicates; self-loops are dropped.
void canonicalize_edges(std::vector<Edge>& edges);

struct Graph {
  std::size_t node_count = 0;
  std::vector<Edge> edges;
  Tensor node_features;  // node_count x F
  std::optional<int> label;

  std::size_t feature_dim() const noexcept { return node_features.cols(); }
  std::vector<std::size_t> degrees() const;
  // Throws ContractError if an invariant is broken (self-loop, duplicate or
  // unsorted edge, endpoint out of range, feature row count).
  void validate() const;

  friend bool operator==(const Graph&, const Graph&) = default;
};

struct GraphCollection {
  std::vector<Graph> graphs;
  std::size_t feature_dim = 0;
  std::size_t class_count = 0;

  std::size_t size() const noexcept { return graphs.size(); }
  std::vector<int> labels() const;
  void validate() const;

  friend bool operator==(const GraphCollection&, const GraphCollection&) = default;
};

// Disjoint union of several graphs. Edges are shifted by the cumulative node
// offset of their graph; pooling_index maps every merged node to its graph.
struct GraphBatch {
  Tensor features;
  std::vector<Edge> edges;
  std::vector<std::size_t> pooling_index;
  std::vector<std::size_t> node_offsets;  // batch_size + 1 entries
  std::size_t batch_size = 0;

  std::size_t node_count() const noexcept { return pooling_index.size(); }
  // Both directions of every edge, as (source, target) node lists.
  std::vector<std::size_t> message_sources() const;
  std::vector<std::size_t> message_targets() const;

  friend bool operator==(const GraphBatch&, const GraphBatch&) = default;
};

GraphBatch batch_graphs(std::span<const Graph> graphs);
GraphBatch batch_graphs(const GraphCollection& collection, std::span<const std::size_t> indices);

// Splits merged node features back into per-graph blocks using pooling_index.
std::vector<Tensor> unbatch_features(const GraphBatch& batch);

// One-hot encoding of node degree, capped at `cap` (cap + 1 columns).
Tensor degree_one_hot(std::size_t node_count, const std::vector<Edge>& edges, std::size_t cap);

}  // namespace augcl
