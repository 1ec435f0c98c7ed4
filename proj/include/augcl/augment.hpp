#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "augcl/graph.hpp"

namespace augcl {

enum class AugmentationKind { kNodeDrop, kEdgePerturb, kAttrMask, kSubgraph };

AugmentationKind parse_augmentation_kind(const std::string& name);
std::string to_string(AugmentationKind kind);

struct AugmentationSpec {
  AugmentationKind kind = AugmentationKind::kNodeDrop;
  double ratio = 0.2;  // in [0, 1)
};

// {node_drop, edge_perturb, attr_mask, subgraph}, all at `ratio`.
std::vector<AugmentationSpec> default_augmentation_pool(double ratio = 0.2);

// Deterministic per (graph, spec, seed). ratio == 0 returns the graph as is.
//  node_drop    removes floor(ratio*n) uniformly chosen nodes (never all of them)
//  edge_perturb removes floor(ratio*m) edges and adds as many absent pairs
//  attr_mask    zeroes the feature rows of floor(ratio*n) nodes
//  subgraph     keeps the nodes visited by a ceil((1-ratio)*n)-step random walk
Graph apply_augmentation(const Graph& graph, const AugmentationSpec& spec, std::uint64_t seed);

struct ViewPair {
  Graph first;
  Graph second;
  std::size_t first_spec = 0;   // index into the pool
  std::size_t second_spec = 0;
};

// Two independent draws (with replacement) from the pool, applied with
// decorrelated sub-seeds.
ViewPair sample_two_views(const Graph& graph, std::span<const AugmentationSpec> pool, std::uint64_t seed);

}  // namespace augcl
