#pragma once

#include <cstdint>
#include <vector>

#include "augcl/graph.hpp"

namespace augcl {

// Planted-partition generator. A graph of class c splits its nodes
// round-robin into c + 2 blocks; node pairs inside a block connect with
// probability intra_p, pairs across blocks with probability inter_p.
// Node features are degree one-hot vectors capped at degree_cap.
struct SyntheticSpec {
  std::size_t classes = 2;
  std::size_t graphs_per_class = 10;
  double intra_p = 0.5;
  double inter_p = 0.05;
  std::size_t nodes = 20;
  std::size_t degree_cap = 16;
};

// Graphs are emitted class by class; deterministic per seed.
GraphCollection gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

std::size_t planted_block(std::size_t node, std::size_t label);

// k disjoint index sets covering 0..labels.size()-1. Each class is shuffled
// and dealt round-robin, continuing the dealing position across classes, so
// per-class counts and fold sizes differ by at most one.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, std::size_t k,
                                                       std::uint64_t seed);

}  // namespace augcl
