#include "augcl/synthetic.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "augcl/error.hpp"
#include "augcl/rng.hpp"

namespace augcl {

std::size_t planted_block(std::size_t node, std::size_t label) { return node % (label + 2); }

GraphCollection gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.classes == 0 || spec.graphs_per_class == 0 || spec.nodes == 0)
    throw ContractError("gen_synthetic: counts must be positive");
  for (double p : {spec.intra_p, spec.inter_p})
    if (!(p >= 0.0 && p <= 1.0)) throw ContractError("gen_synthetic: probabilities must lie in [0, 1]");

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GraphCollection out;
  out.class_count = spec.classes;
  out.feature_dim = spec.degree_cap + 1;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t k = 0; k < spec.graphs_per_class; ++k) {
      Graph g;
      g.node_count = spec.nodes;
      g.label = static_cast<int>(c);
      for (std::size_t u = 0; u < spec.nodes; ++u)
        for (std::size_t v = u + 1; v < spec.nodes; ++v) {
          const double p = planted_block(u, c) == planted_block(v, c) ? spec.intra_p : spec.inter_p;
          // Always draw so the stream does not depend on p being 0 or 1.
          if (unit(rng) < p) g.edges.push_back(make_edge(u, v));
        }
      g.node_features = degree_one_hot(g.node_count, g.edges, spec.degree_cap);
      out.graphs.push_back(std::move(g));
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2) throw ContractError("stratified_folds: k must be at least 2");
  if (k > labels.size())
    throw ContractError("stratified_folds: k=" + std::to_string(k) + " exceeds dataset size " +
                        std::to_string(labels.size()));
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  for (auto& [label, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i : members) {
      folds[next].push_back(i);
      next = (next + 1) % k;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace augcl
