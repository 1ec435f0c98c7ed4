#include "augcl/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "augcl/error.hpp"
#include "augcl/rng.hpp"

namespace augcl {

AugmentationKind parse_augmentation_kind(const std::string& name) {
  if (name == "node_drop") return AugmentationKind::kNodeDrop;
  if (name == "edge_perturb") return AugmentationKind::kEdgePerturb;
  if (name == "attr_mask") return AugmentationKind::kAttrMask;
  if (name == "subgraph") return AugmentationKind::kSubgraph;
  throw ConfigError("unknown augmentation '" + name + "'");
}

std::string to_string(AugmentationKind kind) {
  switch (kind) {
    case AugmentationKind::kNodeDrop: return "node_drop";
    case AugmentationKind::kEdgePerturb: return "edge_perturb";
    case AugmentationKind::kAttrMask: return "attr_mask";
    case AugmentationKind::kSubgraph: return "subgraph";
  }
  return "unknown";
}

std::vector<AugmentationSpec> default_augmentation_pool(double ratio) {
  return {{AugmentationKind::kNodeDrop, ratio},
          {AugmentationKind::kEdgePerturb, ratio},
          {AugmentationKind::kAttrMask, ratio},
          {AugmentationKind::kSubgraph, ratio}};
}

namespace {

// Induced subgraph on `keep` (a sorted list of node ids), re-indexed in order.
Graph induced(const Graph& g, const std::vector<std::size_t>& keep) {
  std::vector<std::size_t> remap(g.node_count, g.node_count);
  for (std::size_t k = 0; k < keep.size(); ++k) remap[keep[k]] = k;
  Graph out;
  out.node_count = keep.size();
  out.label = g.label;
  out.node_features = Tensor({keep.size(), g.feature_dim()});
  for (std::size_t k = 0; k < keep.size(); ++k) {
    auto src = g.node_features.row(keep[k]);
    std::copy(src.begin(), src.end(), out.node_features.row(k).begin());
  }
  for (const Edge& e : g.edges)
    if (remap[e.u] != g.node_count && remap[e.v] != g.node_count) out.edges.push_back(make_edge(remap[e.u], remap[e.v]));
  canonicalize_edges(out.edges);
  return out;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

Graph node_drop(const Graph& g, double ratio, Rng& rng) {
  std::size_t drop = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(g.node_count)));
  drop = std::min(drop, g.node_count - 1);
  std::vector<bool> dropped(g.node_count, false);
  for (std::size_t v : sample_without_replacement(g.node_count, drop, rng)) dropped[v] = true;
  std::vector<std::size_t> keep;
  for (std::size_t v = 0; v < g.node_count; ++v)
    if (!dropped[v]) keep.push_back(v);
  return induced(g, keep);
}

Graph edge_perturb(const Graph& g, double ratio, Rng& rng) {
  const std::size_t n = g.node_count;
  const std::size_t m = g.edges.size();
  const std::size_t pairs = n * (n - 1) / 2;
  const std::size_t absent = pairs - m;
  const std::size_t k = std::min(static_cast<std::size_t>(std::floor(ratio * static_cast<double>(m))), absent);
  if (k == 0) return g;

  Graph out = g;
  std::vector<bool> removed(m, false);
  for (std::size_t e : sample_without_replacement(m, k, rng)) removed[e] = true;
  out.edges.clear();
  for (std::size_t e = 0; e < m; ++e)
    if (!removed[e]) out.edges.push_back(g.edges[e]);

  const std::set<Edge> existing(g.edges.begin(), g.edges.end());
  std::set<Edge> added;
  if (absent <= 4 * k) {
    std::vector<Edge> candidates;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (!existing.contains(make_edge(u, v))) candidates.push_back(make_edge(u, v));
    for (std::size_t c : sample_without_replacement(candidates.size(), k, rng)) added.insert(candidates[c]);
  } else {
    std::uniform_int_distribution<std::size_t> node(0, n - 1);
    while (added.size() < k) {
      const std::size_t u = node(rng), v = node(rng);
      if (u == v) continue;
      const Edge e = make_edge(u, v);
      if (!existing.contains(e)) added.insert(e);
    }
  }
  out.edges.insert(out.edges.end(), added.begin(), added.end());
  canonicalize_edges(out.edges);
  return out;
}

Graph attr_mask(const Graph& g, double ratio, Rng& rng) {
  const std::size_t k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(g.node_count)));
  Graph out = g;
  for (std::size_t v : sample_without_replacement(g.node_count, k, rng))
    for (double& x : out.node_features.row(v)) x = 0.0;
  return out;
}

Graph subgraph(const Graph& g, double ratio, Rng& rng) {
  const std::size_t steps =
      static_cast<std::size_t>(std::ceil((1.0 - ratio) * static_cast<double>(g.node_count)));
  std::vector<std::vector<std::size_t>> adj(g.node_count);
  for (const Edge& e : g.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::uniform_int_distribution<std::size_t> start(0, g.node_count - 1);
  std::size_t cur = start(rng);
  std::vector<bool> seen(g.node_count, false);
  seen[cur] = true;
  for (std::size_t s = 0; s < steps && !adj[cur].empty(); ++s) {
    std::uniform_int_distribution<std::size_t> pick(0, adj[cur].size() - 1);
    cur = adj[cur][pick(rng)];
    seen[cur] = true;
  }
  std::vector<std::size_t> keep;
  for (std::size_t v = 0; v < g.node_count; ++v)
    if (seen[v]) keep.push_back(v);
  return induced(g, keep);
}

}  // namespace

Graph apply_augmentation(const Graph& graph, const AugmentationSpec& spec, std::uint64_t seed) {
  if (graph.node_count == 0) throw ContractError("apply_augmentation: graph has no nodes");
  if (!(spec.ratio >= 0.0 && spec.ratio < 1.0)) throw ContractError("apply_augmentation: ratio must lie in [0, 1)");
  if (spec.ratio == 0.0) return graph;
  Rng rng(seed);
  switch (spec.kind) {
    case AugmentationKind::kNodeDrop: return node_drop(graph, spec.ratio, rng);
    case AugmentationKind::kEdgePerturb: return edge_perturb(graph, spec.ratio, rng);
    case AugmentationKind::kAttrMask: return attr_mask(graph, spec.ratio, rng);
    case AugmentationKind::kSubgraph: return subgraph(graph, spec.ratio, rng);
  }
  return graph;
}

ViewPair sample_two_views(const Graph& graph, std::span<const AugmentationSpec> pool, std::uint64_t seed) {
  if (pool.empty()) throw ContractError("sample_two_views: empty augmentation pool");
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  ViewPair out;
  out.first_spec = pick(rng);
  out.second_spec = pick(rng);
  out.first = apply_augmentation(graph, pool[out.first_spec], derive_seed(seed, {1}));
  out.second = apply_augmentation(graph, pool[out.second_spec], derive_seed(seed, {2}));
  return out;
}

}  // namespace augcl
