#include "augcl/graph.hpp"

#include <algorithm>

#include "augcl/error.hpp"

namespace augcl {

Edge make_edge(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return Edge{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
}

void canonicalize_edges(std::vector<Edge>& edges) {
  for (Edge& e : edges)
    if (e.u > e.v) std::swap(e.u, e.v);
  std::erase_if(edges, [](const Edge& e) { return e.u == e.v; });
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(node_count, 0);
  for (const Edge& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

void Graph::validate() const {
  if (node_features.rows() != node_count && !(node_count == 0 && node_features.empty()))
    throw ContractError("graph has " + std::to_string(node_count) + " nodes but " +
                        std::to_string(node_features.rows()) + " feature rows");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    if (e.u == e.v) throw ContractError("self-loop on node " + std::to_string(e.u));
    if (e.u > e.v) throw ContractError("edge not stored as (min, max)");
    if (e.v >= node_count) throw ContractError("edge endpoint " + std::to_string(e.v) + " out of range");
    if (k > 0 && !(edges[k - 1] < e)) throw ContractError("edges unsorted or duplicated");
  }
}

std::vector<int> GraphCollection::labels() const {
  std::vector<int> out;
  out.reserve(graphs.size());
  for (const Graph& g : graphs) out.push_back(g.label.value_or(-1));
  return out;
}

void GraphCollection::validate() const {
  for (const Graph& g : graphs) {
    g.validate();
    if (g.node_count > 0 && g.feature_dim() != feature_dim)
      throw ContractError("graph feature width " + std::to_string(g.feature_dim()) + " differs from collection width " +
                          std::to_string(feature_dim));
    if (g.label && (*g.label < 0 || static_cast<std::size_t>(*g.label) >= class_count))
      throw ContractError("graph label " + std::to_string(*g.label) + " outside [0, " + std::to_string(class_count) + ")");
  }
}

std::vector<std::size_t> GraphBatch::message_sources() const {
  std::vector<std::size_t> out;
  out.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    out.push_back(e.u);
    out.push_back(e.v);
  }
  return out;
}

std::vector<std::size_t> GraphBatch::message_targets() const {
  std::vector<std::size_t> out;
  out.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    out.push_back(e.v);
    out.push_back(e.u);
  }
  return out;
}

GraphBatch batch_graphs(std::span<const Graph> graphs) {
  if (graphs.empty()) throw ContractError("batch_graphs: empty selection");
  const std::size_t width = graphs.front().feature_dim();
  std::size_t total = 0;
  for (const Graph& g : graphs) {
    if (g.feature_dim() != width) throw ShapeError("batch_graphs: graphs disagree on feature width");
    total += g.node_count;
  }

  GraphBatch b;
  b.batch_size = graphs.size();
  b.features = Tensor({total, width});
  b.pooling_index.reserve(total);
  b.node_offsets.reserve(graphs.size() + 1);
  std::size_t offset = 0;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const Graph& g = graphs[gi];
    b.node_offsets.push_back(offset);
    auto src = g.node_features.data();
    std::copy(src.begin(), src.end(), b.features.data().begin() + static_cast<std::ptrdiff_t>(offset * width));
    for (const Edge& e : g.edges) b.edges.push_back(make_edge(e.u + offset, e.v + offset));
    b.pooling_index.insert(b.pooling_index.end(), g.node_count, gi);
    offset += g.node_count;
  }
  b.node_offsets.push_back(offset);
  return b;
}

GraphBatch batch_graphs(const GraphCollection& collection, std::span<const std::size_t> indices) {
  std::vector<Graph> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= collection.size())
      throw ContractError("batch_graphs: index " + std::to_string(i) + " out of range (" +
                          std::to_string(collection.size()) + " graphs)");
    picked.push_back(collection.graphs[i]);
  }
  return batch_graphs(picked);
}

std::vector<Tensor> unbatch_features(const GraphBatch& batch) {
  std::vector<std::vector<double>> parts(batch.batch_size);
  const std::size_t width = batch.features.cols();
  for (std::size_t r = 0; r < batch.node_count(); ++r) {
    auto row = batch.features.row(r);
    parts.at(batch.pooling_index[r]).insert(parts[batch.pooling_index[r]].end(), row.begin(), row.end());
  }
  std::vector<Tensor> out;
  for (auto& p : parts) {
    const std::size_t rows = p.size() / (width == 0 ? 1 : width);
    out.emplace_back(Shape{rows, width}, std::move(p));
  }
  return out;
}

Tensor degree_one_hot(std::size_t node_count, const std::vector<Edge>& edges, std::size_t cap) {
  std::vector<std::size_t> deg(node_count, 0);
  for (const Edge& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  Tensor f({node_count, cap + 1});
  for (std::size_t v = 0; v < node_count; ++v) f(v, std::min(deg[v], cap)) = 1.0;
  return f;
}

}  // namespace augcl
