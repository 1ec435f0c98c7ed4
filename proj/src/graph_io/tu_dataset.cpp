#include "augcl/tu_dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "augcl/binary_io.hpp"
#include "augcl/error.hpp"

namespace augcl {

namespace fs = std::filesystem;

namespace {

struct Line {
  std::size_t number;
  std::string text;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Non-blank lines with their 1-based line numbers.
std::vector<Line> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open mandatory file");
  std::vector<Line> out;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    std::string_view t = trim(text);
    if (t.empty()) continue;
    out.push_back({number, std::string(t)});
  }
  return out;
}

long long parse_int(std::string_view token, const fs::path& file, std::size_t line) {
  token = trim(token);
  long long v = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (token.empty() || ec != std::errc() || ptr != end)
    throw ParseError(file.string(), line, "non-integer token '" + std::string(token) + "'");
  return v;
}

std::vector<long long> parse_column(const fs::path& file) {
  std::vector<long long> values;
  for (const Line& l : read_lines(file)) values.push_back(parse_int(l.text, file, l.number));
  return values;
}

std::int64_t mtime_of(const fs::path& p) {
  return static_cast<std::int64_t>(fs::last_write_time(p).time_since_epoch().count());
}

fs::path cache_path(const fs::path& dir, const std::string& name) { return dir / (name + ".augg"); }

GraphCollection parse_sources(const fs::path& dir, const std::string& name, const TuOptions& options) {
  const fs::path a_file = dir / (name + "_A.txt");
  const fs::path indicator_file = dir / (name + "_graph_indicator.txt");
  const fs::path glabel_file = dir / (name + "_graph_labels.txt");
  const fs::path nlabel_file = dir / (name + "_node_labels.txt");

  for (const fs::path& p : {a_file, indicator_file, glabel_file})
    if (!fs::exists(p)) throw ParseError(p.string(), 0, "missing mandatory file");

  const std::vector<long long> raw_graph_labels = parse_column(glabel_file);
  if (raw_graph_labels.empty()) throw ParseError(glabel_file.string(), 0, "no graph labels");
  const std::size_t graph_count = raw_graph_labels.size();

  std::vector<std::size_t> node_graph;  // 0-based graph id per node
  std::vector<std::size_t> graph_nodes(graph_count, 0);
  for (const Line& l : read_lines(indicator_file)) {
    const long long g = parse_int(l.text, indicator_file, l.number);
    if (g < 1 || static_cast<std::size_t>(g) > graph_count)
      throw ParseError(indicator_file.string(), l.number,
                       "graph id " + std::to_string(g) + " outside [1, " + std::to_string(graph_count) + "]");
    if (!node_graph.empty() && static_cast<std::size_t>(g - 1) < node_graph.back())
      throw ParseError(indicator_file.string(), l.number, "graph ids must be non-decreasing");
    node_graph.push_back(static_cast<std::size_t>(g - 1));
    ++graph_nodes[static_cast<std::size_t>(g - 1)];
  }
  const std::size_t total_nodes = node_graph.size();
  std::vector<std::size_t> first_node(graph_count, 0);
  for (std::size_t g = 1; g < graph_count; ++g) first_node[g] = first_node[g - 1] + graph_nodes[g - 1];

  std::vector<std::vector<Edge>> edges(graph_count);
  for (const Line& l : read_lines(a_file)) {
    const auto comma = l.text.find(',');
    if (comma == std::string::npos) throw ParseError(a_file.string(), l.number, "expected 'u, v'");
    const long long u = parse_int(std::string_view(l.text).substr(0, comma), a_file, l.number);
    const long long v = parse_int(std::string_view(l.text).substr(comma + 1), a_file, l.number);
    for (long long x : {u, v})
      if (x < 1 || static_cast<std::size_t>(x) > total_nodes)
        throw ParseError(a_file.string(), l.number, "node id " + std::to_string(x) + " out of range");
    const std::size_t gu = node_graph[static_cast<std::size_t>(u - 1)];
    const std::size_t gv = node_graph[static_cast<std::size_t>(v - 1)];
    if (gu != gv) throw ParseError(a_file.string(), l.number, "edge endpoint crossing graph boundaries");
    edges[gu].push_back(make_edge(static_cast<std::size_t>(u - 1) - first_node[gu],
                                  static_cast<std::size_t>(v - 1) - first_node[gu]));
  }

  std::vector<long long> node_labels;
  std::map<long long, std::size_t> node_label_index;
  const bool has_node_labels = fs::exists(nlabel_file);
  if (has_node_labels) {
    node_labels = parse_column(nlabel_file);
    if (node_labels.size() != total_nodes)
      throw ParseError(nlabel_file.string(), node_labels.size(),
                       "expected " + std::to_string(total_nodes) + " node labels");
    for (long long x : node_labels) node_label_index.emplace(x, 0);
    std::size_t k = 0;
    for (auto& [value, idx] : node_label_index) idx = k++;
  }

  std::map<long long, int> graph_label_index;
  for (long long x : raw_graph_labels) graph_label_index.emplace(x, 0);
  {
    int k = 0;
    for (auto& [value, idx] : graph_label_index) idx = k++;
  }

  GraphCollection out;
  out.class_count = graph_label_index.size();
  out.feature_dim = has_node_labels ? node_label_index.size() : options.degree_cap + 1;
  out.graphs.resize(graph_count);
  for (std::size_t g = 0; g < graph_count; ++g) {
    Graph& graph = out.graphs[g];
    graph.node_count = graph_nodes[g];
    graph.edges = std::move(edges[g]);
    canonicalize_edges(graph.edges);
    graph.label = graph_label_index.at(raw_graph_labels[g]);
    if (has_node_labels) {
      graph.node_features = Tensor({graph.node_count, out.feature_dim});
      for (std::size_t v = 0; v < graph.node_count; ++v)
        graph.node_features(v, node_label_index.at(node_labels[first_node[g] + v])) = 1.0;
    } else {
      graph.node_features = degree_one_hot(graph.node_count, graph.edges, options.degree_cap);
    }
  }
  out.validate();
  return out;
}

enum SectionTag : std::uint32_t { kMetaSection = 1, kGraphSection = 2 };

}  // namespace

std::string encode_collection(const GraphCollection& c, const CacheKey& key) {
  ByteWriter meta;
  meta.i64(key.source_mtime);
  meta.u64(key.degree_cap);
  meta.u64(c.feature_dim);
  meta.u64(c.class_count);
  meta.u64(c.graphs.size());

  ByteWriter graphs;
  for (const Graph& g : c.graphs) {
    graphs.u64(g.node_count);
    graphs.u8(g.label ? 1 : 0);
    graphs.i64(g.label.value_or(0));
    graphs.u64(g.edges.size());
    for (const Edge& e : g.edges) {
      graphs.u32(e.u);
      graphs.u32(e.v);
    }
    graphs.u64(g.node_features.rows());
    graphs.u64(g.node_features.cols());
    for (double v : g.node_features.data()) graphs.f64(v);
  }

  ByteWriter w;
  w.bytes("AUGG");
  w.u32(kCollectionCacheVersion);
  w.u32(2);
  for (auto [tag, section] : {std::pair{kMetaSection, &meta}, std::pair{kGraphSection, &graphs}}) {
    w.u32(tag);
    w.u64(section->buffer().size());
    w.bytes(section->buffer());
  }
  return w.take();
}

GraphCollection decode_collection(const std::string& bytes, CacheKey* key) {
  ByteReader r(bytes, "collection cache");
  if (r.bytes(4) != "AUGG") throw IoError("collection cache: bad magic");
  if (r.u32() != kCollectionCacheVersion) throw IoError("collection cache: unsupported version");
  const std::uint32_t sections = r.u32();
  std::map<std::uint32_t, std::string> payloads;
  for (std::uint32_t s = 0; s < sections; ++s) {
    const std::uint32_t tag = r.u32();
    const std::uint64_t len = r.u64();
    if (len > r.remaining()) throw IoError("collection cache: truncated section");
    payloads[tag] = r.bytes(static_cast<std::size_t>(len));
  }
  if (!payloads.contains(kMetaSection) || !payloads.contains(kGraphSection))
    throw IoError("collection cache: missing section");

  GraphCollection c;
  ByteReader meta(payloads[kMetaSection], "collection cache meta");
  CacheKey k;
  k.source_mtime = meta.i64();
  k.degree_cap = meta.u64();
  c.feature_dim = meta.u64();
  c.class_count = meta.u64();
  const std::uint64_t count = meta.u64();
  if (key) *key = k;

  ByteReader gr(payloads[kGraphSection], "collection cache graphs");
  c.graphs.resize(count);
  for (Graph& g : c.graphs) {
    g.node_count = gr.u64();
    const bool has_label = gr.u8() != 0;
    const std::int64_t label = gr.i64();
    if (has_label) g.label = static_cast<int>(label);
    g.edges.resize(gr.u64());
    for (Edge& e : g.edges) {
      e.u = gr.u32();
      e.v = gr.u32();
    }
    const std::size_t rows = gr.u64(), cols = gr.u64();
    std::vector<double> data(rows * cols);
    for (double& v : data) v = gr.f64();
    g.node_features = Tensor({rows, cols}, std::move(data));
  }
  c.validate();
  return c;
}

GraphCollection parse_tu_dataset(const fs::path& directory, const std::string& name, const TuOptions& options) {
  if (!options.use_cache) return parse_sources(directory, name, options);

  CacheKey want;
  want.degree_cap = options.degree_cap;
  for (const char* suffix : {"_A.txt", "_graph_indicator.txt", "_graph_labels.txt", "_node_labels.txt"}) {
    const fs::path p = directory / (name + suffix);
    std::error_code ec;
    if (fs::exists(p, ec)) want.source_mtime = std::max(want.source_mtime, mtime_of(p));
  }

  const fs::path cache = cache_path(directory, name);
  std::error_code ec;
  if (fs::exists(cache, ec)) {
    try {
      CacheKey have;
      GraphCollection c = decode_collection(read_file(cache.string()), &have);
      if (have == want) return c;
    } catch (const Error&) {
      // stale or corrupt sidecar: fall through and re-parse
    }
  }

  GraphCollection c = parse_sources(directory, name, options);
  try {
    write_file(cache.string(), encode_collection(c, want));
  } catch (const IoError&) {
    // read-only dataset directory; the cache is optional
  }
  return c;
}

void write_tu_dataset(const GraphCollection& c, const fs::path& directory, const std::string& name) {
  fs::create_directories(directory);
  std::ostringstream a, indicator, glabels, nlabels;
  std::size_t offset = 0;
  for (std::size_t g = 0; g < c.graphs.size(); ++g) {
    const Graph& graph = c.graphs[g];
    for (const Edge& e : graph.edges) {
      a << (e.u + offset + 1) << ", " << (e.v + offset + 1) << '\n';
      a << (e.v + offset + 1) << ", " << (e.u + offset + 1) << '\n';
    }
    for (std::size_t v = 0; v < graph.node_count; ++v) {
      indicator << (g + 1) << '\n';
      auto row = graph.node_features.row(v);
      nlabels << (std::max_element(row.begin(), row.end()) - row.begin()) << '\n';
    }
    glabels << graph.label.value_or(0) << '\n';
    offset += graph.node_count;
  }
  write_file((directory / (name + "_A.txt")).string(), a.str());
  write_file((directory / (name + "_graph_indicator.txt")).string(), indicator.str());
  write_file((directory / (name + "_graph_labels.txt")).string(), glabels.str());
  write_file((directory / (name + "_node_labels.txt")).string(), nlabels.str());
}

}  // namespace augcl
