#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "augcl/graph.hpp"

namespace augcl {

struct TuOptions {
  // Degree one-hot cap used when NAME_node_labels.txt is absent.
  std::size_t degree_cap = 64;
  // Read/write the NAME.augg binary sidecar next to the text files.
  bool use_cache = true;
};

// Reads the TU benchmark layout: NAME_A.txt, NAME_graph_indicator.txt,
// NAME_graph_labels.txt and optionally NAME_node_labels.txt. Indices are
// 1-based on disk and 0-based in memory. LF and CRLF line endings are
// accepted. Throws ParseError with the offending file and line.
GraphCollection parse_tu_dataset(const std::filesystem::path& directory, const std::string& name,
                                 const TuOptions& options = {});

// Writes a collection in the same layout. Node labels are written as the
// argmax of each feature row.
void write_tu_dataset(const GraphCollection& collection, const std::filesystem::path& directory,
                      const std::string& name);

// Binary cache: "AUGG" | version u32 | section count u32 |
//   sections of (tag u32, length u64, payload).
inline constexpr std::uint32_t kCollectionCacheVersion = 1;

struct CacheKey {
  std::int64_t source_mtime = 0;
  std::uint64_t degree_cap = 0;
  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

std::string encode_collection(const GraphCollection& collection, const CacheKey& key = {});
GraphCollection decode_collection(const std::string& bytes, CacheKey* key = nullptr);

}  // namespace augcl
