#pragma once

#include <string>

#include "augcl/tensor.hpp"

namespace augcl {

// Flat tensor checkpoint:
//   "AUGT" | version u32 | count u32 |
//   per tensor: name length u16, name bytes, rank u8, dims u32 x rank,
//               little-endian f64 payload
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const NamedTensors& tensors);
NamedTensors decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const NamedTensors& tensors);
NamedTensors load_checkpoint(const std::string& path);

}  // namespace augcl
