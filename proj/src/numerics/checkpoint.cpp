#include "augcl/checkpoint.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "augcl/binary_io.hpp"
#include "augcl/error.hpp"

namespace augcl {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string encode_checkpoint(const NamedTensors& tensors) {
  ByteWriter w;
  w.bytes("AUGT");
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    if (name.size() > std::numeric_limits<std::uint16_t>::max()) throw IoError("tensor name too long: " + name);
    if (t.rank() > std::numeric_limits<std::uint8_t>::max()) throw IoError("tensor rank too large: " + name);
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.bytes(name);
    w.u8(static_cast<std::uint8_t>(t.rank()));
    for (std::size_t d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (double v : t.data()) w.f64(v);
  }
  return w.take();
}

NamedTensors decode_checkpoint(const std::string& bytes) {
  ByteReader r(bytes, "checkpoint");
  if (r.bytes(4) != "AUGT") throw IoError("checkpoint: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) throw IoError("checkpoint: unsupported version " + std::to_string(version));
  const std::uint32_t count = r.u32();
  NamedTensors out;
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::string name = r.bytes(r.u16());
    const std::uint8_t rank = r.u8();
    Shape shape(rank);
    for (auto& d : shape) d = r.u32();
    const std::size_t n = shape_product(shape);
    if (r.remaining() / 8 < n) throw IoError("checkpoint: truncated payload for '" + name + "'");
    std::vector<double> data(n);
    for (double& v : data) v = r.f64();
    out.emplace(name, Tensor(std::move(shape), std::move(data)));
  }
  if (!r.at_end()) throw IoError("checkpoint: trailing bytes");
  return out;
}

void save_checkpoint(const std::string& path, const NamedTensors& tensors) {
  write_file(path, encode_checkpoint(tensors));
}

NamedTensors load_checkpoint(const std::string& path) { return decode_checkpoint(read_file(path)); }

}  // namespace augcl
