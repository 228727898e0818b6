#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace molegen::lm {

struct VersionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CorruptPayload : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Generic checkpoint container. On disk: magic "CLM1", a little-endian
// u64 length prefix, a UTF-8 JSON metadata document (declares format
// version, section contents, and tensor names/shapes in payload order),
// the named tensors as little-endian float32, and a 64-bit FNV-1a checksum
// of the tensor payload.
struct Checkpoint {
  nlohmann::json meta;
  std::vector<std::pair<std::string, std::vector<float>>> tensors;

  const std::vector<float>& tensor(const std::string& name) const;
};

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

std::uint64_t fnv1a64(const void* data, std::size_t size);

} // namespace molegen::lm
