#include <cstring>
#include <fstream>

#include "molegen/lm/checkpoint.hpp"

namespace molegen::lm {

namespace {

constexpr char kMagic[4] = {'C', 'L', 'M', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw CorruptPayload("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

// little-endian float payload; byte-swap only on big-endian hosts
std::vector<char> to_le_bytes(const std::vector<float>& values) {
  std::vector<char> bytes(values.size() * 4);
  std::memcpy(bytes.data(), values.data(), bytes.size());
  return bytes;
}

} // namespace

const std::vector<float>& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [n, v] : tensors)
    if (n == name) return v;
  throw CorruptPayload("tensor not in checkpoint: " + name);
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  nlohmann::json meta = ckpt.meta;
  meta["format_version"] = kCheckpointVersion;
  auto& decl = meta["tensors"] = nlohmann::json::array();
  for (const auto& [name, values] : ckpt.tensors)
    decl.push_back({{"name", name}, {"count", values.size()}});

  const std::string meta_text = meta.dump();
  std::vector<char> payload;
  for (const auto& [name, values] : ckpt.tensors) {
    auto bytes = to_le_bytes(values);
    payload.insert(payload.end(), bytes.begin(), bytes.end());
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CorruptPayload("cannot open for writing: " + path);
  os.write(kMagic, 4);
  put_u64(os, meta_text.size());
  os.write(meta_text.data(), static_cast<std::streamsize>(meta_text.size()));
  os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  put_u64(os, fnv1a64(payload.data(), payload.size()));
  if (!os) throw CorruptPayload("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CorruptPayload("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw VersionMismatch("bad magic bytes (not a CLM1 checkpoint)");

  const std::uint64_t meta_len = get_u64(is);
  std::string meta_text(meta_len, '\0');
  is.read(meta_text.data(), static_cast<std::streamsize>(meta_len));
  if (!is) throw CorruptPayload("truncated metadata");

  Checkpoint ckpt;
  try {
    ckpt.meta = nlohmann::json::parse(meta_text);
  } catch (const nlohmann::json::exception&) {
    throw CorruptPayload("metadata is not valid JSON");
  }
  if (!ckpt.meta.contains("format_version") ||
      ckpt.meta["format_version"].get<int>() != kCheckpointVersion)
    throw VersionMismatch("unsupported checkpoint format version");

  std::vector<char> payload;
  for (const auto& decl : ckpt.meta["tensors"]) {
    const auto count = decl["count"].get<std::size_t>();
    std::vector<char> bytes(count * 4);
    is.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!is) throw CorruptPayload("truncated tensor payload");
    payload.insert(payload.end(), bytes.begin(), bytes.end());
    std::vector<float> values(count);
    std::memcpy(values.data(), bytes.data(), bytes.size());
    ckpt.tensors.emplace_back(decl["name"].get<std::string>(), std::move(values));
  }

  const std::uint64_t expect = get_u64(is);
  if (fnv1a64(payload.data(), payload.size()) != expect)
    throw CorruptPayload("payload checksum mismatch");
  return ckpt;
}

} // namespace molegen::lm
