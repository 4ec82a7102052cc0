#include "synthdet/stl_io.hpp"

#include <cstring>
#include <fstream>
#include <string>
#include <unordered_map>

namespace synthdet {

namespace {

constexpr std::size_t kHeaderSize = 80;
constexpr std::size_t kRecordSize = 50;  // 12 f32 + u16 attribute

std::uint32_t read_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float read_f32_le(const std::uint8_t* p) {
  std::uint32_t bits = read_u32_le(p);
  float f;
  std::memcpy(&f, &bits, sizeof(f));
  return f;
}

}  // namespace

Mesh parse_stl(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderSize + 4) {
    throw ParseError("stl: truncated stream (no header)");
  }
  const std::uint32_t count = read_u32_le(bytes.data() + kHeaderSize);
  const std::size_t expected = kHeaderSize + 4 + static_cast<std::size_t>(count) * kRecordSize;
  if (bytes.size() != expected) {
    throw ParseError("stl: declared " + std::to_string(count) + " triangle(s) but payload holds " +
                     std::to_string(bytes.size()) + " bytes, expected " + std::to_string(expected));
  }

  Mesh mesh;
  // Weld key is the raw 12-byte bit pattern of the corner, so welding is
  // exact and platform-independent.
  std::unordered_map<std::string, int> vertex_index;
  mesh.triangles.reserve(count);

  for (std::uint32_t t = 0; t < count; ++t) {
    const std::uint8_t* rec = bytes.data() + kHeaderSize + 4 + static_cast<std::size_t>(t) * kRecordSize;
    std::array<int, 3> tri;
    for (int k = 0; k < 3; ++k) {
      const std::uint8_t* corner = rec + 12 + 12 * k;  // skip facet normal
      std::string key(reinterpret_cast<const char*>(corner), 12);
      auto [it, inserted] = vertex_index.try_emplace(key, static_cast<int>(mesh.vertices.size()));
      if (inserted) {
        mesh.vertices.push_back({read_f32_le(corner), read_f32_le(corner + 4),
                                 read_f32_le(corner + 8)});
      }
      tri[k] = it->second;
    }
    mesh.triangles.push_back(tri);
  }
  if (!mesh.triangles.empty()) {
    mesh.sub_groups.push_back({"default", 0, mesh.triangles.size()});
  }
  return mesh;
}

Mesh load_stl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  return parse_stl(bytes);
}

}  // namespace synthdet
