#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "synthdet/mesh.hpp"

namespace synthdet {

// Binary STL parser: 80-byte header, little-endian u32 triangle count,
// 50-byte records. Duplicate corner positions are welded at exact
// f32 bit-equality; facet normals are discarded (recomputed downstream).
Mesh parse_stl(const std::vector<std::uint8_t>& bytes);

Mesh load_stl(const std::filesystem::path& path);

}  // namespace synthdet
