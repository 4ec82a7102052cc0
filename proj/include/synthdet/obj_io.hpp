#pragma once

#include <filesystem>
#include <string_view>

#include "synthdet/mesh.hpp"

namespace synthdet {

// Wavefront OBJ parser for the directive subset v, vn, f, g, o, usemtl,
// mtllib. Faces with more than three vertices are fan-triangulated from
// the first vertex. g/o/usemtl names become sub_group tags; unknown
// directives are ignored. Throws ParseError with the offending line.
Mesh parse_obj(std::string_view text);

Mesh load_obj(const std::filesystem::path& path);

}  // namespace synthdet
