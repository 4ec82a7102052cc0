#pragma once

#include "synthdet/randomizer.hpp"
#include "synthdet/vec.hpp"

namespace synthdet {

// Texture weight in [0,1] at a world-space point. Checker and stripes are
// binary with cells of half the pattern scale; value noise interpolates
// hashed lattice values, so it stays inside [0,1].
double procedural_texture_value(const ProceduralTexture& tex, const Vec3& point);

// Surface albedo: base color blended toward the texture's secondary color
// by the texture weight (untextured materials return the base color).
Vec3 surface_albedo(const MaterialSpec& mat, const Vec3& point);

}  // namespace synthdet
