#include "synthdet/texture.hpp"

#include <cmath>

#include "synthdet/rng.hpp"

namespace synthdet {

namespace {

double lattice_value(std::int64_t x, std::int64_t y, std::int64_t z, std::uint64_t seed) {
  std::uint64_t s = static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull ^
                    static_cast<std::uint64_t>(y) * 0xC2B2AE3D27D4EB4Full ^
                    static_cast<std::uint64_t>(z) * 0x165667B19E3779F9ull ^ seed;
  return static_cast<double>(splitmix64_next(s) >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(const Vec3& p, std::uint64_t seed) {
  const double fx = std::floor(p.x), fy = std::floor(p.y), fz = std::floor(p.z);
  const auto x0 = static_cast<std::int64_t>(fx);
  const auto y0 = static_cast<std::int64_t>(fy);
  const auto z0 = static_cast<std::int64_t>(fz);
  const double tx = smooth(p.x - fx), ty = smooth(p.y - fy), tz = smooth(p.z - fz);

  double corners[2][2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) corners[i][j][k] = lattice_value(x0 + i, y0 + j, z0 + k, seed);

  auto mix = [](double a, double b, double t) { return a + (b - a) * t; };
  const double xy0 = mix(mix(corners[0][0][0], corners[1][0][0], tx),
                         mix(corners[0][1][0], corners[1][1][0], tx), ty);
  const double xy1 = mix(mix(corners[0][0][1], corners[1][0][1], tx),
                         mix(corners[0][1][1], corners[1][1][1], tx), ty);
  return mix(xy0, xy1, tz);
}

}  // namespace

double procedural_texture_value(const ProceduralTexture& tex, const Vec3& point) {
  const double cell = tex.scale * 0.5;  // pattern period = scale, 2 cells per period
  switch (tex.kind) {
    case TextureKind::kChecker: {
      const auto ix = static_cast<std::int64_t>(std::floor(point.x / cell));
      const auto iy = static_cast<std::int64_t>(std::floor(point.y / cell));
      const auto iz = static_cast<std::int64_t>(std::floor(point.z / cell));
      return ((ix + iy + iz) & 1) ? 1.0 : 0.0;
    }
    case TextureKind::kStripes: {
      const auto ix = static_cast<std::int64_t>(std::floor(point.x / cell));
      return (ix & 1) ? 1.0 : 0.0;
    }
    case TextureKind::kValueNoise:
      return value_noise(point / tex.scale, tex.seed);
  }
  return 0.0;
}

Vec3 surface_albedo(const MaterialSpec& mat, const Vec3& point) {
  if (!mat.texture) return mat.base_color;
  const double t = procedural_texture_value(*mat.texture, point);
  return lerp(mat.base_color, mat.texture->secondary_color, t);
}

}  // namespace synthdet
