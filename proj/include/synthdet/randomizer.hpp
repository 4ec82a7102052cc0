#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthdet/catalog.hpp"
#include "synthdet/physics.hpp"
#include "synthdet/rng.hpp"
#include "synthdet/vec.hpp"

namespace synthdet {

enum class DatasetVariant {
  kFix,         // fixed per-part colors, no texture, white floor
  kRandNoTex,   // randomized colors, no texture
  kRandTex,     // randomized colors and procedural textures
  kFixRefined,  // ingest-only: externally refined images, never generated
};

std::string to_string(DatasetVariant v);
DatasetVariant variant_from_string(const std::string& s);

struct Light {
  Vec3 position;
  Vec3 color;        // [0,1]^3
  double intensity = 1.0;
};

enum class TextureKind { kChecker, kValueNoise, kStripes };

struct ProceduralTexture {
  TextureKind kind = TextureKind::kChecker;
  double scale = 0.02;       // meters
  Vec3 secondary_color;
  std::uint64_t seed = 0;
};

struct MaterialSpec {
  Vec3 base_color{0.5, 0.5, 0.5};
  std::optional<ProceduralTexture> texture;
  double specular = 0.0;      // [0,1]
  double reflectivity = 0.0;  // [0,1] mirror weight
};

// Orthonormal frame looking at the world origin with a horizontal right
// axis (no roll).
struct CameraPose {
  Vec3 position;
  Vec3 forward;
  Vec3 right;
  Vec3 up;
};

struct CameraPrism {
  double half_side = 0.10;  // square base, 20 cm side
  double z_min = 0.10;
  double z_max = 0.20;
};

struct SceneInstance {
  int class_id = 0;
  PoseState pose;                       // rest pose from settling
  std::vector<MaterialSpec> materials;  // one per mesh sub_group
};

struct SceneSpec {
  DatasetVariant variant = DatasetVariant::kFix;
  std::vector<SceneInstance> instances;
  MaterialSpec floor_material;
  bool has_floor = true;
  std::vector<Light> lights;
  CameraPose camera;
  std::uint64_t frame_seed = 0;
};

struct SceneParams {
  int max_per_class = 2;
  Aabb drop_region{{-0.10, -0.10, 0.05}, {0.10, 0.10, 0.15}};
  SettleParams settle;
  int settle_retries = 3;
  CameraPrism camera_prism;
  int light_count_min = 1;
  int light_count_max = 4;
  Aabb light_region{{-0.25, -0.25, 0.10}, {0.25, 0.25, 0.60}};
  double light_intensity_min = 0.5;
  double light_intensity_max = 2.0;
};

// Fixed-variant surface response; the fixed palette only pins colors.
constexpr double kFixSpecular = 0.2;
constexpr double kFixReflectivity = 0.0;

template <typename R>
CameraPose sample_camera(R& rng, const CameraPrism& prism = {}) {
  CameraPose cam;
  cam.position = {rng.uniform(-prism.half_side, prism.half_side),
                  rng.uniform(-prism.half_side, prism.half_side),
                  rng.uniform(prism.z_min, prism.z_max)};
  cam.forward = normalized(-cam.position);
  if (cam.forward.x * cam.forward.x + cam.forward.y * cam.forward.y < 1e-24) {
    // On the optical axis the no-roll constraint is vacuous; fix the frame.
    cam.forward = {0, 0, -1};
    cam.right = {1, 0, 0};
    cam.up = {0, 1, 0};
  } else {
    cam.right = normalized(cross(cam.forward, Vec3{0, 0, 1}));
    cam.up = cross(cam.right, cam.forward);
  }
  return cam;
}

template <typename R>
std::vector<Light> sample_lights(R& rng, int count_min, int count_max, const Aabb& region,
                                 double intensity_min, double intensity_max) {
  if (count_min < 1 || count_max < count_min) {
    throw std::invalid_argument("randomizer: light count range must satisfy 1 <= min <= max");
  }
  const int count = static_cast<int>(rng.uniform_int(count_min, count_max));
  std::vector<Light> lights;
  lights.reserve(count);
  for (int i = 0; i < count; ++i) {
    Light l;
    l.position = {rng.uniform(region.lo.x, region.hi.x), rng.uniform(region.lo.y, region.hi.y),
                  rng.uniform(region.lo.z, region.hi.z)};
    l.color = {rng.uniform(), rng.uniform(), rng.uniform()};
    l.intensity = rng.uniform(intensity_min, intensity_max);
    lights.push_back(l);
  }
  return lights;
}

template <typename R>
MaterialSpec sample_material(DatasetVariant variant, R& rng, const std::string& region,
                             const std::map<std::string, Vec3>& fix_palette) {
  if (variant == DatasetVariant::kFixRefined) {
    throw std::invalid_argument("randomizer: refined variant is ingest-only");
  }
  MaterialSpec mat;
  if (variant == DatasetVariant::kFix) {
    auto it = fix_palette.find(region);
    if (it == fix_palette.end()) {
      // fall back from "part:group" to "part"
      const auto colon = region.find(':');
      if (colon != std::string::npos) it = fix_palette.find(region.substr(0, colon));
      if (it == fix_palette.end()) {
        throw std::out_of_range("randomizer: no fixed color for region '" + region + "'");
      }
    }
    mat.base_color = it->second;
    mat.specular = kFixSpecular;
    mat.reflectivity = kFixReflectivity;
    return mat;
  }
  mat.base_color = {rng.uniform(), rng.uniform(), rng.uniform()};
  mat.specular = rng.uniform(0.0, 0.5);
  mat.reflectivity = rng.uniform(0.0, 0.3);
  if (variant == DatasetVariant::kRandTex) {
    ProceduralTexture tex;
    const std::uint64_t kind = rng.uniform_int(0, 2);
    tex.kind = kind == 0 ? TextureKind::kChecker
                         : (kind == 1 ? TextureKind::kValueNoise : TextureKind::kStripes);
    tex.scale = rng.uniform(0.01, 0.08);
    tex.secondary_color = {rng.uniform(), rng.uniform(), rng.uniform()};
    tex.seed = rng.next_u64();
    mat.texture = tex;
  }
  return mat;
}

// Samples a complete scene for one frame: part multiset, settled poses,
// materials, lights, camera. Fully determined by (variant, master_seed,
// frame_index, params).
SceneSpec sample_scene(DatasetVariant variant, const PartCatalog& catalog,
                       std::uint64_t master_seed, std::uint64_t frame_index,
                       const SceneParams& params = {});

}  // namespace synthdet
