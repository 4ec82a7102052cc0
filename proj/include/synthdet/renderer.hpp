#pragma once

#include <optional>
#include <vector>

#include "synthdet/bvh.hpp"
#include "synthdet/catalog.hpp"
#include "synthdet/image.hpp"
#include "synthdet/randomizer.hpp"

namespace synthdet {

struct RenderConfig {
  int width = 1024;
  int height = 768;
  int samples_per_pixel = 4;
  int max_reflection_depth = 2;
  bool shadow_rays = true;
  double fov_deg = 60.0;  // vertical
  Vec3 background{0.0, 0.0, 0.0};
  int workers = 0;  // 0 = hardware concurrency
};

struct RenderOutput {
  ImageRgb8 rgb;
  ImageGray16 ids;  // 0 = background/floor, instance ids start at 1
};

// Immutable world-space view of a scene: flattened triangles, materials,
// BVH, camera. Shared read-only across render workers; also the handle
// tests use to shoot single rays.
class RenderContext {
 public:
  RenderContext(const SceneSpec& scene, const PartCatalog& catalog, const RenderConfig& config);

  // Pixel coordinates are continuous; (x+0.5, y+0.5) is the pixel center.
  Ray primary_ray(double px, double py) const;

  std::optional<Hit> trace(const Ray& ray) const;

  // Pre-tonemap linear radiance: Lambert + Blinn specular under shadowed
  // point lights, plus a reflectivity-weighted mirror bounce.
  Vec3 radiance(const Ray& ray, int depth = 0) const;

  const std::vector<RenderTriangle>& triangles() const { return triangles_; }
  const Bvh& bvh() const { return bvh_; }
  const RenderConfig& config() const { return config_; }

 private:
  Vec3 shade(const Ray& ray, const Hit& hit, int depth) const;

  RenderConfig config_;
  const SceneSpec* scene_;
  std::vector<RenderTriangle> triangles_;
  std::vector<MaterialSpec> materials_;
  Bvh bvh_;
  double tan_half_fov_ = 0.0;
  double aspect_ = 1.0;
};

// Renders RGB (tone-mapped: clamp + gamma 2.2) and the instance-ID buffer
// (one unjittered center ray per pixel). Per-pixel sampling state is
// derived from (frame_seed, pixel index), so the output is bit-identical
// for any worker count.
RenderOutput render(const SceneSpec& scene, const PartCatalog& catalog,
                    const RenderConfig& config);

}  // namespace synthdet
