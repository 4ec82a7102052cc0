#include "synthdet/renderer.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "synthdet/rng.hpp"
#include "synthdet/texture.hpp"

namespace synthdet {

namespace {

constexpr double kPi = 3.141592653589793;

// Sub-group view matching the material assignment in the randomizer.
std::vector<SubGroup> regions_of(const Mesh& mesh) {
  if (!mesh.sub_groups.empty()) return mesh.sub_groups;
  return {{"default", 0, mesh.triangles.size()}};
}

std::uint8_t tonemap_channel(double v) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(std::pow(clamped, 1.0 / 2.2) * 255.0));
}

}  // namespace

RenderContext::RenderContext(const SceneSpec& scene, const PartCatalog& catalog,
                             const RenderConfig& config)
    : config_(config), scene_(&scene) {
  if (config.width < 1 || config.height < 1 || config.samples_per_pixel < 1) {
    throw std::invalid_argument("renderer: width, height and spp must be >= 1");
  }
  tan_half_fov_ = std::tan(config.fov_deg * 0.5 * kPi / 180.0);
  aspect_ = static_cast<double>(config.width) / config.height;

  materials_.push_back(scene.floor_material);
  if (scene.has_floor) {
    const double h = 0.5;  // 1 m square floor plate
    const Vec3 c0{-h, -h, 0}, c1{h, -h, 0}, c2{h, h, 0}, c3{-h, h, 0};
    RenderTriangle f0{c0, c1, c2, {}, {}, {}, false, 0, 0};
    RenderTriangle f1{c0, c2, c3, {}, {}, {}, false, 0, 0};
    triangles_.push_back(f0);
    triangles_.push_back(f1);
  }

  for (std::size_t i = 0; i < scene.instances.size(); ++i) {
    const SceneInstance& inst = scene.instances[i];
    const PartClass& part = catalog.by_id(inst.class_id);
    const Mesh& mesh = part.mesh;
    const auto groups = regions_of(mesh);
    if (inst.materials.size() != groups.size()) {
      throw std::invalid_argument("renderer: instance materials do not match mesh sub_groups");
    }
    const auto instance_id = static_cast<std::uint16_t>(i + 1);
    const Quat& rot = inst.pose.orientation;
    const Vec3& pos = inst.pose.position;

    for (std::size_t g = 0; g < groups.size(); ++g) {
      const int material_index = static_cast<int>(materials_.size());
      materials_.push_back(inst.materials[g]);
      for (std::size_t t = groups[g].first_tri; t < groups[g].first_tri + groups[g].tri_count;
           ++t) {
        const auto& tri = mesh.triangles[t];
        RenderTriangle rt;
        rt.v0 = rot.rotate(mesh.vertices[tri[0]]) + pos;
        rt.v1 = rot.rotate(mesh.vertices[tri[1]]) + pos;
        rt.v2 = rot.rotate(mesh.vertices[tri[2]]) + pos;
        if (mesh.has_normals()) {
          rt.n0 = rot.rotate(mesh.normals[tri[0]]);
          rt.n1 = rot.rotate(mesh.normals[tri[1]]);
          rt.n2 = rot.rotate(mesh.normals[tri[2]]);
          rt.smooth = true;
        }
        rt.instance_id = instance_id;
        rt.material = material_index;
        triangles_.push_back(rt);
      }
    }
  }

  if (!triangles_.empty()) bvh_ = build_bvh(triangles_);
}

Ray RenderContext::primary_ray(double px, double py) const {
  const double sx = (2.0 * px / config_.width - 1.0) * tan_half_fov_ * aspect_;
  const double sy = (1.0 - 2.0 * py / config_.height) * tan_half_fov_;
  const CameraPose& cam = scene_->camera;
  return {cam.position, normalized(cam.forward + cam.right * sx + cam.up * sy)};
}

std::optional<Hit> RenderContext::trace(const Ray& ray) const {
  if (triangles_.empty()) return std::nullopt;
  return intersect(ray, bvh_, triangles_);
}

Vec3 RenderContext::shade(const Ray& ray, const Hit& hit, int depth) const {
  const RenderTriangle& tri = triangles_[hit.tri];
  const Vec3 point = ray.at(hit.t);
  Vec3 n = tri.smooth
               ? normalized(tri.n0 * (1.0 - hit.u - hit.v) + tri.n1 * hit.u + tri.n2 * hit.v)
               : tri.geometric_normal();
  if (dot(n, ray.dir) > 0.0) n = -n;

  const MaterialSpec& mat = materials_[tri.material];
  const Vec3 albedo = surface_albedo(mat, point);

  Vec3 color{0, 0, 0};
  for (const Light& light : scene_->lights) {
    const Vec3 to_light = light.position - point;
    const double dist_sq = norm_sq(to_light);
    if (dist_sq <= 0.0) continue;
    const double dist = std::sqrt(dist_sq);
    const Vec3 l = to_light / dist;
    const double n_dot_l = dot(n, l);
    if (n_dot_l <= 0.0) continue;
    if (config_.shadow_rays && occluded({point, l}, dist - kRayTMin, bvh_, triangles_)) {
      continue;
    }
    const double falloff = light.intensity / dist_sq;
    color += albedo.cwise_mul(light.color) * (n_dot_l * falloff);
    if (mat.specular > 0.0) {
      const Vec3 half_vec = normalized(l - ray.dir);
      const double n_dot_h = dot(n, half_vec);
      if (n_dot_h > 0.0) {
        color += light.color * (mat.specular * std::pow(n_dot_h, 64.0) * falloff);
      }
    }
  }

  if (mat.reflectivity > 0.0 && depth < config_.max_reflection_depth) {
    const Vec3 refl_dir = ray.dir - n * (2.0 * dot(ray.dir, n));
    color += radiance({point, normalized(refl_dir)}, depth + 1) * mat.reflectivity;
  }
  return color;
}

Vec3 RenderContext::radiance(const Ray& ray, int depth) const {
  const auto hit = trace(ray);
  if (!hit) return config_.background;
  return shade(ray, *hit, depth);
}

RenderOutput render(const SceneSpec& scene, const PartCatalog& catalog,
                    const RenderConfig& config) {
  const RenderContext ctx(scene, catalog, config);
  RenderOutput out;
  out.rgb = ImageRgb8(config.width, config.height);
  out.ids = ImageGray16(config.width, config.height);

  const int spp = config.samples_per_pixel;
  auto render_row = [&](int y) {
    for (int x = 0; x < config.width; ++x) {
      const std::uint64_t pixel_index =
          static_cast<std::uint64_t>(y) * config.width + static_cast<std::uint64_t>(x);
      Rng rng(derive_frame_seed(scene.frame_seed, pixel_index));
      Vec3 sum{0, 0, 0};
      for (int s = 0; s < spp; ++s) {
        const double jx = rng.uniform();
        const double jy = rng.uniform();
        sum += ctx.radiance(ctx.primary_ray(x + jx, y + jy));
      }
      const Vec3 mean = sum / spp;
      std::uint8_t* px = out.rgb.at(x, y);
      px[0] = tonemap_channel(mean.x);
      px[1] = tonemap_channel(mean.y);
      px[2] = tonemap_channel(mean.z);

      const auto id_hit = ctx.trace(ctx.primary_ray(x + 0.5, y + 0.5));
      out.ids.at(x, y) = id_hit ? id_hit->instance_id : 0;
    }
  };

  int workers = config.workers > 0
                    ? config.workers
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, config.height);
  if (workers <= 1) {
    for (int y = 0; y < config.height; ++y) render_row(y);
  } else {
    std::atomic<int> next_row{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int y = next_row.fetch_add(1); y < config.height; y = next_row.fetch_add(1)) {
          render_row(y);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return out;
}

}  // namespace synthdet
