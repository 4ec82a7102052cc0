#include <doctest.h>

#include "synthdet/renderer.hpp"
#include "synthdet/rng.hpp"
#include "synthdet/texture.hpp"
#include "test_util.hpp"

using namespace synthdet;
using testutil::demo_catalog;

namespace {

// Brute-force nearest hit sharing only the per-triangle test.
std::optional<Hit> linear_scan(const Ray& ray, const std::vector<RenderTriangle>& tris) {
  std::optional<Hit> best;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const auto hit = intersect_triangle(ray, tris[i], static_cast<int>(i));
    if (!hit) continue;
    if (!best || hit->t < best->t || (hit->t == best->t && hit->tri < best->tri)) best = hit;
  }
  return best;
}

SceneSpec settled_demo_scene(std::uint64_t seed, std::uint64_t index) {
  SceneParams params;
  return sample_scene(DatasetVariant::kRandTex, demo_catalog(), seed, index, params);
}

// Flat analytic fixture: white Lambertian floor, one light, camera above.
SceneSpec plane_light_fixture() {
  SceneSpec scene;
  scene.variant = DatasetVariant::kFix;
  scene.has_floor = true;
  scene.floor_material.base_color = {1, 1, 1};
  scene.floor_material.specular = 0.0;
  scene.floor_material.reflectivity = 0.0;
  scene.lights.push_back({{0, 0, 1.0}, {1, 1, 1}, 1.0});
  scene.camera.position = {0, 0, 0.3};
  scene.camera.forward = {0, 0, -1};
  scene.camera.right = {1, 0, 0};
  scene.camera.up = {0, 1, 0};
  scene.frame_seed = 1;
  return scene;
}

}  // namespace

TEST_CASE("texture: checker cells alternate at half the scale") {
  ProceduralTexture tex;
  tex.kind = TextureKind::kChecker;
  tex.scale = 1.0;
  const double a = procedural_texture_value(tex, {0.25, 0.25, 0.0});
  const double b = procedural_texture_value(tex, {0.75, 0.25, 0.0});
  CHECK(a != b);
  CHECK((a == 0.0 || a == 1.0));
  CHECK((b == 0.0 || b == 1.0));
}

TEST_CASE("texture: stripes alternate along x only") {
  ProceduralTexture tex;
  tex.kind = TextureKind::kStripes;
  tex.scale = 0.02;
  const double a = procedural_texture_value(tex, {0.001, 0.5, 0.3});
  CHECK(procedural_texture_value(tex, {0.001, -2.0, 9.0}) == a);
  CHECK(procedural_texture_value(tex, {0.011, 0.5, 0.3}) != a);
}

TEST_CASE("texture: value noise is deterministic and bounded") {
  ProceduralTexture tex;
  tex.kind = TextureKind::kValueNoise;
  tex.scale = 0.03;
  tex.seed = 777;
  Rng rng(4);
  for (int i = 0; i < 100000; ++i) {
    const Vec3 p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double v = procedural_texture_value(tex, p);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(procedural_texture_value(tex, p) == v);
  }
}

TEST_CASE("bvh: single triangle gives one leaf with its bounds") {
  std::vector<RenderTriangle> tris(1);
  tris[0].v0 = {0, 0, 0};
  tris[0].v1 = {1, 0, 0};
  tris[0].v2 = {0, 1, 0};
  const Bvh bvh = build_bvh(tris);
  REQUIRE(bvh.nodes.size() == 1);
  CHECK(bvh.nodes[0].is_leaf());
  CHECK(bvh.nodes[0].box.lo == Vec3{0, 0, 0});
  CHECK(bvh.nodes[0].box.hi == Vec3{1, 1, 0});
}

TEST_CASE("bvh: empty geometry raises") {
  CHECK_THROWS_AS(build_bvh(std::span<const RenderTriangle>{}), std::invalid_argument);
}

TEST_CASE("bvh: traversal equals the linear-scan oracle on random rays") {
  const SceneSpec scene = settled_demo_scene(3, 0);
  RenderConfig config;
  config.width = 64;
  config.height = 48;
  const RenderContext ctx(scene, demo_catalog(), config);
  REQUIRE(ctx.triangles().size() > 100);

  CHECK(ctx.bvh().nodes.size() <= 2 * ctx.triangles().size());
  for (const auto& node : ctx.bvh().nodes) {
    if (node.is_leaf()) CHECK(node.count <= 4);
  }

  Rng rng(12);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) {
    Ray ray;
    ray.origin = {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.01, 0.4)};
    ray.dir = normalized({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const auto via_bvh = intersect(ray, ctx.bvh(), ctx.triangles());
    const auto via_scan = linear_scan(ray, ctx.triangles());
    REQUIRE(via_bvh.has_value() == via_scan.has_value());
    if (via_bvh) {
      ++hits;
      CHECK(via_bvh->t == via_scan->t);
      CHECK(via_bvh->tri == via_scan->tri);
      CHECK(via_bvh->instance_id == via_scan->instance_id);
    }
  }
  CHECK(hits > 1000);  // the batch must exercise real geometry
}

TEST_CASE("intersect: tessellated sphere from above hits near t = 0.5") {
  std::vector<RenderTriangle> tris;
  const auto pts = testutil::fibonacci_sphere(400, 0.5);
  const ConvexHull sphere = convex_hull(pts);
  for (const auto& f : sphere.faces) {
    RenderTriangle t;
    t.v0 = sphere.vertices[f[0]];
    t.v1 = sphere.vertices[f[1]];
    t.v2 = sphere.vertices[f[2]];
    tris.push_back(t);
  }
  const Bvh bvh = build_bvh(tris);
  const auto hit = intersect({{0, 0, 1}, {0, 0, -1}}, bvh, tris);
  REQUIRE(hit.has_value());
  CHECK(std::abs(hit->t - 0.5) < 1e-2);

  CHECK(!intersect({{0, 0, 1}, {0, 0, 1}}, bvh, tris).has_value());
}

TEST_CASE("shade: closed-form Lambert value on the plane fixture") {
  const SceneSpec scene = plane_light_fixture();
  RenderConfig config;
  config.width = 32;
  config.height = 32;
  const RenderContext ctx(scene, demo_catalog(), config);

  // center ray points straight down at the origin; the light is 1 m above
  // at intensity 1, so the radiance is exactly (1,1,1)
  const Vec3 radiance = ctx.radiance(ctx.primary_ray(16, 16));
  CHECK(std::abs(radiance.x - 1.0) < 1e-6);
  CHECK(std::abs(radiance.y - 1.0) < 1e-6);
  CHECK(std::abs(radiance.z - 1.0) < 1e-6);
}

TEST_CASE("shade: fully shadowed point is black") {
  SceneSpec scene = plane_light_fixture();
  // opaque slab between the light and the floor
  SceneInstance blocker;
  blocker.class_id = 10;  // buzzer: a squat cylinder
  blocker.pose.position = {0, 0, 0.5};
  const auto& part = demo_catalog().by_id(10);
  blocker.materials.assign(part.mesh.sub_groups.empty() ? 1 : part.mesh.sub_groups.size(),
                           MaterialSpec{});
  scene.instances.push_back(blocker);

  RenderConfig config;
  config.width = 32;
  config.height = 32;
  const RenderContext ctx(scene, demo_catalog(), config);
  // ray at the image center still reaches the floor (the blocker is small
  // and sits at z=0.5 between light and plane), but the shadow ray is cut
  const Ray down{{0.001, 0.001, 0.05}, {0, 0, -1}};
  const Vec3 radiance = ctx.radiance(down);
  CHECK(radiance.x == 0.0);
  CHECK(radiance.y == 0.0);
  CHECK(radiance.z == 0.0);
}

TEST_CASE("shade: depth limit drops the mirror term") {
  SceneSpec scene = plane_light_fixture();
  scene.floor_material.reflectivity = 1.0;
  RenderConfig config;
  config.width = 16;
  config.height = 16;
  config.max_reflection_depth = 0;
  const RenderContext ctx(scene, demo_catalog(), config);
  const Vec3 with_limit = ctx.radiance(ctx.primary_ray(8, 8));
  // equals the pure Lambert value: the bounce is cut at depth 0
  CHECK(std::abs(with_limit.x - 1.0) < 1e-6);
}

TEST_CASE("render: empty scene without floor is pure background") {
  SceneSpec scene;
  scene.has_floor = false;
  scene.lights.push_back({{0, 0, 1}, {1, 1, 1}, 1.0});
  scene.camera.position = {0, 0, 0.3};
  scene.camera.forward = {0, 0, -1};
  scene.camera.right = {1, 0, 0};
  scene.camera.up = {0, 1, 0};
  RenderConfig config;
  config.width = 24;
  config.height = 18;
  config.background = {0.2, 0.0, 0.4};
  const RenderOutput out = render(scene, demo_catalog(), config);
  const std::uint8_t expect_r = static_cast<std::uint8_t>(
      std::lround(std::pow(0.2, 1 / 2.2) * 255));
  for (int y = 0; y < out.rgb.height; ++y) {
    for (int x = 0; x < out.rgb.width; ++x) {
      CHECK(out.rgb.at(x, y)[0] == expect_r);
      CHECK(out.ids.at(x, y) == 0);
    }
  }
}

TEST_CASE("render: center pixel id names the instance under the camera") {
  SceneSpec scene = plane_light_fixture();
  SceneInstance inst;
  inst.class_id = 10;  // buzzer cylinder at the origin fills the view center
  inst.pose.position = {0, 0, 0.001};
  const auto& part = demo_catalog().by_id(10);
  inst.materials.assign(part.mesh.sub_groups.empty() ? 1 : part.mesh.sub_groups.size(),
                        MaterialSpec{});
  scene.instances.push_back(inst);
  RenderConfig config;
  config.width = 48;
  config.height = 36;
  const RenderOutput out = render(scene, demo_catalog(), config);
  CHECK(out.ids.at(24, 18) == 1);
}

TEST_CASE("render: worker count never changes the output bytes") {
  const SceneSpec scene = settled_demo_scene(21, 1);
  RenderConfig config;
  config.width = 96;
  config.height = 72;
  config.samples_per_pixel = 2;

  config.workers = 1;
  const RenderOutput serial = render(scene, demo_catalog(), config);
  config.workers = 4;
  const RenderOutput parallel = render(scene, demo_catalog(), config);
  CHECK(serial.rgb.pixels == parallel.rgb.pixels);
  CHECK(serial.ids.pixels == parallel.ids.pixels);
}

TEST_CASE("render: nonzero ids re-trace to the same instance, radiance stays finite") {
  const SceneSpec scene = settled_demo_scene(33, 2);
  RenderConfig config;
  config.width = 80;
  config.height = 60;
  config.samples_per_pixel = 1;
  const RenderContext ctx(scene, demo_catalog(), config);
  const RenderOutput out = render(scene, demo_catalog(), config);
  for (int y = 0; y < config.height; ++y) {
    for (int x = 0; x < config.width; ++x) {
      const auto hit = ctx.trace(ctx.primary_ray(x + 0.5, y + 0.5));
      const std::uint16_t expect = hit ? hit->instance_id : 0;
      CHECK(out.ids.at(x, y) == expect);
      const Vec3 radiance = ctx.radiance(ctx.primary_ray(x + 0.5, y + 0.5));
      CHECK(std::isfinite(radiance.x));
      CHECK(radiance.x >= 0.0);
      CHECK(std::isfinite(radiance.y));
      CHECK(radiance.y >= 0.0);
      CHECK(std::isfinite(radiance.z));
      CHECK(radiance.z >= 0.0);
    }
  }
}
