#include <doctest.h>

#include <unordered_set>

#include "synthdet/randomizer.hpp"
#include "test_util.hpp"

using namespace synthdet;
using testutil::demo_catalog;

namespace {

// Generator stub that always returns the midpoint / a fixed word.
struct MidpointSource {
  double uniform() { return 0.5; }
  double uniform(double lo, double hi) { return 0.5 * (lo + hi); }
  std::uint64_t next_u64() { return 0; }
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) { return (lo + hi) / 2; }
};

}  // namespace

TEST_CASE("derive_frame_seed: reference splitmix64 value") {
  std::uint64_t state = 0;
  CHECK(splitmix64_next(state) == 0xE220A8397B1DCDAFull);
  CHECK(derive_frame_seed(0, 0) == 0x910A2DEC89025CC1ull);  // splitmix64 of state 1
  CHECK(derive_frame_seed(7, 3) == derive_frame_seed(7, 3));
}

TEST_CASE("derive_frame_seed: one million frame indices collide nowhere") {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1 << 21);
  for (std::uint64_t i = 0; i < 1000000; ++i) {
    CHECK(seen.insert(derive_frame_seed(42, i)).second);
  }
}

TEST_CASE("sample_camera: prism midpoint maps to (0,0,0.15)") {
  MidpointSource rng;
  const CameraPose cam = sample_camera(rng);
  CHECK(cam.position == Vec3{0, 0, 0.15});
  // on-axis convention
  CHECK(cam.forward == Vec3{0, 0, -1});
  CHECK(cam.right == Vec3{1, 0, 0});
  CHECK(cam.up == Vec3{0, 1, 0});
}

TEST_CASE("sample_camera: every sample looks at the origin with no roll") {
  Rng rng(64);
  for (int i = 0; i < 10000; ++i) {
    const CameraPose cam = sample_camera(rng);
    CHECK(cam.position.x >= -0.10);
    CHECK(cam.position.x <= 0.10);
    CHECK(cam.position.y >= -0.10);
    CHECK(cam.position.y <= 0.10);
    CHECK(cam.position.z >= 0.10);
    CHECK(cam.position.z <= 0.20);
    // look-at: forward is antiparallel to the position vector
    CHECK(norm(cross(cam.forward, -cam.position)) < 1e-6);
    // no roll
    CHECK(std::abs(cam.right.z) < 1e-9);
    // orthonormal frame
    CHECK(std::abs(norm(cam.forward) - 1.0) < 1e-9);
    CHECK(std::abs(norm(cam.right) - 1.0) < 1e-9);
    CHECK(std::abs(norm(cam.up) - 1.0) < 1e-9);
    CHECK(std::abs(dot(cam.forward, cam.right)) < 1e-9);
    CHECK(std::abs(dot(cam.forward, cam.up)) < 1e-9);
    CHECK(std::abs(dot(cam.right, cam.up)) < 1e-9);
  }
}

TEST_CASE("sample_camera: per-axis means within 3 sigma of the prism center") {
  Rng rng(65);
  const int n = 10000;
  Vec3 mean{};
  for (int i = 0; i < n; ++i) mean += sample_camera(rng).position;
  mean = mean / n;
  const Vec3 center{0, 0, 0.15};
  const double widths[3] = {0.2, 0.2, 0.1};
  for (int axis = 0; axis < 3; ++axis) {
    const double sigma = widths[axis] / std::sqrt(12.0) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean[axis] - center[axis]) < 3.0 * sigma);
  }
}

TEST_CASE("sample_lights: count range and bounded colors") {
  const Aabb region{{-0.25, -0.25, 0.1}, {0.25, 0.25, 0.6}};
  SUBCASE("range [1,1] gives exactly one light") {
    Rng rng(1);
    CHECK(sample_lights(rng, 1, 1, region, 0.5, 2.0).size() == 1);
  }
  SUBCASE("counts 1..4 appear with frequency 0.25 +- 0.02") {
    Rng rng(2);
    int histogram[5] = {0, 0, 0, 0, 0};
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const auto lights = sample_lights(rng, 1, 4, region, 0.5, 2.0);
      REQUIRE(lights.size() >= 1);
      REQUIRE(lights.size() <= 4);
      ++histogram[lights.size()];
    }
    for (int c = 1; c <= 4; ++c) {
      CHECK(std::abs(histogram[c] / static_cast<double>(n) - 0.25) < 0.02);
    }
  }
  SUBCASE("colors componentwise in [0,1], positions in the region") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      for (const Light& l : sample_lights(rng, 1, 4, region, 0.5, 2.0)) {
        CHECK(l.color.x >= 0.0);
        CHECK(l.color.x <= 1.0);
        CHECK(l.color.y >= 0.0);
        CHECK(l.color.y <= 1.0);
        CHECK(l.color.z >= 0.0);
        CHECK(l.color.z <= 1.0);
        CHECK(region.contains(l.position));
        CHECK(l.intensity >= 0.5);
        CHECK(l.intensity <= 2.0);
      }
    }
  }
  SUBCASE("count_min below 1 raises") {
    Rng rng(4);
    CHECK_THROWS(sample_lights(rng, 0, 3, region, 0.5, 2.0));
  }
}

TEST_CASE("sample_material: variant rules") {
  const auto& palette = demo_catalog().fix_palette;
  SUBCASE("fixed variant is deterministic per region") {
    Rng rng(10);
    const MaterialSpec a = sample_material(DatasetVariant::kFix, rng, "led:body", palette);
    const MaterialSpec b = sample_material(DatasetVariant::kFix, rng, "led:body", palette);
    CHECK(a.base_color == b.base_color);
    CHECK(!a.texture);
    CHECK(a.specular == b.specular);
    CHECK(a.reflectivity == b.reflectivity);
  }
  SUBCASE("fixed variant falls back from region to part name") {
    Rng rng(11);
    const MaterialSpec m = sample_material(DatasetVariant::kFix, rng, "buzzer:whatever", palette);
    CHECK(m.base_color == palette.at("buzzer"));
  }
  SUBCASE("unknown region raises") {
    Rng rng(12);
    CHECK_THROWS_AS(sample_material(DatasetVariant::kFix, rng, "no_such_part", palette),
                    std::out_of_range);
  }
  SUBCASE("randomized-no-texture never carries a texture") {
    Rng rng(13);
    for (int i = 0; i < 300; ++i) {
      CHECK(!sample_material(DatasetVariant::kRandNoTex, rng, "x", palette).texture);
    }
  }
  SUBCASE("randomized-texture draws every texture kind") {
    Rng rng(14);
    bool seen[3] = {false, false, false};
    for (int i = 0; i < 1000; ++i) {
      const auto m = sample_material(DatasetVariant::kRandTex, rng, "x", palette);
      REQUIRE(m.texture.has_value());
      seen[static_cast<int>(m.texture->kind)] = true;
    }
    CHECK(seen[0]);
    CHECK(seen[1]);
    CHECK(seen[2]);
  }
  SUBCASE("refined variant is rejected") {
    Rng rng(15);
    CHECK_THROWS_AS(sample_material(DatasetVariant::kFixRefined, rng, "x", palette),
                    std::invalid_argument);
  }
}

TEST_CASE("sample_scene: determinism and variant discipline") {
  const PartCatalog& catalog = demo_catalog();
  SceneParams params;
  params.settle.max_steps = 4000;

  SUBCASE("same (variant, seed, index) twice gives a structurally identical scene") {
    const SceneSpec a = sample_scene(DatasetVariant::kRandTex, catalog, 9, 2, params);
    const SceneSpec b = sample_scene(DatasetVariant::kRandTex, catalog, 9, 2, params);
    REQUIRE(a.instances.size() == b.instances.size());
    CHECK(a.frame_seed == b.frame_seed);
    for (std::size_t i = 0; i < a.instances.size(); ++i) {
      CHECK(a.instances[i].class_id == b.instances[i].class_id);
      CHECK(a.instances[i].pose.position == b.instances[i].pose.position);
      CHECK(norm(a.instances[i].pose.orientation.rotate({1, 0, 0}) -
                 b.instances[i].pose.orientation.rotate({1, 0, 0})) == 0.0);
      REQUIRE(a.instances[i].materials.size() == b.instances[i].materials.size());
      for (std::size_t g = 0; g < a.instances[i].materials.size(); ++g) {
        CHECK(a.instances[i].materials[g].base_color == b.instances[i].materials[g].base_color);
      }
    }
    REQUIRE(a.lights.size() == b.lights.size());
    CHECK(a.camera.position == b.camera.position);
  }

  SUBCASE("fixed variant: white untextured floor, neutral lights") {
    const SceneSpec scene = sample_scene(DatasetVariant::kFix, catalog, 5, 0, params);
    CHECK(scene.floor_material.base_color == Vec3{1, 1, 1});
    CHECK(!scene.floor_material.texture);
    for (const Light& l : scene.lights) CHECK(l.color == Vec3{1, 1, 1});
    for (const SceneInstance& inst : scene.instances) {
      for (const MaterialSpec& m : inst.materials) CHECK(!m.texture);
    }
  }

  SUBCASE("no texture appears in the no-texture variant either") {
    for (std::uint64_t index = 0; index < 3; ++index) {
      const SceneSpec scene = sample_scene(DatasetVariant::kRandNoTex, catalog, 6, index, params);
      CHECK(!scene.floor_material.texture);
      for (const SceneInstance& inst : scene.instances) {
        for (const MaterialSpec& m : inst.materials) CHECK(!m.texture);
      }
    }
  }

  SUBCASE("instance count stays within the multiset bounds") {
    for (std::uint64_t index = 0; index < 5; ++index) {
      const SceneSpec scene = sample_scene(DatasetVariant::kRandNoTex, catalog, 11, index, params);
      CHECK(scene.instances.size() >= 1);
      CHECK(scene.instances.size() <=
            static_cast<std::size_t>(12 * params.max_per_class));
      CHECK(scene.lights.size() >= 1);
    }
  }

  SUBCASE("refined variant is rejected") {
    CHECK_THROWS_AS(sample_scene(DatasetVariant::kFixRefined, catalog, 1, 0, params),
                    std::invalid_argument);
  }
}
