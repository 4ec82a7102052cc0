#include "synthdet/randomizer.hpp"

namespace synthdet {

std::string to_string(DatasetVariant v) {
  switch (v) {
    case DatasetVariant::kFix: return "fix";
    case DatasetVariant::kRandNoTex: return "rand_no_tex";
    case DatasetVariant::kRandTex: return "rand_tex";
    case DatasetVariant::kFixRefined: return "fix_refined";
  }
  return "unknown";
}

DatasetVariant variant_from_string(const std::string& s) {
  if (s == "fix") return DatasetVariant::kFix;
  if (s == "rand_no_tex") return DatasetVariant::kRandNoTex;
  if (s == "rand_tex") return DatasetVariant::kRandTex;
  if (s == "fix_refined") return DatasetVariant::kFixRefined;
  throw std::invalid_argument("unknown dataset variant '" + s + "'");
}

namespace {

// Sub-group view that treats a group-less mesh as one region.
std::vector<SubGroup> regions_of(const Mesh& mesh) {
  if (!mesh.sub_groups.empty()) return mesh.sub_groups;
  return {{"default", 0, mesh.triangles.size()}};
}

}  // namespace

SceneSpec sample_scene(DatasetVariant variant, const PartCatalog& catalog,
                       std::uint64_t master_seed, std::uint64_t frame_index,
                       const SceneParams& params) {
  if (variant == DatasetVariant::kFixRefined) {
    throw std::invalid_argument("randomizer: refined variant is ingest-only");
  }
  if (catalog.classes.empty()) throw std::invalid_argument("randomizer: empty catalog");

  SceneSpec scene;
  scene.variant = variant;
  scene.frame_seed = derive_frame_seed(master_seed, frame_index);
  Rng rng(scene.frame_seed);

  // Random multiset of parts, at least one instance in total.
  std::vector<int> class_ids;
  while (class_ids.empty()) {
    for (const PartClass& part : catalog.classes) {
      const int count = static_cast<int>(rng.uniform_int(0, params.max_per_class));
      for (int k = 0; k < count; ++k) class_ids.push_back(part.class_id);
    }
  }

  // Drop and settle, with a bounded re-drop budget on non-convergence.
  SettleResult settled;
  bool ok = false;
  for (int attempt = 0; attempt <= params.settle_retries; ++attempt) {
    const auto poses = sample_initial_poses(class_ids, catalog, rng, params.drop_region);
    settled = settle(make_world(catalog, class_ids, poses), params.settle);
    if (settled.converged) { ok = true; break; }
  }
  if (!ok) {
    throw std::runtime_error("randomizer: settle did not converge for frame " +
                             std::to_string(frame_index));
  }

  scene.instances.reserve(class_ids.size());
  for (std::size_t i = 0; i < class_ids.size(); ++i) {
    SceneInstance inst;
    inst.class_id = class_ids[i];
    inst.pose = settled.poses[i];
    const PartClass& part = catalog.by_id(class_ids[i]);
    for (const SubGroup& group : regions_of(part.mesh)) {
      inst.materials.push_back(
          sample_material(variant, rng, part.name + ":" + group.name, catalog.fix_palette));
    }
    scene.instances.push_back(std::move(inst));
  }

  if (variant == DatasetVariant::kFix) {
    // Fixed-color images render on a white, untextured floor.
    scene.floor_material.base_color = {1.0, 1.0, 1.0};
    scene.floor_material.texture.reset();
    scene.floor_material.specular = 0.0;
    scene.floor_material.reflectivity = 0.0;
  } else {
    scene.floor_material = sample_material(variant, rng, "floor", catalog.fix_palette);
  }

  scene.lights = sample_lights(rng, params.light_count_min, params.light_count_max,
                               params.light_region, params.light_intensity_min,
                               params.light_intensity_max);
  if (variant == DatasetVariant::kFix) {
    // Color randomization is off in the fixed variant; lights stay neutral.
    for (Light& l : scene.lights) l.color = {1.0, 1.0, 1.0};
  }

  scene.camera = sample_camera(rng, params.camera_prism);
  return scene;
}

}  // namespace synthdet
