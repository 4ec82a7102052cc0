#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "synthdet/convex_hull.hpp"
#include "synthdet/mesh.hpp"

namespace synthdet {

struct PartClass {
  int class_id = 0;  // 1-based, unique within the catalog
  std::string name;
  Mesh mesh;               // meters
  ConvexHull convex_proxy;
  double mass_kg = 0.0;
  Vec3 center_of_mass;     // of the convex proxy, uniform density
  double unit_inertia = 0.0;
};

struct PartCatalog {
  std::vector<PartClass> classes;
  double units_scale = 1.0;
  // Fixed per-region colors for the non-randomized dataset variant.
  // Keys are "<part>" or "<part>:<sub_group>".
  std::map<std::string, Vec3> fix_palette;

  const PartClass& by_id(int class_id) const;
  const PartClass* find(const std::string& name) const;
};

// Loads the catalog manifest (JSON: units_scale, parts[{name, mesh_file,
// mass_kg}], optional palette). Mesh paths resolve relative to the
// manifest's directory; class ids are assigned 1..N in manifest order.
PartCatalog load_catalog(const std::filesystem::path& manifest_path);

}  // namespace synthdet
