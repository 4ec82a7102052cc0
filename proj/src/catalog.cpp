#include "synthdet/catalog.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "synthdet/obj_io.hpp"
#include "synthdet/stl_io.hpp"

namespace synthdet {

const PartClass& PartCatalog::by_id(int class_id) const {
  for (const PartClass& c : classes) {
    if (c.class_id == class_id) return c;
  }
  throw std::out_of_range("catalog: unknown class id " + std::to_string(class_id));
}

const PartClass* PartCatalog::find(const std::string& name) const {
  for (const PartClass& c : classes) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

PartCatalog load_catalog(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("catalog: cannot open " + manifest_path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("catalog: " + manifest_path.string() + ": " + e.what());
  }

  PartCatalog catalog;
  catalog.units_scale = doc.value("units_scale", 1.0);
  if (!(catalog.units_scale > 0.0)) {
    throw std::runtime_error("catalog: units_scale must be positive");
  }

  if (!doc.contains("parts") || !doc["parts"].is_array() || doc["parts"].empty()) {
    throw std::runtime_error("catalog: empty catalog");
  }

  const auto root = manifest_path.parent_path();
  std::set<std::string> names;
  int next_id = 1;
  for (const auto& entry : doc["parts"]) {
    PartClass part;
    part.class_id = next_id++;
    part.name = entry.at("name").get<std::string>();
    part.mass_kg = entry.at("mass_kg").get<double>();
    if (!names.insert(part.name).second) {
      throw std::runtime_error("catalog: duplicate part name '" + part.name + "'");
    }
    if (!(part.mass_kg > 0.0)) {
      throw std::runtime_error("catalog: part '" + part.name + "' needs a positive mass");
    }

    const std::string mesh_file = entry.at("mesh_file").get<std::string>();
    const auto mesh_path = root / mesh_file;
    if (!std::filesystem::exists(mesh_path)) {
      throw std::runtime_error("catalog: part '" + part.name + "': missing file " +
                               mesh_path.string());
    }
    try {
      const auto ext = mesh_path.extension().string();
      part.mesh = (ext == ".stl" || ext == ".STL") ? load_stl(mesh_path) : load_obj(mesh_path);
    } catch (const std::exception& e) {
      throw std::runtime_error("catalog: part '" + part.name + "' (" + mesh_file + "): " +
                               e.what());
    }

    for (Vec3& v : part.mesh.vertices) v *= catalog.units_scale;

    const ValidationReport report = validate_mesh(part.mesh);
    if (!report.ok()) {
      throw std::runtime_error("catalog: part '" + part.name + "' (" + mesh_file + "): " +
                               report.summary());
    }

    try {
      part.convex_proxy = convex_hull(part.mesh);
    } catch (const std::exception& e) {
      throw std::runtime_error("catalog: part '" + part.name + "' (" + mesh_file + "): " +
                               e.what());
    }
    const HullMassProperties props = mass_properties(part.convex_proxy);
    part.center_of_mass = props.center_of_mass;
    part.unit_inertia = props.unit_inertia;

    catalog.classes.push_back(std::move(part));
  }

  if (doc.contains("palette")) {
    for (const auto& [key, value] : doc["palette"].items()) {
      if (!value.is_array() || value.size() != 3) {
        throw std::runtime_error("catalog: palette entry '" + key + "' must be [r,g,b]");
      }
      catalog.fix_palette[key] = {value[0].get<double>(), value[1].get<double>(),
                                  value[2].get<double>()};
    }
  }
  return catalog;
}

}  // namespace synthdet
