#include "synthdet/mesh.hpp"

#include <sstream>

namespace synthdet {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

ValidationReport validate_mesh(const Mesh& mesh) {
  ValidationReport report;
  const int n = static_cast<int>(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!is_finite(mesh.vertices[i])) report.non_finite_vertices.push_back(i);
  }
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    bool in_range = true;
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= n) {
        report.out_of_range_triangles.push_back(t);
        in_range = false;
        break;
      }
    }
    if (!in_range) continue;
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      report.degenerate_triangles.push_back(t);
      continue;
    }
    const Vec3 &a = mesh.vertices[tri[0]], &b = mesh.vertices[tri[1]], &c = mesh.vertices[tri[2]];
    if (!is_finite(a) || !is_finite(b) || !is_finite(c)) continue;  // already reported per vertex
    if (triangle_area(a, b, c) <= kDegenerateTriangleArea) {
      report.degenerate_triangles.push_back(t);
    }
  }
  return report;
}

std::string ValidationReport::summary() const {
  if (ok()) return "mesh valid";
  std::ostringstream os;
  os << degenerate_triangles.size() << " degenerate triangle(s), "
     << non_finite_vertices.size() << " non-finite vertex/vertices, "
     << out_of_range_triangles.size() << " out-of-range triangle(s)";
  return os.str();
}

std::string write_obj(const Mesh& mesh) {
  std::ostringstream os;
  os.precision(17);
  for (const Vec3& v : mesh.vertices) {
    os << "v " << v.x << " " << v.y << " " << v.z << "\n";
  }
  if (mesh.has_normals()) {
    for (const Vec3& n : mesh.normals) {
      os << "vn " << n.x << " " << n.y << " " << n.z << "\n";
    }
  }
  auto emit_face = [&](std::size_t t) {
    const auto& tri = mesh.triangles[t];
    os << "f";
    for (int k = 0; k < 3; ++k) {
      const int idx = tri[k] + 1;  // OBJ is 1-based
      if (mesh.has_normals()) {
        os << " " << idx << "//" << idx;
      } else {
        os << " " << idx;
      }
    }
    os << "\n";
  };
  if (mesh.sub_groups.empty()) {
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) emit_face(t);
  } else {
    for (const SubGroup& g : mesh.sub_groups) {
      os << "usemtl " << g.name << "\n";
      for (std::size_t t = g.first_tri; t < g.first_tri + g.tri_count; ++t) emit_face(t);
    }
  }
  return os.str();
}

}  // namespace synthdet
