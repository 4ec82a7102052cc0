#pragma once

#include <array>
#include <vector>

#include "synthdet/mesh.hpp"
#include "synthdet/vec.hpp"

namespace synthdet {

struct ConvexHull {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;  // outward-oriented triangles

  Aabb bounds() const {
    Aabb b;
    for (const Vec3& v : vertices) b.expand(v);
    return b;
  }
};

// Quickhull over a point set. Requires at least 4 non-coplanar points;
// degenerate input raises std::runtime_error. Every input point ends up
// on or behind every face plane within 1e-9.
ConvexHull convex_hull(const std::vector<Vec3>& points);

inline ConvexHull convex_hull(const Mesh& mesh) { return convex_hull(mesh.vertices); }

// Farthest hull vertex along a direction (the support mapping).
int support_index(const ConvexHull& hull, const Vec3& dir);

// Uniform-density mass properties of the (closed, outward-oriented) hull.
// inertia is the isotropic scalar trace(I)/3 about the center of mass,
// per unit mass.
struct HullMassProperties {
  double volume = 0.0;
  Vec3 center_of_mass;
  double unit_inertia = 0.0;  // m^2; multiply by mass for the moment
};

HullMassProperties mass_properties(const ConvexHull& hull);

}  // namespace synthdet
