#pragma once

#include "synthdet/convex_hull.hpp"
#include "synthdet/vec.hpp"

namespace synthdet {

// A convex hull placed in the world: p_world = rotation * p_local + translation.
struct PosedHull {
  const ConvexHull* hull = nullptr;
  Quat rotation;
  Vec3 translation;

  Vec3 support(const Vec3& world_dir) const;
  Vec3 world_point(const Vec3& local) const { return rotation.rotate(local) + translation; }
};

// Result of the combined GJK (separated) / EPA (overlapping) query.
// normal points from b toward a: translating a by normal * depth resolves
// the overlap. For separated shapes depth is -distance and point_a/point_b
// are the closest pair.
struct ContactQuery {
  bool overlapping = false;
  double depth = 0.0;
  Vec3 normal;
  Vec3 point_a;
  Vec3 point_b;
};

ContactQuery closest_or_penetration(const PosedHull& a, const PosedHull& b);

// Signed depth: positive = overlap depth (EPA), nonpositive = separation
// distance negated (GJK). Symmetric in its arguments within 1e-9.
double penetration_depth(const PosedHull& a, const PosedHull& b);

}  // namespace synthdet
