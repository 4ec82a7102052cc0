#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "synthdet/vec.hpp"

namespace synthdet {

struct RenderTriangle {
  Vec3 v0, v1, v2;       // world space
  Vec3 n0, n1, n2;       // per-vertex shading normals (valid when smooth)
  bool smooth = false;
  std::uint16_t instance_id = 0;  // 0 = floor/background
  int material = 0;               // index into the scene's flat material list

  Aabb bounds() const {
    Aabb b;
    b.expand(v0);
    b.expand(v1);
    b.expand(v2);
    return b;
  }
  Vec3 centroid() const { return (v0 + v1 + v2) / 3.0; }
  Vec3 geometric_normal() const { return normalized(cross(v1 - v0, v2 - v0)); }
};

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length
  Vec3 at(double t) const { return origin + dir * t; }
};

struct Hit {
  double t = 0.0;
  int tri = -1;                  // index into the original triangle array
  std::uint16_t instance_id = 0;
  double u = 0.0, v = 0.0;       // barycentrics of v1 and v2
};

constexpr double kRayTMin = 1e-6;

// Median-split BVH on the longest node axis, at most 4 triangles per leaf.
struct Bvh {
  struct Node {
    Aabb box;
    int left = -1;
    int right = -1;
    int first = 0;  // into tri_order for leaves
    int count = 0;  // > 0 marks a leaf
    bool is_leaf() const { return count > 0; }
  };
  std::vector<Node> nodes;
  std::vector<int> tri_order;
};

Bvh build_bvh(std::span<const RenderTriangle> triangles);

// Watertight enough for this scale: Moller-Trumbore per triangle, nearest
// t > kRayTMin, ties broken toward the lower triangle index. Identical to
// a linear scan over the same triangles.
std::optional<Hit> intersect(const Ray& ray, const Bvh& bvh,
                             std::span<const RenderTriangle> triangles);

// True when any triangle blocks (kRayTMin, t_max).
bool occluded(const Ray& ray, double t_max, const Bvh& bvh,
              std::span<const RenderTriangle> triangles);

// Single-triangle test shared by traversal and the brute-force oracle.
std::optional<Hit> intersect_triangle(const Ray& ray, const RenderTriangle& tri, int index);

}  // namespace synthdet
