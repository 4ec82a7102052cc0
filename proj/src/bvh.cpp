#include "synthdet/bvh.hpp"

#include <algorithm>
#include <stdexcept>

namespace synthdet {

namespace {

int build_node(Bvh& bvh, std::span<const RenderTriangle> tris, int first, int count) {
  const int node_index = static_cast<int>(bvh.nodes.size());
  bvh.nodes.emplace_back();
  Aabb box;
  for (int i = first; i < first + count; ++i) box.expand(tris[bvh.tri_order[i]].bounds());
  bvh.nodes[node_index].box = box;

  if (count <= 4) {
    bvh.nodes[node_index].first = first;
    bvh.nodes[node_index].count = count;
    return node_index;
  }

  const Vec3 extent = box.extent();
  int axis = 0;
  if (extent.y > extent.x) axis = 1;
  if (extent.z > extent[axis]) axis = 2;

  // Sort (not nth_element) for a fully deterministic ordering on ties.
  std::sort(bvh.tri_order.begin() + first, bvh.tri_order.begin() + first + count,
            [&](int a, int b) {
              const double ca = tris[a].centroid()[axis];
              const double cb = tris[b].centroid()[axis];
              return ca < cb || (ca == cb && a < b);
            });
  const int half = count / 2;

  const int left = build_node(bvh, tris, first, half);
  const int right = build_node(bvh, tris, first + half, count - half);
  bvh.nodes[node_index].left = left;
  bvh.nodes[node_index].right = right;
  return node_index;
}

// Slab test; returns entry distance or infinity on miss.
double box_enter(const Aabb& box, const Ray& ray, const Vec3& inv_dir, double t_max) {
  double t0 = kRayTMin, t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    const double lo = (box.lo[a] - ray.origin[a]) * inv_dir[a];
    const double hi = (box.hi[a] - ray.origin[a]) * inv_dir[a];
    const double tn = std::min(lo, hi);
    const double tf = std::max(lo, hi);
    t0 = std::max(t0, tn);
    t1 = std::min(t1, tf);
    if (t0 > t1) return std::numeric_limits<double>::infinity();
  }
  return t0;
}

}  // namespace

std::optional<Hit> intersect_triangle(const Ray& ray, const RenderTriangle& tri, int index) {
  const Vec3 e1 = tri.v1 - tri.v0;
  const Vec3 e2 = tri.v2 - tri.v0;
  const Vec3 p = cross(ray.dir, e2);
  const double det = dot(e1, p);
  if (std::abs(det) < 1e-18) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 tvec = ray.origin - tri.v0;
  const double u = dot(tvec, p) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = cross(tvec, e1);
  const double v = dot(ray.dir, q) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = dot(e2, q) * inv_det;
  if (t <= kRayTMin) return std::nullopt;
  Hit hit;
  hit.t = t;
  hit.tri = index;
  hit.instance_id = tri.instance_id;
  hit.u = u;
  hit.v = v;
  return hit;
}

Bvh build_bvh(std::span<const RenderTriangle> triangles) {
  if (triangles.empty()) throw std::invalid_argument("bvh: empty scene geometry");
  Bvh bvh;
  bvh.tri_order.resize(triangles.size());
  for (std::size_t i = 0; i < triangles.size(); ++i) bvh.tri_order[i] = static_cast<int>(i);
  bvh.nodes.reserve(2 * triangles.size());
  build_node(bvh, triangles, 0, static_cast<int>(triangles.size()));
  return bvh;
}

std::optional<Hit> intersect(const Ray& ray, const Bvh& bvh,
                             std::span<const RenderTriangle> triangles) {
  if (bvh.nodes.empty()) return std::nullopt;
  const Vec3 inv_dir{1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z};

  std::optional<Hit> best;
  double best_t = std::numeric_limits<double>::infinity();

  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Bvh::Node& node = bvh.nodes[stack[--top]];
    if (box_enter(node.box, ray, inv_dir, best_t) > best_t) continue;
    if (node.is_leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int tri_index = bvh.tri_order[i];
        const auto hit = intersect_triangle(ray, triangles[tri_index], tri_index);
        if (!hit) continue;
        if (hit->t < best_t || (hit->t == best_t && (!best || hit->tri < best->tri))) {
          best_t = hit->t;
          best = hit;
        }
      }
    } else {
      // Near child first; the tie-break comparison keeps the result
      // independent of visit order anyway.
      const double dl = box_enter(bvh.nodes[node.left].box, ray, inv_dir, best_t);
      const double dr = box_enter(bvh.nodes[node.right].box, ray, inv_dir, best_t);
      if (dl <= dr) {
        if (dr < std::numeric_limits<double>::infinity()) stack[top++] = node.right;
        if (dl < std::numeric_limits<double>::infinity()) stack[top++] = node.left;
      } else {
        if (dl < std::numeric_limits<double>::infinity()) stack[top++] = node.left;
        if (dr < std::numeric_limits<double>::infinity()) stack[top++] = node.right;
      }
    }
  }
  return best;
}

bool occluded(const Ray& ray, double t_max, const Bvh& bvh,
              std::span<const RenderTriangle> triangles) {
  if (bvh.nodes.empty()) return false;
  const Vec3 inv_dir{1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z};
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Bvh::Node& node = bvh.nodes[stack[--top]];
    if (box_enter(node.box, ray, inv_dir, t_max) == std::numeric_limits<double>::infinity()) {
      continue;
    }
    if (node.is_leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int tri_index = bvh.tri_order[i];
        const auto hit = intersect_triangle(ray, triangles[tri_index], tri_index);
        if (hit && hit->t < t_max) return true;
      }
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return false;
}

}  // namespace synthdet
