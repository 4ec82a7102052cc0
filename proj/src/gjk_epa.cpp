#include "synthdet/gjk_epa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace synthdet {

namespace {

struct SupportPoint {
  Vec3 w;   // Minkowski difference point, pa - pb
  Vec3 pa;  // witness on a
  Vec3 pb;  // witness on b
};

SupportPoint minkowski_support(const PosedHull& a, const PosedHull& b, const Vec3& dir) {
  const Vec3 pa = a.support(dir);
  const Vec3 pb = b.support(-dir);
  return {pa - pb, pa, pb};
}

struct Simplex {
  std::array<SupportPoint, 4> pts;
  std::array<double, 4> bary{};
  int size = 0;

  void push(const SupportPoint& p) { pts[size++] = p; }
  void set(std::initializer_list<int> keep, std::initializer_list<double> lambdas) {
    std::array<SupportPoint, 4> tmp;
    int n = 0;
    for (int i : keep) tmp[n++] = pts[i];
    pts = tmp;
    size = n;
    int k = 0;
    for (double l : lambdas) bary[k++] = l;
  }
};

// Closest point to the origin on the current simplex. Reduces the simplex
// to its supporting feature and fills barycentric weights. Returns true
// when the origin is contained (tetrahedron case).
bool closest_on_simplex(Simplex& s, Vec3& closest) {
  switch (s.size) {
    case 1: {
      s.bary[0] = 1.0;
      closest = s.pts[0].w;
      return false;
    }
    case 2: {
      const Vec3 a = s.pts[0].w, b = s.pts[1].w;
      const Vec3 ab = b - a;
      const double denom = dot(ab, ab);
      double t = denom > 0.0 ? -dot(a, ab) / denom : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      if (t <= 0.0) {
        s.set({0}, {1.0});
        closest = a;
      } else if (t >= 1.0) {
        s.set({1}, {1.0});
        closest = b;
      } else {
        s.set({0, 1}, {1.0 - t, t});
        closest = a + ab * t;
      }
      return false;
    }
    case 3: {
      const Vec3 a = s.pts[0].w, b = s.pts[1].w, c = s.pts[2].w;
      const Vec3 ab = b - a, ac = c - a, ap = -a;
      const double d1 = dot(ab, ap), d2 = dot(ac, ap);
      if (d1 <= 0.0 && d2 <= 0.0) { s.set({0}, {1.0}); closest = a; return false; }
      const Vec3 bp = -b;
      const double d3 = dot(ab, bp), d4 = dot(ac, bp);
      if (d3 >= 0.0 && d4 <= d3) { s.set({1}, {1.0}); closest = b; return false; }
      const double vc = d1 * d4 - d3 * d2;
      if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double t = d1 / (d1 - d3);
        s.set({0, 1}, {1.0 - t, t});
        closest = a + ab * t;
        return false;
      }
      const Vec3 cp = -c;
      const double d5 = dot(ab, cp), d6 = dot(ac, cp);
      if (d6 >= 0.0 && d5 <= d6) { s.set({2}, {1.0}); closest = c; return false; }
      const double vb = d5 * d2 - d1 * d6;
      if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double t = d2 / (d2 - d6);
        s.set({0, 2}, {1.0 - t, t});
        closest = a + ac * t;
        return false;
      }
      const double va = d3 * d6 - d5 * d4;
      if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        s.set({1, 2}, {1.0 - t, t});
        closest = b + (c - b) * t;
        return false;
      }
      const double denom = 1.0 / (va + vb + vc);
      const double v = vb * denom, w = vc * denom;
      s.set({0, 1, 2}, {1.0 - v - w, v, w});
      closest = a + ab * v + ac * w;
      return false;
    }
    case 4: {
      // Check the origin against each face; recurse into the closest
      // violated face, or report containment.
      static constexpr int kFaces[4][3] = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
      double best_dist = std::numeric_limits<double>::infinity();
      Simplex best;
      Vec3 best_closest;
      bool outside_any = false;
      for (const auto& face : kFaces) {
        const Vec3 a = s.pts[face[0]].w, b = s.pts[face[1]].w, c = s.pts[face[2]].w;
        const Vec3 n = cross(b - a, c - a);
        const double sign_origin = dot(n, -a);
        // The fourth vertex lies on the inside of the face plane.
        int opposite = 0 + 1 + 2 + 3 - face[0] - face[1] - face[2];
        const double sign_opposite = dot(n, s.pts[opposite].w - a);
        if (sign_origin * sign_opposite < 0.0) {
          outside_any = true;
          Simplex tri;
          tri.pts[0] = s.pts[face[0]];
          tri.pts[1] = s.pts[face[1]];
          tri.pts[2] = s.pts[face[2]];
          tri.size = 3;
          Vec3 cp;
          closest_on_simplex(tri, cp);
          const double d = norm_sq(cp);
          if (d < best_dist) {
            best_dist = d;
            best = tri;
            best_closest = cp;
          }
        }
      }
      if (!outside_any) return true;  // origin enclosed
      s = best;
      closest = best_closest;
      return false;
    }
  }
  return false;
}

constexpr int kGjkMaxIterations = 64;
constexpr int kEpaMaxIterations = 128;

struct EpaFace {
  std::array<int, 3> v;
  Vec3 normal;   // unit, outward
  double dist;   // distance of the plane from the origin
  bool dead = false;
};

bool make_epa_face(const std::vector<SupportPoint>& verts, int a, int b, int c, EpaFace& out) {
  const Vec3 n = cross(verts[b].w - verts[a].w, verts[c].w - verts[a].w);
  const double len = norm(n);
  if (len < 1e-18) return false;
  out.v = {a, b, c};
  out.normal = n / len;
  out.dist = dot(out.normal, verts[a].w);
  return true;
}

// Grows a possibly degenerate GJK termination simplex into a proper
// tetrahedron around the origin region so EPA can start.
bool expand_to_tetrahedron(const PosedHull& a, const PosedHull& b, Simplex& s) {
  static const Vec3 axes[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                               {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  if (s.size == 1) {
    for (const Vec3& d : axes) {
      const SupportPoint p = minkowski_support(a, b, d);
      if (norm_sq(p.w - s.pts[0].w) > 1e-18) { s.push(p); break; }
    }
    if (s.size < 2) return false;
  }
  if (s.size == 2) {
    const Vec3 dir = s.pts[1].w - s.pts[0].w;
    // Any axis not parallel to the segment gives a perpendicular probe.
    Vec3 axis{1, 0, 0};
    if (std::abs(dir.x) >= std::abs(dir.y) && std::abs(dir.x) >= std::abs(dir.z)) axis = {0, 1, 0};
    const Vec3 perp = normalized(cross(dir, axis));
    for (const Vec3& d : {perp, -perp, normalized(cross(dir, perp)), -normalized(cross(dir, perp))}) {
      const SupportPoint p = minkowski_support(a, b, d);
      if (norm(cross(s.pts[1].w - s.pts[0].w, p.w - s.pts[0].w)) > 1e-18) { s.push(p); break; }
    }
    if (s.size < 3) return false;
  }
  if (s.size == 3) {
    const Vec3 n = cross(s.pts[1].w - s.pts[0].w, s.pts[2].w - s.pts[0].w);
    const SupportPoint p1 = minkowski_support(a, b, n);
    if (std::abs(dot(n, p1.w - s.pts[0].w)) > 1e-18) {
      s.push(p1);
    } else {
      const SupportPoint p2 = minkowski_support(a, b, -n);
      if (std::abs(dot(n, p2.w - s.pts[0].w)) > 1e-18) s.push(p2);
    }
    if (s.size < 4) return false;
  }
  return true;
}

ContactQuery epa(const PosedHull& a, const PosedHull& b, const Simplex& seed) {
  std::vector<SupportPoint> verts(seed.pts.begin(), seed.pts.begin() + seed.size);
  std::vector<EpaFace> faces;

  // Seed tetra with outward faces (flip against the centroid).
  const Vec3 centroid = (verts[0].w + verts[1].w + verts[2].w + verts[3].w) * 0.25;
  static constexpr int kFaces[4][3] = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
  for (const auto& f : kFaces) {
    EpaFace face;
    if (!make_epa_face(verts, f[0], f[1], f[2], face)) continue;
    if (dot(face.normal, centroid - verts[f[0]].w) > 0.0) {
      std::swap(face.v[1], face.v[2]);
      face.normal = -face.normal;
      face.dist = -face.dist;
    }
    faces.push_back(face);
  }
  if (faces.size() < 4) return {};  // degenerate seed; caller treats as no contact

  const EpaFace* result = nullptr;
  EpaFace best_so_far;
  for (int iter = 0; iter < kEpaMaxIterations; ++iter) {
    // Closest face to the origin.
    int fi = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < faces.size(); ++k) {
      if (!faces[k].dead && faces[k].dist < best) { best = faces[k].dist; fi = static_cast<int>(k); }
    }
    if (fi < 0) break;
    best_so_far = faces[fi];

    const SupportPoint w = minkowski_support(a, b, faces[fi].normal);
    const double growth = dot(faces[fi].normal, w.w) - faces[fi].dist;
    if (growth < 1e-10) {
      result = &best_so_far;
      break;
    }

    // Expand: remove faces visible from w, stitch the horizon.
    const int wi = static_cast<int>(verts.size());
    verts.push_back(w);
    std::vector<std::pair<int, int>> edges;
    for (EpaFace& f : faces) {
      if (f.dead) continue;
      if (dot(f.normal, w.w - verts[f.v[0]].w) > 1e-12) {
        f.dead = true;
        for (int k = 0; k < 3; ++k) {
          const int u = f.v[k], v = f.v[(k + 1) % 3];
          // A directed edge cancels against its reverse.
          auto it = std::find(edges.begin(), edges.end(), std::make_pair(v, u));
          if (it != edges.end()) {
            edges.erase(it);
          } else {
            edges.emplace_back(u, v);
          }
        }
      }
    }
    bool grew = false;
    for (const auto& [u, v] : edges) {
      EpaFace face;
      if (make_epa_face(verts, u, v, wi, face)) {
        faces.push_back(face);
        grew = true;
      }
    }
    if (!grew) {
      result = &best_so_far;
      break;
    }
  }
  if (result == nullptr) result = &best_so_far;

  // Witness points: barycentrics of the origin's projection on the face.
  const SupportPoint& pa = verts[result->v[0]];
  const SupportPoint& pb = verts[result->v[1]];
  const SupportPoint& pc = verts[result->v[2]];
  const Vec3 proj = result->normal * result->dist;
  const Vec3 e0 = pb.w - pa.w, e1 = pc.w - pa.w, e2 = proj - pa.w;
  const double d00 = dot(e0, e0), d01 = dot(e0, e1), d11 = dot(e1, e1);
  const double d20 = dot(e2, e0), d21 = dot(e2, e1);
  const double denom = d00 * d11 - d01 * d01;
  double v = 0.0, w = 0.0;
  if (std::abs(denom) > 1e-18) {
    v = (d11 * d20 - d01 * d21) / denom;
    w = (d00 * d21 - d01 * d20) / denom;
  }
  v = std::clamp(v, 0.0, 1.0);
  w = std::clamp(w, 0.0, 1.0 - v);
  const double u = 1.0 - v - w;

  ContactQuery q;
  q.overlapping = true;
  q.depth = std::max(0.0, result->dist);
  q.normal = -result->normal;
  q.point_a = pa.pa * u + pb.pa * v + pc.pa * w;
  q.point_b = pa.pb * u + pb.pb * v + pc.pb * w;
  return q;
}

}  // namespace

Vec3 PosedHull::support(const Vec3& world_dir) const {
  // Rotate the direction into the hull frame, pick the extreme vertex,
  // map it back to world space.
  const Quat inv{rotation.w, -rotation.x, -rotation.y, -rotation.z};
  const Vec3 local_dir = inv.rotate(world_dir);
  const int idx = support_index(*hull, local_dir);
  return world_point(hull->vertices[idx]);
}

ContactQuery closest_or_penetration(const PosedHull& a, const PosedHull& b) {
  Vec3 dir = b.translation - a.translation;
  if (norm_sq(dir) < 1e-24) dir = {1, 0, 0};

  Simplex simplex;
  simplex.push(minkowski_support(a, b, dir));

  Vec3 v = simplex.pts[0].w;
  bool enclosed = false;
  for (int iter = 0; iter < kGjkMaxIterations; ++iter) {
    if (closest_on_simplex(simplex, v)) {
      enclosed = true;
      break;
    }
    const double vsq = norm_sq(v);
    if (vsq < 1e-20) {  // touching: boundary case, resolve via EPA
      enclosed = true;
      break;
    }
    const SupportPoint w = minkowski_support(a, b, -v);
    if (vsq - dot(v, w.w) <= 1e-12 * std::max(1.0, vsq)) break;  // no progress
    bool duplicate = false;
    for (int i = 0; i < simplex.size; ++i) {
      if (norm_sq(simplex.pts[i].w - w.w) < 1e-24) { duplicate = true; break; }
    }
    if (duplicate) break;
    simplex.push(w);
  }

  if (enclosed) {
    Simplex seed = simplex;
    if (seed.size < 4 && !expand_to_tetrahedron(a, b, seed)) {
      // Could not build a volume around the origin; treat as touching.
      ContactQuery q;
      q.overlapping = true;
      q.depth = 0.0;
      q.normal = {0, 0, 1};
      q.point_a = q.point_b = simplex.pts[0].pa;
      return q;
    }
    return epa(a, b, seed);
  }

  ContactQuery q;
  q.overlapping = false;
  Vec3 pa{}, pb{};
  for (int i = 0; i < simplex.size; ++i) {
    pa += simplex.pts[i].pa * simplex.bary[i];
    pb += simplex.pts[i].pb * simplex.bary[i];
  }
  q.point_a = pa;
  q.point_b = pb;
  q.depth = -norm(v);
  q.normal = norm_sq(v) > 0.0 ? normalized(v) : Vec3{0, 0, 1};
  return q;
}

double penetration_depth(const PosedHull& a, const PosedHull& b) {
  return closest_or_penetration(a, b).depth;
}

}  // namespace synthdet
