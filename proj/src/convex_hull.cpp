#include "synthdet/convex_hull.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace synthdet {

namespace {

struct QhFace {
  std::array<int, 3> v;
  std::array<int, 3> nb{-1, -1, -1};  // neighbor across edge (v[i], v[i+1])
  Vec3 normal;
  double offset = 0.0;
  std::vector<int> outside;
  bool dead = false;
};

Vec3 face_normal(const std::vector<Vec3>& pts, const std::array<int, 3>& v) {
  return normalized(cross(pts[v[1]] - pts[v[0]], pts[v[2]] - pts[v[0]]));
}

double signed_dist(const QhFace& f, const Vec3& p) { return dot(f.normal, p) - f.offset; }

void set_plane(QhFace& f, const std::vector<Vec3>& pts) {
  f.normal = face_normal(pts, f.v);
  f.offset = dot(f.normal, pts[f.v[0]]);
}

// Rebuilds neighbor links across all alive faces via directed-edge matching.
void link_neighbors(std::vector<QhFace>& faces) {
  std::map<std::pair<int, int>, std::pair<int, int>> edge_owner;  // (u,v) -> (face, slot)
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    if (faces[fi].dead) continue;
    for (int k = 0; k < 3; ++k) {
      const int u = faces[fi].v[k], v = faces[fi].v[(k + 1) % 3];
      edge_owner[{u, v}] = {static_cast<int>(fi), k};
    }
  }
  for (auto& [edge, owner] : edge_owner) {
    const auto twin = edge_owner.find({edge.second, edge.first});
    if (twin == edge_owner.end()) throw std::runtime_error("convex_hull: open edge in hull");
    faces[owner.first].nb[owner.second] = twin->second.first;
  }
}

}  // namespace

ConvexHull convex_hull(const std::vector<Vec3>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 4) throw std::runtime_error("convex_hull: need at least 4 points");
  for (const Vec3& p : points) {
    if (!is_finite(p)) throw std::runtime_error("convex_hull: non-finite input point");
  }

  Aabb box;
  for (const Vec3& p : points) box.expand(p);
  const double diag = norm(box.extent());
  const double eps = 1e-10 * std::max(1.0, diag);

  // Initial simplex: span of the extremes.
  int e0 = 0, e1 = 0;
  {
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int i = 1; i < n; ++i) {
      for (int a = 0; a < 3; ++a) {
        if (points[i][a] < points[lo[a]][a]) lo[a] = i;
        if (points[i][a] > points[hi[a]][a]) hi[a] = i;
      }
    }
    double best = -1.0;
    for (int a = 0; a < 3; ++a) {
      const double d = norm_sq(points[hi[a]] - points[lo[a]]);
      if (d > best) { best = d; e0 = lo[a]; e1 = hi[a]; }
    }
    if (best <= eps * eps) throw std::runtime_error("convex_hull: degenerate input (single point)");
  }
  int e2 = -1;
  {
    double best = eps;
    const Vec3 dir = normalized(points[e1] - points[e0]);
    for (int i = 0; i < n; ++i) {
      const Vec3 rel = points[i] - points[e0];
      const double d = norm(rel - dir * dot(rel, dir));
      if (d > best) { best = d; e2 = i; }
    }
    if (e2 < 0) throw std::runtime_error("convex_hull: degenerate input (collinear points)");
  }
  int e3 = -1;
  {
    const Vec3 nrm = normalized(cross(points[e1] - points[e0], points[e2] - points[e0]));
    double best = eps;
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(dot(nrm, points[i] - points[e0]));
      if (d > best) { best = d; e3 = i; }
    }
    if (e3 < 0) throw std::runtime_error("convex_hull: degenerate input (coplanar points)");
  }

  std::vector<QhFace> faces;
  auto add_face = [&](int a, int b, int c, int opposite) {
    QhFace f;
    f.v = {a, b, c};
    set_plane(f, points);
    if (signed_dist(f, points[opposite]) > 0.0) {
      std::swap(f.v[1], f.v[2]);
      set_plane(f, points);
    }
    faces.push_back(std::move(f));
  };
  add_face(e0, e1, e2, e3);
  add_face(e0, e1, e3, e2);
  add_face(e0, e2, e3, e1);
  add_face(e1, e2, e3, e0);
  link_neighbors(faces);

  // Assign each point to the first face it lies strictly outside of.
  for (int i = 0; i < n; ++i) {
    if (i == e0 || i == e1 || i == e2 || i == e3) continue;
    for (QhFace& f : faces) {
      if (signed_dist(f, points[i]) > eps) {
        f.outside.push_back(i);
        break;
      }
    }
  }

  const int max_iterations = 4 * n + 64;
  for (int iter = 0; iter < max_iterations; ++iter) {
    // Face with pending outside points.
    int fi = -1;
    for (std::size_t k = 0; k < faces.size(); ++k) {
      if (!faces[k].dead && !faces[k].outside.empty()) { fi = static_cast<int>(k); break; }
    }
    if (fi < 0) break;

    // Eye = farthest outside point of that face.
    int eye = faces[fi].outside[0];
    double best = signed_dist(faces[fi], points[eye]);
    for (int p : faces[fi].outside) {
      const double d = signed_dist(faces[fi], points[p]);
      if (d > best) { best = d; eye = p; }
    }
    const Vec3 eye_pt = points[eye];

    // Visible region: BFS over neighbors from the seed face.
    std::vector<int> visible;
    std::vector<int> stack{fi};
    std::vector<char> seen(faces.size(), 0);
    seen[fi] = 1;
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      visible.push_back(cur);
      for (int k = 0; k < 3; ++k) {
        const int nb = faces[cur].nb[k];
        if (nb >= 0 && !seen[nb] && !faces[nb].dead &&
            signed_dist(faces[nb], eye_pt) > eps) {
          seen[nb] = 1;
          stack.push_back(nb);
        }
      }
    }

    // Horizon: directed edges of visible faces whose twin was not reached
    // by the BFS (treating disconnected "visible" faces as hidden keeps
    // the horizon a closed loop).
    std::vector<std::pair<int, int>> horizon;
    std::vector<int> orphans;
    for (int vf : visible) {
      for (int k = 0; k < 3; ++k) {
        const int nb = faces[vf].nb[k];
        if (nb < 0 || !seen[nb]) {
          horizon.emplace_back(faces[vf].v[k], faces[vf].v[(k + 1) % 3]);
        }
      }
      orphans.insert(orphans.end(), faces[vf].outside.begin(), faces[vf].outside.end());
      faces[vf].dead = true;
      faces[vf].outside.clear();
    }

    // Cone of new faces over the horizon loop, keeping the winding the
    // visible face used so normals stay outward.
    std::vector<int> new_faces;
    for (const auto& [u, v] : horizon) {
      QhFace f;
      f.v = {u, v, eye};
      set_plane(f, points);
      new_faces.push_back(static_cast<int>(faces.size()));
      faces.push_back(std::move(f));
    }
    link_neighbors(faces);

    for (int p : orphans) {
      if (p == eye) continue;
      for (int nf : new_faces) {
        if (signed_dist(faces[nf], points[p]) > eps) {
          faces[nf].outside.push_back(p);
          break;
        }
      }
    }
  }

  // Compact to the final hull; vertices keep input order.
  std::vector<int> remap(n, -1);
  ConvexHull hull;
  std::vector<int> used;
  for (const QhFace& f : faces) {
    if (f.dead) continue;
    for (int v : f.v) {
      if (remap[v] < 0) { remap[v] = 0; used.push_back(v); }
    }
  }
  std::sort(used.begin(), used.end());
  for (std::size_t i = 0; i < used.size(); ++i) remap[used[i]] = static_cast<int>(i);
  hull.vertices.reserve(used.size());
  for (int v : used) hull.vertices.push_back(points[v]);
  for (const QhFace& f : faces) {
    if (f.dead) continue;
    hull.faces.push_back({remap[f.v[0]], remap[f.v[1]], remap[f.v[2]]});
  }
  return hull;
}

int support_index(const ConvexHull& hull, const Vec3& dir) {
  int best = 0;
  double best_dot = dot(hull.vertices[0], dir);
  for (int i = 1; i < static_cast<int>(hull.vertices.size()); ++i) {
    const double d = dot(hull.vertices[i], dir);
    if (d > best_dot) { best_dot = d; best = i; }
  }
  return best;
}

HullMassProperties mass_properties(const ConvexHull& hull) {
  // Signed tetrahedra against the origin; valid because the surface is
  // closed and consistently oriented.
  double volume = 0.0;
  Vec3 first_moment;        // integral of position
  double second_moment = 0.0;  // integral of |r|^2
  for (const auto& f : hull.faces) {
    const Vec3 &a = hull.vertices[f[0]], &b = hull.vertices[f[1]], &c = hull.vertices[f[2]];
    const double det = dot(a, cross(b, c));  // 6 * signed tetra volume
    volume += det / 6.0;
    first_moment += (a + b + c) * (det / 24.0);
    // integral of x^2+y^2+z^2 over the tetra (0,a,b,c)
    const double sq = dot(a, a) + dot(b, b) + dot(c, c) + dot(a, b) + dot(a, c) + dot(b, c);
    second_moment += det / 60.0 * sq;
  }
  if (volume <= 0.0) throw std::runtime_error("convex_hull: non-positive hull volume");
  HullMassProperties props;
  props.volume = volume;
  props.center_of_mass = first_moment / volume;
  // Shift |r|^2 integral to the center of mass, then isotropic scalar:
  // trace(I)/3 = (2/3) * E[|r - com|^2] per unit mass.
  const double r2_com = second_moment / volume - norm_sq(props.center_of_mass);
  props.unit_inertia = (2.0 / 3.0) * r2_com;
  return props;
}

}  // namespace synthdet
