#include <doctest.h>

#include "synthdet/convex_hull.hpp"
#include "synthdet/rng.hpp"
#include "test_util.hpp"

using namespace synthdet;

namespace {

// Brute-force soundness: every point behind every face plane within tol.
void check_contains_all(const ConvexHull& hull, const std::vector<Vec3>& points, double tol) {
  for (const auto& f : hull.faces) {
    const Vec3& a = hull.vertices[f[0]];
    const Vec3 n = normalized(cross(hull.vertices[f[1]] - a, hull.vertices[f[2]] - a));
    for (const Vec3& p : points) {
      CHECK(dot(n, p - a) <= tol);
    }
  }
}

}  // namespace

TEST_CASE("convex_hull: unit cube is its own hull (8 vertices, 12 faces)") {
  const std::vector<Vec3> cube = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                  {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  const ConvexHull hull = convex_hull(cube);
  CHECK(hull.vertices.size() == 8);
  CHECK(hull.faces.size() == 12);
  check_contains_all(hull, cube, 1e-9);
}

TEST_CASE("convex_hull: interior point is absent from the hull") {
  std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                           {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
                           {0.5, 0.5, 0.5}};
  const ConvexHull hull = convex_hull(pts);
  CHECK(hull.vertices.size() == 8);
  for (const Vec3& v : hull.vertices) {
    CHECK(norm(v - Vec3{0.5, 0.5, 0.5}) > 1e-9);
  }
}

TEST_CASE("convex_hull: 100 random points in the unit ball are contained within 1e-9") {
  Rng rng(123);
  std::vector<Vec3> pts;
  while (pts.size() < 100) {
    const Vec3 p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (norm_sq(p) <= 1.0) pts.push_back(p);
  }
  const ConvexHull hull = convex_hull(pts);
  check_contains_all(hull, pts, 1e-9);
}

TEST_CASE("convex_hull: degenerate input raises") {
  CHECK_THROWS(convex_hull(std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}));
  // coplanar
  CHECK_THROWS(convex_hull(
      std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.3, 0.4, 0}}));
  // collinear
  CHECK_THROWS(convex_hull(
      std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}}));
}

TEST_CASE("convex_hull: soundness holds for every demo part") {
  for (const PartClass& part : testutil::demo_catalog().classes) {
    check_contains_all(part.convex_proxy, part.mesh.vertices, 1e-9);
  }
}

TEST_CASE("convex_hull: random point clouds stay sound (property)") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Vec3> pts;
    const int n = static_cast<int>(rng.uniform_int(4, 60));
    const double scale = rng.uniform(0.01, 0.5);
    for (int i = 0; i < n; ++i) {
      pts.push_back({rng.uniform(-scale, scale), rng.uniform(-scale, scale),
                     rng.uniform(-scale, scale)});
    }
    ConvexHull hull;
    try {
      hull = convex_hull(pts);
    } catch (const std::runtime_error&) {
      continue;  // degenerate draw
    }
    check_contains_all(hull, pts, 1e-9);
    // closed 2-manifold: Euler characteristic 2 for triangulated sphere
    CHECK(static_cast<int>(hull.vertices.size()) - 3 * static_cast<int>(hull.faces.size()) / 2 +
              static_cast<int>(hull.faces.size()) == 2);
  }
}

TEST_CASE("mass_properties: unit cube analytics") {
  const std::vector<Vec3> cube = {{-0.5, -0.5, -0.5}, {0.5, -0.5, -0.5}, {0.5, 0.5, -0.5},
                                  {-0.5, 0.5, -0.5},  {-0.5, -0.5, 0.5}, {0.5, -0.5, 0.5},
                                  {0.5, 0.5, 0.5},    {-0.5, 0.5, 0.5}};
  const auto props = mass_properties(convex_hull(cube));
  CHECK(props.volume == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(norm(props.center_of_mass) == doctest::Approx(0.0).epsilon(1e-12));
  // cube inertia about its center: a^2 / 6 per unit mass, isotropic
  CHECK(props.unit_inertia == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("mass_properties: translation moves only the center of mass") {
  Rng rng(5);
  std::vector<Vec3> pts;
  for (int i = 0; i < 40; ++i) {
    pts.push_back({rng.uniform(-0.03, 0.03), rng.uniform(-0.03, 0.03),
                   rng.uniform(-0.03, 0.03)});
  }
  const Vec3 offset{0.2, -0.1, 0.35};
  const auto base = mass_properties(convex_hull(pts));
  for (Vec3& p : pts) p += offset;
  const auto moved = mass_properties(convex_hull(pts));
  CHECK(moved.volume == doctest::Approx(base.volume).epsilon(1e-9));
  CHECK(norm(moved.center_of_mass - base.center_of_mass - offset) ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK(moved.unit_inertia == doctest::Approx(base.unit_inertia).epsilon(1e-9));
}
