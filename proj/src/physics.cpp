#include "synthdet/physics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace synthdet {

namespace {

constexpr double kBounceSpeedThreshold = 0.5;  // m/s; slower impacts don't bounce
constexpr double kTwoPi = 6.283185307179586;

struct ContactPoint {
  int a = 0;
  int b = -1;            // -1 = floor
  Vec3 point;            // world
  Vec3 normal;           // pushes a along +normal
  double depth = 0.0;    // >0 = penetrating
  int floor_vertex = -1; // local vertex index for cheap refresh

  // solver state
  Vec3 r_a, r_b;
  Vec3 t1, t2;
  double normal_mass = 0.0, t1_mass = 0.0, t2_mass = 0.0;
  double target_vn = 0.0;
  double p_n = 0.0, p_t1 = 0.0, p_t2 = 0.0;
};

double inv_mass(const RigidBody& b) { return 1.0 / b.mass; }
double inv_inertia(const RigidBody& b) { return 1.0 / (b.mass * b.unit_inertia); }

std::vector<ContactPoint> detect_contacts(const std::vector<RigidBody>& bodies, double margin) {
  std::vector<ContactPoint> contacts;
  // Body-floor: every hull vertex below the margin.
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const RigidBody& body = bodies[i];
    for (std::size_t v = 0; v < body.hull.vertices.size(); ++v) {
      const Vec3 w = body.posed().world_point(body.hull.vertices[v]);
      if (w.z < margin) {
        ContactPoint c;
        c.a = static_cast<int>(i);
        c.b = -1;
        c.point = w;
        c.normal = {0, 0, 1};
        c.depth = -w.z;
        c.floor_vertex = static_cast<int>(v);
        contacts.push_back(c);
      }
    }
  }
  // Body-body: one EPA/GJK contact per close pair.
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const Aabb box_i = [&] {
      Aabb b;
      for (const Vec3& v : bodies[i].hull.vertices) b.expand(bodies[i].posed().world_point(v));
      return b;
    }();
    for (std::size_t j = i + 1; j < bodies.size(); ++j) {
      Aabb box_j;
      for (const Vec3& v : bodies[j].hull.vertices) box_j.expand(bodies[j].posed().world_point(v));
      if (!box_i.overlaps(box_j, margin)) continue;
      const ContactQuery q = closest_or_penetration(bodies[i].posed(), bodies[j].posed());
      if (q.depth > -margin) {
        ContactPoint c;
        c.a = static_cast<int>(i);
        c.b = static_cast<int>(j);
        c.point = (q.point_a + q.point_b) * 0.5;
        c.normal = q.normal;
        c.depth = q.depth;
        contacts.push_back(c);
      }
    }
  }
  return contacts;
}

Vec3 velocity_at(const RigidBody& b, const Vec3& r) {
  return b.pose.linear_velocity + cross(b.pose.angular_velocity, r);
}

void apply_impulse(RigidBody& b, const Vec3& impulse, const Vec3& r, double sign) {
  b.pose.linear_velocity += impulse * (sign * inv_mass(b));
  b.pose.angular_velocity += cross(r, impulse) * (sign * inv_inertia(b));
}

void prepare_contact(ContactPoint& c, const std::vector<RigidBody>& bodies, double restitution) {
  const RigidBody& a = bodies[c.a];
  c.r_a = c.point - a.com_world();
  double k = inv_mass(a) + inv_inertia(a) * norm_sq(cross(c.r_a, c.normal));
  Vec3 rel = velocity_at(a, c.r_a);
  if (c.b >= 0) {
    const RigidBody& b = bodies[c.b];
    c.r_b = c.point - b.com_world();
    k += inv_mass(b) + inv_inertia(b) * norm_sq(cross(c.r_b, c.normal));
    rel -= velocity_at(b, c.r_b);
  }
  c.normal_mass = k;

  const double vn0 = dot(rel, c.normal);
  c.target_vn = vn0 < -kBounceSpeedThreshold ? -restitution * vn0 : 0.0;

  // Tangent frame.
  Vec3 t = cross(c.normal, Vec3{1, 0, 0});
  if (norm_sq(t) < 1e-12) t = cross(c.normal, Vec3{0, 1, 0});
  c.t1 = normalized(t);
  c.t2 = cross(c.normal, c.t1);
  auto tangent_mass = [&](const Vec3& dir) {
    double m = inv_mass(a) + inv_inertia(a) * norm_sq(cross(c.r_a, dir));
    if (c.b >= 0) {
      const RigidBody& b = bodies[c.b];
      m += inv_mass(b) + inv_inertia(b) * norm_sq(cross(c.r_b, dir));
    }
    return m;
  };
  c.t1_mass = tangent_mass(c.t1);
  c.t2_mass = tangent_mass(c.t2);
}

void solve_velocity(std::vector<ContactPoint>& contacts, std::vector<RigidBody>& bodies,
                    const SettleParams& params) {
  for (ContactPoint& c : contacts) prepare_contact(c, bodies, params.restitution);

  for (int iter = 0; iter < params.velocity_iterations; ++iter) {
    for (ContactPoint& c : contacts) {
      RigidBody& a = bodies[c.a];
      RigidBody* b = c.b >= 0 ? &bodies[c.b] : nullptr;

      Vec3 rel = velocity_at(a, c.r_a);
      if (b) rel -= velocity_at(*b, c.r_b);
      const double vn = dot(rel, c.normal);
      double d_pn = -(vn - c.target_vn) / c.normal_mass;
      const double new_pn = std::max(0.0, c.p_n + d_pn);
      d_pn = new_pn - c.p_n;
      c.p_n = new_pn;
      const Vec3 pn_impulse = c.normal * d_pn;
      apply_impulse(a, pn_impulse, c.r_a, 1.0);
      if (b) apply_impulse(*b, pn_impulse, c.r_b, -1.0);

      const double max_friction = params.friction * c.p_n;
      for (int t = 0; t < 2; ++t) {
        const Vec3& dir = t == 0 ? c.t1 : c.t2;
        const double t_mass = t == 0 ? c.t1_mass : c.t2_mass;
        double& acc = t == 0 ? c.p_t1 : c.p_t2;
        Vec3 rel2 = velocity_at(a, c.r_a);
        if (b) rel2 -= velocity_at(*b, c.r_b);
        double d_pt = -dot(rel2, dir) / t_mass;
        const double new_pt = std::clamp(acc + d_pt, -max_friction, max_friction);
        d_pt = new_pt - acc;
        acc = new_pt;
        const Vec3 pt_impulse = dir * d_pt;
        apply_impulse(a, pt_impulse, c.r_a, 1.0);
        if (b) apply_impulse(*b, pt_impulse, c.r_b, -1.0);
      }
    }
  }
}

void correct_positions(std::vector<RigidBody>& bodies, const SettleParams& params) {
  const double slop = params.max_penetration;
  for (int pass = 0; pass < params.position_iterations; ++pass) {
    auto contacts = detect_contacts(bodies, slop);
    double max_depth = 0.0;
    for (const ContactPoint& c : contacts) max_depth = std::max(max_depth, c.depth);
    if (max_depth <= slop) break;

    for (const ContactPoint& c : contacts) {
      RigidBody& a = bodies[c.a];
      // Refresh the depth: earlier corrections in this pass may have
      // already moved the bodies.
      double depth;
      Vec3 normal = c.normal;
      if (c.b < 0) {
        depth = -a.posed().world_point(a.hull.vertices[c.floor_vertex]).z;
      } else {
        const ContactQuery q = closest_or_penetration(a.posed(), bodies[c.b].posed());
        depth = q.depth;
        normal = q.normal;
      }
      if (depth <= slop) continue;
      const double excess = depth - slop;
      if (c.b < 0) {
        a.pose.position += normal * excess;
      } else {
        RigidBody& b = bodies[c.b];
        const double w_a = inv_mass(a), w_b = inv_mass(b);
        const double total = w_a + w_b;
        a.pose.position += normal * (excess * w_a / total);
        b.pose.position -= normal * (excess * w_b / total);
      }
    }
  }
}

void step_in_place(WorldState& world, const SettleParams& params) {
  params.validate();
  const double dt = params.dt;

  for (RigidBody& b : world.bodies) b.pose.linear_velocity += kGravity * dt;

  auto contacts = detect_contacts(world.bodies, params.max_penetration);
  if (!contacts.empty()) solve_velocity(contacts, world.bodies, params);

  for (RigidBody& b : world.bodies) {
    Vec3 com = b.com_world() + b.pose.linear_velocity * dt;
    const Vec3& w = b.pose.angular_velocity;
    const Quat omega{0.0, w.x, w.y, w.z};
    const Quat dq = omega * b.pose.orientation;
    Quat q{b.pose.orientation.w + 0.5 * dt * dq.w, b.pose.orientation.x + 0.5 * dt * dq.x,
           b.pose.orientation.y + 0.5 * dt * dq.y, b.pose.orientation.z + 0.5 * dt * dq.z};
    b.pose.orientation = q.normalized();
    b.pose.position = com - b.pose.orientation.rotate(b.com_local);
  }

  correct_positions(world.bodies, params);

  world.time += dt;
  for (std::size_t i = 0; i < world.bodies.size(); ++i) {
    const PoseState& p = world.bodies[i].pose;
    if (!is_finite(p.position) || !is_finite(p.linear_velocity) ||
        !is_finite(p.angular_velocity) || !is_finite(p.orientation)) {
      throw std::runtime_error("physics: non-finite state at body " + std::to_string(i));
    }
  }
}

}  // namespace

void SettleParams::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("physics: dt must be positive");
  if (max_steps <= 0) throw std::invalid_argument("physics: max_steps must be positive");
  if (!(rest_lin_speed > 0.0) || !(rest_ang_speed > 0.0) || !(max_penetration > 0.0)) {
    throw std::invalid_argument("physics: thresholds must be positive");
  }
}

std::vector<PoseState> sample_initial_poses(const std::vector<int>& part_classes,
                                            const PartCatalog& catalog, Rng& rng,
                                            const Aabb& drop_region) {
  if (part_classes.empty()) throw std::invalid_argument("physics: empty parts list");
  if (!(drop_region.lo.z > 0.0)) {
    throw std::invalid_argument("physics: drop region must sit above the floor");
  }
  for (int cid : part_classes) catalog.by_id(cid);  // existence check

  std::vector<PoseState> poses;
  poses.reserve(part_classes.size());
  for (std::size_t i = 0; i < part_classes.size(); ++i) {
    PoseState pose;
    pose.position = {rng.uniform(drop_region.lo.x, drop_region.hi.x),
                     rng.uniform(drop_region.lo.y, drop_region.hi.y),
                     rng.uniform(drop_region.lo.z, drop_region.hi.z)};
    // Shoemake's subgroup method: uniform over the rotation group.
    const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
    const double s1 = std::sqrt(1.0 - u1), s2 = std::sqrt(u1);
    const double a1 = kTwoPi * u2, a2 = kTwoPi * u3;
    pose.orientation = Quat{s2 * std::cos(a2), s1 * std::sin(a1), s1 * std::cos(a1),
                            s2 * std::sin(a2)}.normalized();
    poses.push_back(pose);
  }
  return poses;
}

WorldState make_world(const PartCatalog& catalog, const std::vector<int>& class_ids,
                      const std::vector<PoseState>& poses) {
  if (class_ids.size() != poses.size()) {
    throw std::invalid_argument("physics: class/pose count mismatch");
  }
  if (class_ids.empty()) throw std::invalid_argument("physics: world needs at least one body");
  WorldState world;
  world.bodies.reserve(class_ids.size());
  for (std::size_t i = 0; i < class_ids.size(); ++i) {
    const PartClass& part = catalog.by_id(class_ids[i]);
    RigidBody body;
    body.class_id = part.class_id;
    body.hull = part.convex_proxy;
    body.mass = part.mass_kg;
    body.com_local = part.center_of_mass;
    body.unit_inertia = part.unit_inertia;
    body.pose = poses[i];
    world.bodies.push_back(std::move(body));
  }
  return world;
}

WorldState step(const WorldState& world, const SettleParams& params) {
  WorldState next = world;
  step_in_place(next, params);
  return next;
}

SettleResult settle(const WorldState& world, const SettleParams& params) {
  params.validate();
  WorldState current = world;
  SettleResult result;
  int quiet = 0;
  for (int s = 0; s < params.max_steps; ++s) {
    step_in_place(current, params);
    ++result.steps;
    bool at_rest = true;
    for (const RigidBody& b : current.bodies) {
      if (norm(b.pose.linear_velocity) >= params.rest_lin_speed ||
          norm(b.pose.angular_velocity) >= params.rest_ang_speed) {
        at_rest = false;
        break;
      }
    }
    quiet = at_rest ? quiet + 1 : 0;
    if (quiet >= 10) {
      result.converged = true;
      break;
    }
  }
  result.poses.reserve(current.bodies.size());
  for (const RigidBody& b : current.bodies) result.poses.push_back(b.pose);
  return result;
}

double mechanical_energy(const WorldState& world) {
  double e = 0.0;
  for (const RigidBody& b : world.bodies) {
    e += b.mass * (-kGravity.z) * b.com_world().z;
    e += 0.5 * b.mass * norm_sq(b.pose.linear_velocity);
    e += 0.5 * b.mass * b.unit_inertia * norm_sq(b.pose.angular_velocity);
  }
  return e;
}

double floor_penetration(const RigidBody& body) {
  double depth = -std::numeric_limits<double>::infinity();
  for (const Vec3& v : body.hull.vertices) {
    depth = std::max(depth, -body.posed().world_point(v).z);
  }
  return depth;
}

}  // namespace synthdet
