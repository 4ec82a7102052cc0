#pragma once

#include <cstdint>
#include <vector>

#include "synthdet/catalog.hpp"
#include "synthdet/gjk_epa.hpp"
#include "synthdet/rng.hpp"
#include "synthdet/vec.hpp"

namespace synthdet {

struct PoseState {
  Vec3 position;               // world position of the body's local origin
  Quat orientation{1, 0, 0, 0};
  Vec3 linear_velocity;        // of the center of mass, m/s
  Vec3 angular_velocity;       // world frame, rad/s
};

struct RigidBody {
  int class_id = 0;
  ConvexHull hull;             // collision proxy, local frame
  double mass = 1.0;           // kg
  PoseState pose;
  Vec3 com_local;              // center of mass in the local frame
  double unit_inertia = 0.0;   // isotropic moment per unit mass, m^2

  PosedHull posed() const { return {&hull, pose.orientation, pose.position}; }
  Vec3 com_world() const { return pose.orientation.rotate(com_local) + pose.position; }
};

constexpr Vec3 kGravity{0.0, 0.0, -9.81};  // floor is the plane z = 0

struct WorldState {
  std::vector<RigidBody> bodies;
  double time = 0.0;
};

struct SettleParams {
  double dt = 1.0 / 240.0;
  double restitution = 0.05;
  double friction = 0.6;
  double rest_lin_speed = 1e-3;   // m/s
  double rest_ang_speed = 1e-2;   // rad/s
  int max_steps = 5000;
  double max_penetration = 1e-4;  // m; also the contact slop
  int velocity_iterations = 8;
  int position_iterations = 16;

  void validate() const;
};

struct SettleResult {
  std::vector<PoseState> poses;
  int steps = 0;
  bool converged = false;
};

// Uniform poses inside the drop region (which must sit above the floor):
// positions uniform in the box, orientations uniform over rotations,
// velocities zero.
std::vector<PoseState> sample_initial_poses(const std::vector<int>& part_classes,
                                            const PartCatalog& catalog, Rng& rng,
                                            const Aabb& drop_region);

WorldState make_world(const PartCatalog& catalog, const std::vector<int>& class_ids,
                      const std::vector<PoseState>& poses);

// One fixed-dt advance: semi-implicit Euler with impulse contacts
// (restitution + Coulomb friction) and positional projection that leaves
// every contact within params.max_penetration.
WorldState step(const WorldState& world, const SettleParams& params);

// Steps until every body stays below the rest speeds for 10 consecutive
// steps, or max_steps elapse.
SettleResult settle(const WorldState& world, const SettleParams& params);

// Sum of gravitational and kinetic energy; the quantity that may never
// increase across a contact-free step.
double mechanical_energy(const WorldState& world);

// Largest floor penetration of a body (positive = below the plane).
double floor_penetration(const RigidBody& body);

}  // namespace synthdet
