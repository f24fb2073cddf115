#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include "foldsim/controller.hpp"
#include "foldsim/kinetostatics.hpp"
#include "foldsim/spatial.hpp"

namespace foldsim {

/// Rigid rod grasped by hand 1; the tip is a fixed point in the hand frame,
/// so |p_tip - p1| stays at the rod length for the whole run.
struct RodModel {
  double length = 0.15;            // m, grasp point to tip
  Vec3 tip_offset{Vec3::Zero()};   // tip position in the hand-1 frame, m
};

/// Static surface piece: a plane through `anchor` with outward normal and a
/// one-sided wall at `wall_offset` along the tangent that ends the slide.
struct SurfaceModel {
  Vec3 anchor{Vec3::Zero()};
  Vec3 normal{0.0, 0.0, 1.0};
  Vec3 tangent{1.0, 0.0, 0.0};
  double wall_offset = 0.35;  // m along tangent from anchor
  double extent = 0.40;       // m, informational bound of the plane patch
};

/// Penalty contact: spring-damper normal force, regularized Coulomb friction.
struct ContactParams {
  double k_n = 6000.0;            // normal stiffness, N/m
  double c_n = 50.0;              // normal damping, N*s/m
  double mu = 0.3;                // Coulomb friction coefficient
  double stick_velocity = 1e-5;   // tangential speed below which contact sticks, m/s
  double eps_sep = 1e-4;          // separation hysteresis before Broken, m
  double max_penetration = 5e-3;  // instability guard, m
};

/// Additive per-axis Gaussian sensor noise; one seed, one reproducible stream.
struct SensorModel {
  double sigma_f = 0.05;     // N per axis
  double sigma_tau = 0.02;   // N*m per axis
  std::uint64_t seed = 12345;
};

struct PlantModel {
  RodModel rod{};
  SurfaceModel surface{};
  ContactParams contact{};
  double actuator_tau = 0.0;  // first-order lag of hand 1's velocity loop, s (0 = ideal)
};

/// Ground-truth world state. f_c is the contact force acting on the surface
/// piece; the rod feels -f_c.
struct SimState {
  Pose pose1{};
  Pose pose2{};
  Twist hand1_twist{};              // realized hand-1 twist after actuator lag
  Vec3 tip{Vec3::Zero()};           // rod tip in world, m
  Vec3 tip_velocity{Vec3::Zero()};  // rod tip velocity, m/s
  Vec3 p_c_true{Vec3::Zero()};      // tangent-plane projection of the tip, m
  Vec3 f_c{Vec3::Zero()};           // total contact force on the surface piece, N
  double f_normal = 0.0;            // normal force magnitude on the rod, N
  Vec3 f_friction{Vec3::Zero()};    // surface friction force on the rod, N
  Vec3 f_wall{Vec3::Zero()};        // wall reaction force on the rod, N
  ContactMode mode = ContactMode::Fixed;
  double penetration = 0.0;         // surface overlap, m (>= 0)
  double separation = 0.0;          // signed height of the tip above the plane, m
  double time = 0.0;                // s
};

class simulation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Contact resolution for the current tip position/velocity. Keeps the
/// previous mode inside the grazing band (0 < separation <= eps_sep) so the
/// mode does not chatter right at the surface.
inline void resolve_contact(SimState& st, const PlantModel& plant) {
  const SurfaceModel& surf = plant.surface;
  const ContactParams& c = plant.contact;
  const Vec3& n = surf.normal;

  const double sep = n.dot(st.tip - surf.anchor);
  const double pen = std::max(0.0, -sep);
  if (pen > c.max_penetration) {
    throw simulation_error(
        "contact penetration exceeded the instability guard; "
        "check normal stiffness against the force setpoint and gains");
  }

  const double pen_rate = -n.dot(st.tip_velocity);
  double f_n = 0.0;
  if (pen > 0.0) {
    f_n = std::max(0.0, c.k_n * pen + c.c_n * pen_rate);
  }

  const Vec3 v_t = st.tip_velocity - n.dot(st.tip_velocity) * n;
  const double v_t_norm = v_t.norm();
  Vec3 f_t = Vec3::Zero();
  bool slipping = false;
  if (f_n > 0.0 && v_t_norm > 0.0) {
    slipping = v_t_norm >= c.stick_velocity;
    if (slipping) {
      f_t = -c.mu * f_n * v_t / v_t_norm;
    } else {
      f_t = -c.mu * f_n * v_t / c.stick_velocity;
    }
  }

  // One-sided wall at the end of the surface piece, active near the plane.
  Vec3 f_w = Vec3::Zero();
  const double wall_pen = surf.tangent.dot(st.tip - surf.anchor) - surf.wall_offset;
  if (wall_pen > 0.0 && sep <= c.eps_sep) {
    const double wall_rate = surf.tangent.dot(st.tip_velocity);
    const double f_w_mag = std::max(0.0, c.k_n * wall_pen + c.c_n * wall_rate);
    f_w = -f_w_mag * surf.tangent;
  }

  const Vec3 force_on_rod = f_n * n + f_t + f_w;

  st.separation = sep;
  st.penetration = pen;
  st.f_normal = f_n;
  st.f_friction = f_t;
  st.f_wall = f_w;
  st.f_c = -force_on_rod;
  st.p_c_true = st.tip - sep * n;

  if (sep > c.eps_sep) {
    st.mode = ContactMode::Broken;
  } else if (f_n > 0.0) {
    st.mode = slipping ? ContactMode::Sliding : ContactMode::Fixed;
  }
  // else: grazing band, previous mode kept.
}

}  // namespace detail

/// Advances the world by dt under the commanded hand twists. Hand 1 tracks
/// its twist exactly unless an actuator time constant is configured; hand 2
/// never moves.
inline SimState physics_step(const SimState& state, const CommandTwist& command,
                             const PlantModel& plant, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("physics step dt must be positive and finite");
  }
  require_finite(command.twist1.linear, "commanded linear velocity");
  require_finite(command.twist1.angular, "commanded angular velocity");

  SimState st = state;
  if (plant.actuator_tau > 0.0) {
    const double alpha = dt / (plant.actuator_tau + dt);
    st.hand1_twist.linear += alpha * (command.twist1.linear - st.hand1_twist.linear);
    st.hand1_twist.angular += alpha * (command.twist1.angular - st.hand1_twist.angular);
  } else {
    st.hand1_twist = command.twist1;
  }
  st.pose1.position += st.hand1_twist.linear * dt;
  st.pose1.orientation = integrate_rotation(st.pose1.orientation, st.hand1_twist.angular, dt);
  st.tip = st.pose1.position + st.pose1.orientation * plant.rod.tip_offset;
  st.tip_velocity = st.hand1_twist.linear +
                    st.hand1_twist.angular.cross(st.tip - st.pose1.position);
  st.time = state.time + dt;

  detail::resolve_contact(st, plant);
  return st;
}

/// Synthesizes the hand-2 force/torque measurement: the contact force
/// transmitted through the rigid surface piece, with its torque taken about
/// the hand-2 frame at the projected contact point, plus seeded Gaussian
/// noise per axis.
class WrenchSensor {
 public:
  explicit WrenchSensor(const SensorModel& model) : model_(model), rng_(model.seed) {}

  Wrench sense(const SimState& state) {
    Wrench w;
    w.force = state.f_c + model_.sigma_f * gaussian3();
    w.torque = (state.p_c_true - state.pose2.position).cross(state.f_c) +
               model_.sigma_tau * gaussian3();
    return w;
  }

 private:
  Vec3 gaussian3() {
    return Vec3(normal_(rng_), normal_(rng_), normal_(rng_));
  }

  SensorModel model_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace foldsim
