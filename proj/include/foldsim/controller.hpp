#pragma once

#include <cmath>
#include <stdexcept>

#include "foldsim/estimator.hpp"
#include "foldsim/spatial.hpp"

namespace foldsim {

/// Force gain (m/s per N) and feedforward references for the folding motion.
struct ControllerGains {
  double k_f = 0.01;         // force control gain, (m/s)/N
  double f_d = 5.0;          // desired normal contact force, N
  double v_d_mag = 0.015;    // desired contact-point sliding speed, m/s
  double omega_d_mag = 0.05; // desired rod angular speed, rad/s
};

/// Task phases; transitions only ever advance Slide -> RotateOnly -> Done.
enum class Phase { Slide, RotateOnly, Done };

/// Velocity commands for both hands. The surface hand is the static sensing
/// fixture of the master-slave scheme, so twist2 is identically zero.
struct CommandTwist {
  Twist twist1{};
  Twist twist2{};
};

/// How the controller decides the rod has reached the wall.
enum class WallRule { Geometric, Force };

/// Task frame and switching thresholds, fixed per scenario.
struct ControllerConfig {
  Vec3 normal{0.0, 0.0, 1.0};    // believed outward surface normal (unit)
  Vec3 tangent{1.0, 0.0, 0.0};   // believed sliding direction (unit, orthogonal to normal)
  Vec3 rot_axis{0.0, -1.0, 0.0}; // in-plane rotation axis for omega_d
  Vec3 surface_anchor{Vec3::Zero()};
  double wall_offset = 0.35;          // wall plane distance along tangent from anchor, m
  WallRule wall_rule = WallRule::Geometric;
  double wall_margin = 0.005;         // geometric rule: fire within this of the wall, m
  double wall_force_threshold = 2.0;  // force rule: tangential force level, N
  int wall_force_ticks = 10;          // force rule: consecutive ticks above threshold
  double theta_target = 0.0;          // rod inclination ending the task, rad
  double theta_tol = 0.02;            // rad
  int hold_limit = 50;                // invalid-estimate ticks tolerated before fault
};

/// Controller memory owned by the caller; one tick in, one tick out.
struct ControllerState {
  Phase phase = Phase::Slide;
  ContactEstimate held{};  // last valid estimate (zero-order hold)
  int invalid_ticks = 0;
  int wall_force_ticks = 0;
  bool fault = false;
};

/// Error between desired and measured normal force magnitude. Positive means
/// force deficit; the reference generator then pushes along -n (into the
/// surface, n being outward) to restore contact.
inline double force_error(const Wrench& w2_filtered, const Vec3& n, double f_d) {
  require_finite(w2_filtered.force, "filtered force");
  require_finite(n, "surface normal");
  if (std::abs(n.norm() - 1.0) > k_unit_tol) {
    throw std::invalid_argument("surface normal must be a unit vector");
  }
  return f_d - std::abs(w2_filtered.force.dot(n));
}

/// Contact-point velocity reference v_d - k_f * f_e * n. The desired sliding
/// velocity must be tangential; its normal component is the force loop's.
inline Vec3 velocity_reference(const Vec3& v_d, double f_e, double k_f, const Vec3& n) {
  require_finite(v_d, "desired velocity");
  require_finite(n, "surface normal");
  if (std::abs(n.norm() - 1.0) > k_unit_tol) {
    throw std::invalid_argument("surface normal must be a unit vector");
  }
  if (std::abs(v_d.dot(n)) > 1e-6) {
    throw std::invalid_argument("desired sliding velocity must be tangential to the surface");
  }
  return v_d - k_f * f_e * n;
}

/// Cancels the lever term of the contact-point kinematics:
///   v1 = -w_ref x (p_c - p1) + v_ref,  w1 = w_ref,
/// so the contact point itself moves at v_ref when p_c is exact. The surface
/// hand stays still.
inline CommandTwist feedback_linearize(const Vec3& v_ref, const Vec3& omega_ref,
                                       const Vec3& p_c_est, const Vec3& p1) {
  require_finite(v_ref, "velocity reference");
  require_finite(omega_ref, "angular velocity reference");
  require_finite(p_c_est, "contact point estimate");
  require_finite(p1, "hand position");
  CommandTwist cmd;
  cmd.twist1.linear = -omega_ref.cross(p_c_est - p1) + v_ref;
  cmd.twist1.angular = omega_ref;
  return cmd;
}

struct ControllerStepResult {
  CommandTwist command{};
  ControllerState state{};
};

/// One 100 Hz control tick: hold or refresh the contact estimate, advance the
/// phase machine, and emit the feedback-linearized command.
///
/// An invalid estimate keeps the last valid one; after `hold_limit`
/// consecutive invalid ticks the task is abandoned as a contact-loss fault.
inline ControllerStepResult controller_step(const ControllerState& state_in,
                                            const ContactEstimate& fresh,
                                            const Wrench& w2_filtered,
                                            const Pose& pose1,
                                            const ControllerGains& gains,
                                            const ControllerConfig& cfg) {
  ControllerState st = state_in;

  if (fresh.valid) {
    st.held = fresh;
    st.invalid_ticks = 0;
  } else {
    ++st.invalid_ticks;
  }
  const ContactEstimate& est = st.held;

  if (st.phase != Phase::Done && st.invalid_ticks >= cfg.hold_limit) {
    st.phase = Phase::Done;
    st.fault = true;
  }

  // Phase transitions, strictly forward.
  if (st.phase == Phase::Slide) {
    bool wall_reached = false;
    if (cfg.wall_rule == WallRule::Geometric) {
      const double along = cfg.tangent.dot(est.p_c - cfg.surface_anchor);
      wall_reached = along >= cfg.wall_offset - cfg.wall_margin;
    } else {
      const double tangential = std::abs(cfg.tangent.dot(w2_filtered.force));
      st.wall_force_ticks = tangential > cfg.wall_force_threshold ? st.wall_force_ticks + 1 : 0;
      wall_reached = st.wall_force_ticks >= cfg.wall_force_ticks;
    }
    if (wall_reached) {
      st.phase = Phase::RotateOnly;
    }
  }
  if (st.phase == Phase::RotateOnly) {
    if (std::abs(est.theta_c - cfg.theta_target) <= cfg.theta_tol) {
      st.phase = Phase::Done;
    }
  }

  if (st.phase == Phase::Done) {
    return {CommandTwist{}, st};
  }

  const Vec3 v_d = st.phase == Phase::Slide ? Vec3(gains.v_d_mag * cfg.tangent) : Vec3(Vec3::Zero());
  const Vec3 omega_d = gains.omega_d_mag * cfg.rot_axis;
  const double f_e = force_error(w2_filtered, cfg.normal, gains.f_d);
  const Vec3 v_ref = velocity_reference(v_d, f_e, gains.k_f, cfg.normal);
  CommandTwist cmd = feedback_linearize(v_ref, omega_d, est.p_c, pose1.position);
  return {cmd, st};
}

}  // namespace foldsim
