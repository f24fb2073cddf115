#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "foldsim/spatial.hpp"

namespace foldsim {

/// Moving average over the last `window` wrench samples. Warm-up averages the
/// samples seen so far instead of padding with zeros, which would bend the
/// first readings toward zero force.
class WrenchFilter {
 public:
  explicit WrenchFilter(std::size_t window = 5) : window_(window) {
    if (window_ == 0) {
      throw std::invalid_argument("filter window must be positive");
    }
    buffer_.reserve(window_);
  }

  /// Pushes one sample and returns the current mean.
  Wrench step(const Wrench& sample) {
    require_finite(sample.force, "wrench force sample");
    require_finite(sample.torque, "wrench torque sample");
    if (buffer_.size() < window_) {
      buffer_.push_back(sample);
    } else {
      buffer_[next_] = sample;
      next_ = (next_ + 1) % window_;
    }
    return mean();
  }

  /// Mean of the retained samples; zero before any sample arrives.
  Wrench mean() const {
    if (buffer_.empty()) {
      return Wrench::zero();
    }
    Vec3 f = Vec3::Zero();
    Vec3 t = Vec3::Zero();
    for (const Wrench& w : buffer_) {
      f += w.force;
      t += w.torque;
    }
    const double inv = 1.0 / static_cast<double>(buffer_.size());
    return Wrench{f * inv, t * inv};
  }

  std::size_t window() const { return window_; }
  std::size_t samples_seen() const { return buffer_.size(); }

 private:
  std::size_t window_;
  std::size_t next_ = 0;
  std::vector<Wrench> buffer_;
};

/// Contact geometry recovered from the surface-hand wrench. When `valid` is
/// false the caller should keep using its previous estimate.
struct ContactEstimate {
  Vec3 r2{Vec3::Zero()};      // lever arm from hand 2 to the contact (m)
  Vec3 p_c{Vec3::Zero()};     // contact point (m)
  double theta_c = 0.0;       // rod inclination (rad), positive toward +n
  bool valid = false;
};

/// Minimum normal force magnitude (N) below which the lever-arm division
/// amplifies noise without bound and the estimate is flagged invalid.
inline constexpr double k_default_f_min = 0.5;

/// Lever arm r2 from tau2 = r2 x f2, as the tangent-plane direction of the
/// minimum-norm solution (f x tau)/|f|^2 scaled to |tau| / |f'n|.
/// Returns nullopt when the normal force is below f_min or the direction is
/// ambiguous. A zero-torque wrench locates the contact at the hand origin.
inline std::optional<Vec3> estimate_r2(const Wrench& w2, const Vec3& n,
                                       double f_min = k_default_f_min) {
  require_finite(w2.force, "measured force");
  require_finite(w2.torque, "measured torque");
  require_finite(n, "surface normal");
  if (std::abs(n.norm() - 1.0) > k_unit_tol) {
    throw std::invalid_argument("surface normal must be a unit vector");
  }
  const double f_normal = std::abs(w2.force.dot(n));
  if (f_normal < f_min) {
    return std::nullopt;
  }
  const double magnitude = w2.torque.norm() / f_normal;
  if (magnitude < 1e-12) {
    return Vec3::Zero();
  }
  const Vec3 direction = w2.force.cross(w2.torque) / w2.force.squaredNorm();
  const Vec3 tangent = project_tangent(direction, n);
  if (tangent.norm() < 1e-12) {
    return std::nullopt;
  }
  return magnitude * tangent.normalized();
}

/// Rod inclination relative to the surface: atan2(n'r1 * |r2|, r2'r1).
/// The |r2| factor cancels, so the angle only depends on the r2 direction.
inline double estimate_theta(const Vec3& r1, const Vec3& r2, const Vec3& n) {
  require_finite(r1, "rod lever arm");
  require_finite(r2, "surface lever arm");
  require_finite(n, "surface normal");
  const double r2_norm = r2.norm();
  if (r2_norm < 1e-9) {
    throw std::domain_error("rod inclination undefined: |r2| ~ 0");
  }
  return std::atan2(n.dot(r1) * r2_norm, r2.dot(r1));
}

/// Full contact estimate from the filtered surface-hand wrench. p_c follows
/// from p2 + r2 and theta from r1 = p_c - p1 evaluated at the same tick. On an
/// invalid lever arm the previous estimate's fields are carried over (when
/// given) with valid = false.
inline ContactEstimate estimate_contact(const Wrench& w2_filtered, const Pose& pose2,
                                        const Vec3& n, const Vec3& p1,
                                        double f_min = k_default_f_min,
                                        const ContactEstimate* previous = nullptr) {
  require_finite(p1, "hand 1 position");
  const std::optional<Vec3> r2 = estimate_r2(w2_filtered, n, f_min);
  if (!r2) {
    ContactEstimate out = previous ? *previous : ContactEstimate{};
    out.valid = false;
    return out;
  }
  ContactEstimate out;
  out.r2 = *r2;
  out.p_c = pose2.position + out.r2;
  const Vec3 r1 = out.p_c - p1;
  if (out.r2.norm() < 1e-9 || r1.norm() < 1e-12) {
    // Contact collapsed onto a hand origin: lever arm fine, angle meaningless.
    out.theta_c = previous ? previous->theta_c : 0.0;
  } else {
    out.theta_c = estimate_theta(r1, out.r2, n);
  }
  out.valid = true;
  return out;
}

}  // namespace foldsim
