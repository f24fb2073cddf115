#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>

namespace foldsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Shared tolerance for orthonormality and unit-vector checks.
inline constexpr double k_orthonormal_tol = 1e-9;
inline constexpr double k_unit_tol = 1e-9;

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

inline void require_finite(const Vec3& v, const char* what) {
  if (!is_finite(v)) {
    throw std::invalid_argument(std::string(what) + " has non-finite components");
  }
}

/// Skew-symmetric matrix S(w) such that S(w)*x == w.cross(x).
inline Mat3 skew(const Vec3& w) {
  require_finite(w, "skew input");
  Mat3 s;
  s <<     0.0, -w.z(),  w.y(),
         w.z(),    0.0, -w.x(),
        -w.y(),  w.x(),    0.0;
  return s;
}

/// Max elementwise deviation of R'R from identity plus determinant defect.
inline double orthonormality_defect(const Mat3& m) {
  const double gram = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = std::abs(m.determinant() - 1.0);
  return std::max(gram, det);
}

/// Rotation matrix kept orthonormal (R'R = I, det = +1) by construction.
class Rot3 {
 public:
  Rot3() : m_(Mat3::Identity()) {}

  static Rot3 identity() { return Rot3(); }

  /// Validates orthonormality within 1e-9; throws std::invalid_argument otherwise.
  static Rot3 from_matrix(const Mat3& m) {
    if (!m.allFinite()) {
      throw std::invalid_argument("rotation matrix has non-finite entries");
    }
    if (orthonormality_defect(m) > k_orthonormal_tol) {
      throw std::invalid_argument("matrix is not a rotation (orthonormality defect > 1e-9)");
    }
    return Rot3(m, unchecked_tag{});
  }

  /// Rodrigues rotation about a unit axis.
  static Rot3 from_axis_angle(const Vec3& axis, double angle) {
    require_finite(axis, "rotation axis");
    if (std::abs(axis.norm() - 1.0) > k_unit_tol) {
      throw std::invalid_argument("rotation axis must be a unit vector");
    }
    const Mat3 k = skew(axis);
    const Mat3 m = Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
    return Rot3(renormalized(m), unchecked_tag{});
  }

  const Mat3& matrix() const { return m_; }

  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  Rot3 operator*(const Rot3& other) const {
    return Rot3(renormalized(m_ * other.m_), unchecked_tag{});
  }

  Rot3 transpose() const { return Rot3(m_.transpose(), unchecked_tag{}); }

  double defect() const { return orthonormality_defect(m_); }

 private:
  struct unchecked_tag {};
  Rot3(const Mat3& m, unchecked_tag) : m_(m) {}

  // Quaternion round trip pulls the product back onto SO(3) at machine precision.
  static Mat3 renormalized(const Mat3& m) {
    Eigen::Quaterniond q(m);
    q.normalize();
    return q.toRotationMatrix();
  }

  Mat3 m_;

  friend Rot3 integrate_rotation(const Rot3&, const Vec3&, double);
};

/// Position (m) and orientation of a frame.
struct Pose {
  Vec3 position{Vec3::Zero()};
  Rot3 orientation{};
};

/// Linear (m/s) and angular (rad/s) velocity, stacked [linear; angular].
struct Twist {
  Vec3 linear{Vec3::Zero()};
  Vec3 angular{Vec3::Zero()};

  static Twist zero() { return {}; }
};

/// Force (N) and torque (N*m), stacked [force; torque].
struct Wrench {
  Vec3 force{Vec3::Zero()};
  Vec3 torque{Vec3::Zero()};

  static Wrench zero() { return {}; }
};

/// One step of Rdot = S(w)R using the closed-form exponential map, so the
/// result stays on SO(3) regardless of step size or chain length.
inline Rot3 integrate_rotation(const Rot3& r, const Vec3& omega, double dt) {
  require_finite(omega, "angular velocity");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("integration step dt must be positive and finite");
  }
  const Vec3 w = omega * dt;
  const double angle = w.norm();
  Mat3 delta;
  if (angle < 1e-12) {
    delta = Mat3::Identity() + skew(w);
  } else {
    const Mat3 k = skew(w / angle);
    delta = Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
  }
  return Rot3(Rot3::renormalized(delta * r.matrix()), Rot3::unchecked_tag{});
}

/// Component of x orthogonal to the unit normal n: (I - n n') x.
inline Vec3 project_tangent(const Vec3& x, const Vec3& n) {
  require_finite(x, "project_tangent input");
  require_finite(n, "surface normal");
  if (std::abs(n.norm() - 1.0) > k_unit_tol) {
    throw std::invalid_argument("surface normal must be a unit vector");
  }
  return x - n.dot(x) * n;
}

}  // namespace foldsim
