#pragma once

#include <stdexcept>

#include "foldsim/spatial.hpp"

namespace foldsim {

/// Whether a grasped part can rotate relative to its end-effector.
enum class GraspMode { Rigid, NonRigid };

/// State of the contact joining the two parts. Broken carries empty bases.
enum class ContactMode { Sliding, Fixed, Broken };

/// Which part a constraint/wrench case refers to.
enum class PieceSide { Rod, Surface };

/// Rows annihilating the allowed twists [v; w] of one end-effector.
/// Rows are unit-normalized so residual magnitudes compare across cases.
using ConstraintRows = Eigen::Matrix<double, Eigen::Dynamic, 6>;

/// Columns spanning the reaction wrenches [f; tau] reciprocal to the allowed
/// twists; a multiplier vector lambda (N) scales columns into physical wrenches.
using ReactionWrenchBasis = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Velocity of a point rigidly attached to hand 1: v1 + w1 x (p_c - p1).
inline Vec3 contact_point_velocity(const Vec3& v1, const Vec3& omega1,
                                   const Vec3& p_c, const Vec3& p1) {
  require_finite(v1, "hand velocity");
  require_finite(omega1, "hand angular velocity");
  require_finite(p_c, "contact point");
  require_finite(p1, "hand position");
  return v1 + omega1.cross(p_c - p1);
}

namespace detail {

inline void check_case_inputs(ContactMode mode, GraspMode grasp, PieceSide side,
                              const Vec3& n, const Vec3& r) {
  if (side == PieceSide::Surface && grasp == GraspMode::NonRigid) {
    throw std::invalid_argument("non-rigid grasp is not modeled for the surface piece");
  }
  if (mode == ContactMode::Broken) {
    return;
  }
  require_finite(n, "surface normal");
  require_finite(r, "lever arm");
  if (std::abs(n.norm() - 1.0) > k_unit_tol) {
    throw std::invalid_argument("surface normal must be a unit vector");
  }
  if (mode == ContactMode::Fixed && grasp == GraspMode::NonRigid && r.norm() < 1e-9) {
    throw std::invalid_argument("degenerate geometry: fixed non-rigid case needs r != 0");
  }
}

}  // namespace detail

/// Velocity constraint rows for one (contact mode, grasp mode, side) case.
///
/// Sliding / non-rigid:  [n', 0]          (motion confined to the tangent plane)
/// Sliding / rigid:      [n', -n'S(r)]    (contact point slides on the surface)
/// Fixed   / non-rigid:  [r_hat', 0]      (hand stays on the sphere about p_c)
/// Fixed   / rigid:      [I, -S(r)]       (hand velocity slaved to rotation)
/// Broken:               no rows
///
/// The surface side mirrors the rod-side forms with r = r2; only a rigid
/// grasp is modeled for the surface piece.
inline ConstraintRows constraint_rows(ContactMode mode, GraspMode grasp, PieceSide side,
                                      const Vec3& n, const Vec3& r) {
  detail::check_case_inputs(mode, grasp, side, n, r);
  if (mode == ContactMode::Broken) {
    return ConstraintRows(0, 6);
  }
  ConstraintRows rows;
  if (mode == ContactMode::Sliding) {
    rows.resize(1, 6);
    if (grasp == GraspMode::NonRigid) {
      rows << n.transpose(), Eigen::RowVector3d::Zero();
    } else {
      rows << n.transpose(), -(skew(r).transpose() * n).transpose();
    }
  } else {  // Fixed
    if (grasp == GraspMode::NonRigid) {
      rows.resize(1, 6);
      const Vec3 r_hat = r.normalized();
      rows << r_hat.transpose(), Eigen::RowVector3d::Zero();
    } else {
      rows.resize(3, 6);
      rows << Mat3::Identity(), -skew(r);
    }
  }
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    rows.row(i).normalize();
  }
  return rows;
}

/// Reaction-wrench basis for one case; every column lies in the row space of
/// the matching constraint rows, so allowed twists produce zero power.
///
/// Sliding / non-rigid:  [n; 0]
/// Sliding / rigid:      [n; S(r)n]
/// Fixed   / non-rigid:  [r_hat; 0]
/// Fixed   / rigid:      [I; S(r)]   (force at the contact, torque r x f about the hand)
/// Broken:               empty
inline ReactionWrenchBasis reaction_wrench_basis(ContactMode mode, GraspMode grasp,
                                                 PieceSide side, const Vec3& n,
                                                 const Vec3& r) {
  detail::check_case_inputs(mode, grasp, side, n, r);
  if (mode == ContactMode::Broken) {
    return ReactionWrenchBasis(6, 0);
  }
  ReactionWrenchBasis basis;
  if (mode == ContactMode::Sliding) {
    basis.resize(6, 1);
    if (grasp == GraspMode::NonRigid) {
      basis << n, Vec3::Zero();
    } else {
      basis << n, r.cross(n);
    }
  } else {  // Fixed
    if (grasp == GraspMode::NonRigid) {
      basis.resize(6, 1);
      basis << r.normalized(), Vec3::Zero();
    } else {
      basis.resize(6, 3);
      basis << Mat3::Identity(), skew(r);
    }
  }
  return basis;
}

/// Physical wrench from a basis and its multiplier vector.
inline Wrench wrench_from_basis(const ReactionWrenchBasis& basis,
                                const Eigen::VectorXd& lambda) {
  if (lambda.size() != basis.cols()) {
    throw std::invalid_argument("multiplier size does not match basis columns");
  }
  const Eigen::Matrix<double, 6, 1> w = basis * lambda;
  return Wrench{w.head<3>(), w.tail<3>()};
}

}  // namespace foldsim
