// Independent reference implementations used to pin expected values. These
// deliberately avoid the library's own code paths (and Eigen's geometry
// helpers where they are the thing under test).
#pragma once

#include <random>

#include "foldsim/spatial.hpp"

namespace oracles {

using foldsim::Vec3;

/// Componentwise cross product.
inline Vec3 cross_oracle(const Vec3& a, const Vec3& b) {
  return Vec3(a.y() * b.z() - a.z() * b.y(),
              a.z() * b.x() - a.x() * b.z(),
              a.x() * b.y() - a.y() * b.x());
}

/// Rotates v about the unit axis k by angle using the vector form
/// v cos + (k x v) sin + k (k.v)(1 - cos); no matrices involved.
inline Vec3 rodrigues_rotate(const Vec3& k, double angle, const Vec3& v) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return v * c + cross_oracle(k, v) * s + k * (k.dot(v)) * (1.0 - c);
}

inline Vec3 random_vec3(std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  return Vec3(d(rng), d(rng), d(rng));
}

inline Vec3 random_unit(std::mt19937& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(d(rng), d(rng), d(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

}  // namespace oracles
