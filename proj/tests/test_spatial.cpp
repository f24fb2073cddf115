#include <catch2/catch.hpp>

#include <random>

#include "foldsim/spatial.hpp"
#include "oracles.hpp"

using namespace foldsim;
using oracles::cross_oracle;
using oracles::random_unit;
using oracles::random_vec3;

TEST_CASE("skew of zero is the zero matrix") {
  REQUIRE(skew(Vec3::Zero()).isZero(0.0));
}

TEST_CASE("skew reproduces the cross product") {
  const Vec3 ez(0, 0, 1);
  const Vec3 ex(1, 0, 0);
  REQUIRE((skew(ez) * ex - Vec3(0, 1, 0)).norm() == 0.0);

  // (1,2,3) x (4,5,6) = (-3, 6, -3), pinned via the componentwise oracle.
  const Vec3 got = skew(Vec3(1, 2, 3)) * Vec3(4, 5, 6);
  REQUIRE(got.isApprox(Vec3(-3, 6, -3), 1e-15));
  REQUIRE(got.isApprox(cross_oracle(Vec3(1, 2, 3), Vec3(4, 5, 6)), 1e-15));
}

TEST_CASE("skew matches the cross oracle on random inputs") {
  std::mt19937 rng(991);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 w = random_vec3(rng, 10.0);
    const Vec3 x = random_vec3(rng, 10.0);
    REQUIRE((skew(w) * x - cross_oracle(w, x)).norm() < 1e-12);
  }
}

TEST_CASE("skew is exactly antisymmetric") {
  std::mt19937 rng(992);
  for (int i = 0; i < 100; ++i) {
    const Mat3 s = skew(random_vec3(rng, 5.0));
    REQUIRE((s.transpose() + s).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("skew rejects non-finite input") {
  REQUIRE_THROWS_AS(skew(Vec3(std::nan(""), 0, 0)), std::invalid_argument);
}

TEST_CASE("integrate_rotation identity cases") {
  const Rot3 r = integrate_rotation(Rot3::identity(), Vec3::Zero(), 0.001);
  REQUIRE((r.matrix() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("integrate_rotation quarter turn maps ex to ey") {
  const Rot3 r = integrate_rotation(Rot3::identity(), Vec3(0, 0, M_PI / 2), 1.0);
  const Vec3 got = r * Vec3(1, 0, 0);
  // Pin against the vector-form rotation oracle.
  const Vec3 expect = oracles::rodrigues_rotate(Vec3(0, 0, 1), M_PI / 2, Vec3(1, 0, 0));
  REQUIRE((got - expect).norm() < 1e-14);
  REQUIRE((got - Vec3(0, 1, 0)).norm() < 1e-14);
}

TEST_CASE("integrate_rotation matches the rotation oracle on random steps") {
  std::mt19937 rng(993);
  for (int i = 0; i < 200; ++i) {
    const Vec3 omega = random_vec3(rng, 3.0);
    const double dt = std::uniform_real_distribution<double>(1e-4, 0.5)(rng);
    const Rot3 r = integrate_rotation(Rot3::identity(), omega, dt);
    REQUIRE(r.defect() < 1e-12);
    if (omega.norm() > 1e-9) {
      const Vec3 axis = omega.normalized();
      const double angle = omega.norm() * dt;
      const Vec3 probe = random_vec3(rng, 2.0);
      REQUIRE((r * probe - oracles::rodrigues_rotate(axis, angle, probe)).norm() < 1e-12);
    }
  }
}

TEST_CASE("integrate_rotation stays on SO(3) over 10^4 chained steps") {
  std::mt19937 rng(994);
  Rot3 r = Rot3::identity();
  for (int i = 0; i < 10000; ++i) {
    r = integrate_rotation(r, random_vec3(rng, 2.0), 1e-3);
  }
  REQUIRE(r.defect() < 1e-9);
}

TEST_CASE("integrate_rotation rejects bad inputs") {
  REQUIRE_THROWS_AS(integrate_rotation(Rot3::identity(), Vec3(0, 0, std::nan("")), 1e-3),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(integrate_rotation(Rot3::identity(), Vec3::Zero(), 0.0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(integrate_rotation(Rot3::identity(), Vec3::Zero(), -1e-3),
                    std::invalid_argument);
}

TEST_CASE("Rot3 validates orthonormality on construction") {
  REQUIRE_NOTHROW(Rot3::from_matrix(Mat3::Identity()));
  Mat3 bad = Mat3::Identity();
  bad(0, 0) = 1.0 + 1e-6;
  REQUIRE_THROWS_AS(Rot3::from_matrix(bad), std::invalid_argument);
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;  // orthogonal but det = -1
  REQUIRE_THROWS_AS(Rot3::from_matrix(reflection), std::invalid_argument);
}

TEST_CASE("project_tangent basic cases") {
  REQUIRE(project_tangent(Vec3(1, 2, 3), Vec3(0, 0, 1)).isApprox(Vec3(1, 2, 0), 1e-15));
  const Vec3 n(0, 0, 1);
  REQUIRE(project_tangent(n, n).norm() == 0.0);

  // x = (1,0,1), n = (1,1,0)/sqrt(2): projector oracle P = I - n n'.
  const Vec3 n2 = Vec3(1, 1, 0).normalized();
  const Vec3 x(1, 0, 1);
  const Vec3 expect = x - n2 * (n2.dot(x));
  const Vec3 got = project_tangent(x, n2);
  REQUIRE((got - expect).norm() < 1e-15);
  REQUIRE(got.isApprox(Vec3(0.5, -0.5, 1.0), 1e-12));
}

TEST_CASE("project_tangent output is orthogonal to n and idempotent") {
  std::mt19937 rng(995);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 n = random_unit(rng);
    const Vec3 x = random_vec3(rng, 10.0);
    const Vec3 p = project_tangent(x, n);
    REQUIRE(std::abs(n.dot(p)) < 1e-12);
    REQUIRE(std::abs(n.dot(x) - n.dot(x - p)) < 1e-12);  // x = p + (n'x) n
    REQUIRE((project_tangent(p, n) - p).norm() < 1e-12);
  }
}

TEST_CASE("project_tangent rejects non-unit normals") {
  REQUIRE_THROWS_AS(project_tangent(Vec3(1, 0, 0), Vec3(0, 0, 2)), std::invalid_argument);
}
