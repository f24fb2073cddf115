#include <catch2/catch.hpp>

#include <deque>
#include <random>

#include "foldsim/estimator.hpp"
#include "oracles.hpp"

using namespace foldsim;
using oracles::cross_oracle;
using oracles::random_unit;
using oracles::random_vec3;

namespace {

Wrench force_only(const Vec3& f) { return Wrench{f, Vec3::Zero()}; }

}  // namespace

TEST_CASE("wrench filter averages its window") {
  SECTION("constant input is a fixed point") {
    WrenchFilter filter(5);
    const Wrench w{Vec3(1, -2, 3), Vec3(0.1, 0.2, -0.3)};
    Wrench out;
    for (int i = 0; i < 8; ++i) out = filter.step(w);
    REQUIRE(out.force.isApprox(w.force, 1e-15));
    REQUIRE(out.torque.isApprox(w.torque, 1e-15));
  }

  SECTION("two-sample warm-up mean") {
    WrenchFilter filter(5);
    filter.step(force_only(Vec3(1, 0, 0)));
    const Wrench out = filter.step(force_only(Vec3(3, 0, 0)));
    REQUIRE(out.force.isApprox(Vec3(2, 0, 0), 1e-15));
  }

  SECTION("sixth sample evicts the first") {
    WrenchFilter filter(5);
    std::deque<double> window;  // hand-rolled reference mean
    Wrench out;
    for (int k = 1; k <= 6; ++k) {
      out = filter.step(force_only(Vec3(k, 0, 0)));
      window.push_back(k);
      if (window.size() > 5) window.pop_front();
    }
    double sum = 0.0;
    for (double v : window) sum += v;
    REQUIRE(out.force.x() == Approx(sum / window.size()).margin(1e-15));
    REQUIRE(out.force.x() == Approx(4.0).margin(1e-15));  // mean of 2..6
  }

  SECTION("zero window is rejected") {
    REQUIRE_THROWS_AS(WrenchFilter(0), std::invalid_argument);
  }
}

TEST_CASE("estimate_r2 recovers the lever arm") {
  const Vec3 n(0, 0, 1);

  SECTION("planar press: f=(0,0,-5), tau=(0,0.5,0) -> r2=(0.1,0,0)") {
    const Wrench w{Vec3(0, 0, -5), Vec3(0, 0.5, 0)};
    const auto r2 = estimate_r2(w, n);
    REQUIRE(r2.has_value());
    REQUIRE(r2->isApprox(Vec3(0.1, 0, 0), 1e-12));
    // The recovered arm reproduces the torque exactly: tau = r2 x f.
    REQUIRE((cross_oracle(*r2, w.force) - w.torque).norm() < 1e-12);
  }

  SECTION("zero torque places the contact at the hand origin") {
    const auto r2 = estimate_r2(Wrench{Vec3(0, 0, -5), Vec3::Zero()}, n);
    REQUIRE(r2.has_value());
    REQUIRE(r2->norm() == 0.0);
  }

  SECTION("pure tangential force is degenerate") {
    REQUIRE_FALSE(estimate_r2(Wrench{Vec3(1, 0, 0), Vec3(0, 0, 0.1)}, n).has_value());
  }

  SECTION("normal force below the threshold is invalid") {
    REQUIRE_FALSE(estimate_r2(Wrench{Vec3(0, 0, -0.4), Vec3(0, 0.05, 0)}, n).has_value());
    REQUIRE(estimate_r2(Wrench{Vec3(0, 0, -0.4), Vec3(0, 0.05, 0)}, n, 0.1).has_value());
  }

  SECTION("noise-free identifiability on random planar contacts") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> mag(0.01, 0.5);
    std::uniform_real_distribution<double> load(1.0, 20.0);
    for (int i = 0; i < 500; ++i) {
      const Vec3 nn = random_unit(rng);
      // Tangent-plane lever arm and a force with a solid normal component.
      Vec3 t = project_tangent(random_vec3(rng, 1.0), nn);
      if (t.norm() < 1e-3) continue;
      t.normalize();
      const Vec3 r2 = mag(rng) * t;
      const Vec3 f = -load(rng) * nn + std::uniform_real_distribution<double>(-3, 3)(rng) * t;
      const Wrench w{f, cross_oracle(r2, f)};
      const auto got = estimate_r2(w, nn);
      REQUIRE(got.has_value());
      REQUIRE((*got - r2).norm() < 1e-9);
      // Structural guarantees of any valid estimate.
      REQUIRE(std::abs(nn.dot(*got)) < 1e-9);
      REQUIRE(got->norm() == Approx(w.torque.norm() / std::abs(f.dot(nn))).margin(1e-9));
    }
  }
}

TEST_CASE("estimate_r2 magnitude error grows with load under a misaligned normal") {
  // Physical setup: the wrench is generated at the slightly penetrated tip of
  // a spring contact (depth f_n / k_n), the friction ratio is fixed, and the
  // believed normal is tilted 5 degrees away from +tangent. The magnitude
  // error is then nonzero and strictly increasing in the load.
  const Vec3 n(0, 0, 1);
  const Vec3 t(1, 0, 0);
  const double alpha = 5.0 * M_PI / 180.0;
  const Vec3 n_bel = std::cos(alpha) * n - std::sin(alpha) * t;
  const double a = 0.2;     // true lever arm, m
  const double k_n = 6000;  // N/m
  const double mu = 0.3;

  double prev_err = 0.0;
  for (int i = 1; i <= 10; ++i) {
    const double f_n = static_cast<double>(i);  // 1..10 N
    const Vec3 f2 = -f_n * n + mu * f_n * t;    // force on the surface piece
    const Vec3 tip = a * t - (f_n / k_n) * n;
    const Wrench w{f2, cross_oracle(tip, f2)};
    const auto r2 = estimate_r2(w, n_bel);
    REQUIRE(r2.has_value());
    const double err = std::abs(r2->norm() - a);
    REQUIRE(err > 0.0);
    if (i > 1) {
      REQUIRE(err > prev_err);
    }
    prev_err = err;
  }
}

TEST_CASE("estimate_theta evaluates the rod inclination") {
  const Vec3 n(0, 0, 1);
  const Vec3 r2(0.1, 0, 0);
  REQUIRE(estimate_theta(Vec3(0.1, 0, 0), Vec3(0.2, 0, 0), n) == Approx(0.0).margin(1e-15));
  REQUIRE(estimate_theta(Vec3(0.05, 0, 0.05), r2, n) == Approx(M_PI / 4).margin(1e-12));
  REQUIRE(estimate_theta(Vec3(0, 0, 0.1), r2, n) == Approx(M_PI / 2).margin(1e-12));
  REQUIRE_THROWS_AS(estimate_theta(Vec3(0.1, 0, 0), Vec3::Zero(), n), std::domain_error);
}

TEST_CASE("estimate_theta is scale-invariant in |r2|") {
  std::mt19937 rng(78);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 n = random_unit(rng);
    Vec3 t = project_tangent(random_vec3(rng, 1.0), n);
    if (t.norm() < 1e-3) continue;
    t.normalize();
    const double scale = std::uniform_real_distribution<double>(0.01, 10.0)(rng);
    const Vec3 r2 = scale * t;
    const Vec3 r1 = random_vec3(rng, 0.5);
    if (r1.norm() < 1e-3) continue;
    const double got = estimate_theta(r1, r2, n);
    const double expect = std::atan2(n.dot(r1), t.dot(r1));
    REQUIRE(std::abs(got - expect) < 1e-12);
  }
}

TEST_CASE("estimate_contact composes lever arm, contact point and angle") {
  const Vec3 n(0, 0, 1);
  Pose pose2;
  pose2.position = Vec3(0.5, 0, 0);

  SECTION("contact point is p2 + r2") {
    const Wrench w{Vec3(0, 0, -5), Vec3(0, 0.5, 0)};  // r2 = (0.1, 0, 0)
    const ContactEstimate est = estimate_contact(w, pose2, n, Vec3(0.55, 0, 0.1));
    REQUIRE(est.valid);
    REQUIRE(est.p_c.isApprox(Vec3(0.6, 0, 0), 1e-12));
    // r1 = p_c - p1 = (0.05, 0, -0.1).
    REQUIRE(est.theta_c == Approx(std::atan2(-0.1, 0.05)).margin(1e-12));
  }

  SECTION("invalid lever arm carries the previous estimate with valid=false") {
    ContactEstimate prev;
    prev.r2 = Vec3(0.1, 0, 0);
    prev.p_c = Vec3(0.6, 0, 0);
    prev.theta_c = -0.7;
    prev.valid = true;
    const Wrench weak{Vec3(0.2, 0, -0.1), Vec3(0, 0.01, 0)};
    const ContactEstimate est = estimate_contact(weak, pose2, n, Vec3::Zero(),
                                                 k_default_f_min, &prev);
    REQUIRE_FALSE(est.valid);
    REQUIRE(est.r2.isApprox(prev.r2, 1e-15));
    REQUIRE(est.p_c.isApprox(prev.p_c, 1e-15));
    REQUIRE(est.theta_c == prev.theta_c);
  }
}
