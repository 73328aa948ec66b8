#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "fwt/frames.hpp"

using namespace fwt;

namespace {

// Euler extraction used only as a test oracle.
EulerTriad euler_from_rotation(const Mat3& r) {
  EulerTriad t;
  t.y = -std::asin(r(2, 0));
  t.x = std::atan2(r(2, 1), r(2, 2));
  t.z = std::atan2(r(1, 0), r(0, 0));
  return t;
}

}  // namespace

TEST_CASE("rotation matrix at zero angles is the identity") {
  const Mat3 r = rotation_matrix(EulerTriad{0, 0, 0});
  REQUIRE((r - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quarter-turn yaw maps body e1 to inertial e2") {
  const Mat3 r = rotation_matrix(EulerTriad{0, 0, M_PI / 2});
  const Vec3 e1_inertial = r * Vec3::UnitX();
  REQUIRE((e1_inertial - Vec3::UnitY()).norm() < 1e-15);
}

TEST_CASE("rotation matrices are orthogonal with unit determinant") {
  const EulerTriad sample{0.1, 0.2, 0.3};
  const Mat3 r = rotation_matrix(sample);
  REQUIRE((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <
          1e-12);
  REQUIRE(std::abs(r.determinant() - 1.0) < 1e-12);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-1.4, 1.4);
  for (int i = 0; i < 200; ++i) {
    const Mat3 q = rotation_matrix(EulerTriad{ang(rng), ang(rng), ang(rng)});
    REQUIRE((q.transpose() * q - Mat3::Identity()).cwiseAbs().maxCoeff() <
            1e-12);
    REQUIRE(std::abs(q.determinant() - 1.0) < 1e-12);
  }
}

TEST_CASE("euler rate map reduces to identity at zero roll and pitch") {
  for (double yaw : {0.0, 0.4, -1.2}) {
    const Mat3 j = euler_rate_map(EulerTriad{0, 0, yaw});
    REQUIRE((j - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("euler rate map of zero rate is zero") {
  const Mat3 j = euler_rate_map(EulerTriad{0.5, 0.7, -0.3});
  REQUIRE((j * Vec3::Zero()).norm() == 0.0);
}

TEST_CASE("euler rates match finite differences of the integrated rotation") {
  // Integrate R_dot = R * skew(omega) over a small step and compare the
  // extracted Euler-angle difference with J * omega.
  const EulerTriad theta0{0.2, 0.3, 0.0};
  const Vec3 omega(0.0, 1.0, 0.0);
  const double dt = 1e-4;

  Mat3 r = rotation_matrix(theta0);
  const auto rdot = [&](const Mat3& m) { return Mat3(m * skew(omega)); };
  const Mat3 k1 = rdot(r);
  const Mat3 k2 = rdot(r + 0.5 * dt * k1);
  const Mat3 k3 = rdot(r + 0.5 * dt * k2);
  const Mat3 k4 = rdot(r + dt * k3);
  const Mat3 r1 = r + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  const EulerTriad theta1 = euler_from_rotation(r1);
  const Vec3 fd((theta1.x - theta0.x) / dt, (theta1.y - theta0.y) / dt,
                (theta1.z - theta0.z) / dt);
  const Vec3 analytic = euler_rate_map(theta0) * omega;
  REQUIRE((fd - analytic).norm() < 1e-3 * analytic.norm() + 1e-9);
}

TEST_CASE("euler rate map rejects attitudes near the pitch singularity") {
  REQUIRE_THROWS_AS(euler_rate_map(EulerTriad{0, M_PI / 2 - 1e-4, 0}),
                    SingularAttitude);
  REQUIRE_THROWS_AS(euler_rate_map(EulerTriad{0, -M_PI / 2 + 1e-4, 0}),
                    SingularAttitude);
  REQUIRE_NOTHROW(euler_rate_map(EulerTriad{0, M_PI / 2 - 2e-3, 0}));
}

TEST_CASE("skew matrix realizes the cross product") {
  REQUIRE(skew(Vec3::Zero()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((skew(Vec3::UnitX()) * Vec3::UnitY() - Vec3::UnitZ()).norm() == 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v(u(rng), u(rng), u(rng));
    const Vec3 w(u(rng), u(rng), u(rng));
    const Vec3 cross(v.y() * w.z() - v.z() * w.y(),
                     v.z() * w.x() - v.x() * w.z(),
                     v.x() * w.y() - v.y() * w.x());
    REQUIRE((skew(v) * w - cross).cwiseAbs().maxCoeff() < 1e-15);
    REQUIRE((skew(v) + skew(v).transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("frame transforms round-trip") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r = rotation_matrix(EulerTriad{u(rng), u(rng), u(rng)});
    const Vec3 x(u(rng), u(rng), u(rng));
    REQUIRE((inertial_to_body(r, body_to_inertial(r, x)) - x).norm() < 1e-13);
  }
}
