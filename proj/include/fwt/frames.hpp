#pragma once

// Coordinate frames and kinematic maps shared by all modules.
//
// Two right-handed frames are used throughout: an inertial frame fixed at the
// platform's undisplaced center of gravity (e3 up) and a body frame attached
// to the platform CG. Attitude is a 3-2-1 (yaw-pitch-roll) Euler triad;
// angles are radians everywhere inside the library, degrees only at I/O.

#include <cmath>

#include <Eigen/Core>

#include "fwt/errors.hpp"

namespace fwt {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;
using Vec13 = Eigen::Matrix<double, 13, 1>;

// Roll, pitch, yaw of the platform (rad).
struct EulerTriad {
  double x{0.0};
  double y{0.0};
  double z{0.0};
};

// Default pitch-singularity guard for the Euler rate map (rad).
inline constexpr double kDefaultSingularityGuard = 1e-3;

// Body-to-inertial rotation matrix of the 3-2-1 sequence.
inline Mat3 rotation_matrix(const EulerTriad& t) {
  const double cx = std::cos(t.x), sx = std::sin(t.x);
  const double cy = std::cos(t.y), sy = std::sin(t.y);
  const double cz = std::cos(t.z), sz = std::sin(t.z);
  Mat3 r;
  r << cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sx * sz,
       sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx,
       -sy,     cy * sx,                cy * cx;
  return r;
}

// Map J from body angular rate to Euler angle rates: theta_dot = J * omega.
// Throws SingularAttitude within eps_sing of the pitch singularity.
inline Mat3 euler_rate_map(const EulerTriad& t,
                           double eps_sing = kDefaultSingularityGuard) {
  if (std::abs(t.y) >= M_PI / 2.0 - eps_sing) {
    throw SingularAttitude("euler_rate_map: |pitch| = " +
                           std::to_string(std::abs(t.y)) +
                           " rad is inside the singularity guard");
  }
  const double cx = std::cos(t.x), sx = std::sin(t.x);
  const double cy = std::cos(t.y), sy = std::sin(t.y);
  Mat3 j;
  j << 1.0, sx * sy / cy, cx * sy / cy,
       0.0, cx,           -sx,
       0.0, sx / cy,      cx / cy;
  return j;
}

// Cross-product (tilde) matrix: skew(v) * w == v x w.
inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s <<  0.0,  -v.z(),  v.y(),
        v.z(), 0.0,   -v.x(),
       -v.y(), v.x(),  0.0;
  return s;
}

inline Vec3 body_to_inertial(const Mat3& r, const Vec3& x) { return r * x; }
inline Vec3 inertial_to_body(const Mat3& r, const Vec3& x) {
  return r.transpose() * x;
}

}  // namespace fwt
