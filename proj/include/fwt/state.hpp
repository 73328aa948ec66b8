#pragma once

#include "fwt/frames.hpp"

namespace fwt {

// The 13 plant states: inertial position, Euler triad, body translational
// velocity, body angular rate, rotor spin speed.
struct StateVector {
  Vec3 r_p{Vec3::Zero()};       // m, inertial frame
  EulerTriad theta{};           // rad
  Vec3 v_p{Vec3::Zero()};       // m/s, body frame
  Vec3 omega_p{Vec3::Zero()};   // rad/s, body frame
  double omega_r{0.0};          // rad/s, rotor about shaft

  Vec13 pack() const {
    Vec13 x;
    x << r_p.x(), r_p.y(), r_p.z(), theta.x, theta.y, theta.z,
         v_p.x(), v_p.y(), v_p.z(), omega_p.x(), omega_p.y(), omega_p.z(),
         omega_r;
    return x;
  }

  static StateVector unpack(const Vec13& x) {
    StateVector s;
    s.r_p = x.segment<3>(0);
    s.theta = EulerTriad{x(3), x(4), x(5)};
    s.v_p = x.segment<3>(6);
    s.omega_p = x.segment<3>(9);
    s.omega_r = x(12);
    return s;
  }

  bool finite() const { return pack().allFinite(); }
};

// Platform pitch rate theta_dot_y extracted from the Euler rate map
// (row 2 of J collapses to cos(roll)*wy - sin(roll)*wz).
inline double platform_pitch_rate(const StateVector& s) {
  return std::cos(s.theta.x) * s.omega_p.y() -
         std::sin(s.theta.x) * s.omega_p.z();
}

}  // namespace fwt
