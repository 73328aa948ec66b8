#pragma once

// Structural mass matrix, added-mass matrix, Coriolis/gyroscopic terms and
// gravity column of the 7-DOF multibody model (platform + tower + nacelle +
// rigid rotor disc). The added mass is frozen at the initial submerged
// lengths; the body-acceleration inertia terms of the member loads live here
// rather than on the force side.

#include <array>
#include <vector>

#include <Eigen/Cholesky>

#include "fwt/errors.hpp"
#include "fwt/frames.hpp"
#include "fwt/params.hpp"
#include "fwt/state.hpp"

namespace fwt {

struct SystemMatrices {
  // Combined-mass scalars a1..a7 (stored 0-based) and the nacelle/rotor
  // offset term m_d of the gravity column.
  std::array<double, 7> a{};
  double m_d{0};
  double I_rx{0};
  double g{9.81};

  Mat6 Ms1{Mat6::Zero()};
  Vec6 Ms2{Vec6::Zero()};  // column block; Ms3 = Ms2^T, Ms4 = I_rx
  Mat6 Ma{Mat6::Zero()};
  Mat7 Ms_bar{Mat7::Zero()};

  // Distinct added-mass entries, kept for diagnostics and the b2 check.
  double b11{0}, b15{0}, b33{0}, b44{0}, b66{0};

  Eigen::LLT<Mat7> llt;

  // Solve Ms_bar * x = rhs for the velocity-level rows.
  Vec7 solve(const Vec7& rhs) const { return llt.solve(rhs); }
};

// a1..a7 and the Ms blocks from the component masses and offsets.
inline SystemMatrices structural_mass_matrix(const BodyProperties& p) {
  p.validate();
  SystemMatrices m;
  m.g = p.g;
  const double a1 = p.m_p + p.m_t + p.m_nc + p.m_r;
  const double a2 = p.H_r * (p.m_r + p.m_nc) + p.m_t * p.H_t;
  const double a3 = p.h_nc * p.m_nc - p.h_r * p.m_r;
  const double a4 = p.I_p.x() + p.I_t.x() + p.I_nc.x() + p.I_r.x() +
                    p.H_r * p.H_r * (p.m_r + p.m_nc) + p.H_t * p.H_t * p.m_t;
  const double a5 = p.I_p.y() + p.I_t.y() + p.I_nc.y() + p.I_r.y() +
                    p.m_r * (p.H_r * p.H_r + p.h_r * p.h_r) +
                    p.m_nc * (p.H_r * p.H_r + p.h_nc * p.h_nc) +
                    p.H_t * p.H_t * p.m_t;
  const double a6 = p.H_r * p.h_r * p.m_r - p.H_r * p.h_nc * p.m_nc;
  const double a7 = p.I_p.z() + p.I_t.z() + p.I_nc.z() + p.I_r.z() +
                    p.m_r * p.h_r * p.h_r + p.m_nc * p.h_nc * p.h_nc;
  m.a = {a1, a2, a3, a4, a5, a6, a7};
  m.m_d = p.h_nc * p.m_nc + p.h_r * p.m_r;
  m.I_rx = p.I_r.x();

  m.Ms1 << a1, 0, 0, 0, a2, 0,
           0, a1, 0, -a2, 0, a3,
           0, 0, a1, 0, -a3, 0,
           0, -a2, 0, a4, 0, a6,
           a2, 0, -a3, 0, a5, 0,
           0, a3, 0, a6, 0, a7;
  m.Ms2 << 0, 0, 0, m.I_rx, 0, 0;
  return m;
}

// Frozen added-mass matrix assembled from the member added-mass coefficients
// at the initial submerged lengths. Base columns additionally contribute the
// heave (disc) added mass C_az * rho_w * (2/3) pi (d/2)^3.
inline Mat6 added_mass_matrix(const std::vector<CylinderSpec>& cyls,
                              double rho_w) {
  if (!(rho_w > 0)) throw InvalidParameters("added mass: rho_w must be > 0");
  double b11 = 0, b15 = 0, b33 = 0, b44 = 0, b66 = 0;
  for (const auto& c : cyls) {
    if (c.C_a < 0 || c.C_az < 0) {
      throw InvalidParameters("added mass: coefficients must be >= 0");
    }
    const double CA = c.C_a * rho_w * c.area();  // kg per unit length
    const double L = c.L_0;
    const double z = c.r_b.z();
    b11 += CA * L;
    b15 += CA * (L * L / 2.0 + L * z);
    b44 += CA * (L * L * L / 3.0 + L * L * z + L * z * z);
    b66 += CA * L * (c.r_b.x() * c.r_b.x() + c.r_b.y() * c.r_b.y());
    if (!c.floating()) {
      const double CAz = c.C_az * rho_w * (2.0 / 3.0) * M_PI *
                         std::pow(c.d / 2.0, 3);
      const Vec3 r_c = c.r_b + 0.5 * L * Vec3::UnitZ();
      b33 += CAz;
      b44 += CAz * r_c.x() * r_c.x();
    }
  }
  Mat6 Ma;
  Ma << b11, 0, 0, 0, b15, 0,
        0, b11, 0, -b15, 0, 0,
        0, 0, b33, 0, 0, 0,
        0, -b15, 0, b44, 0, 0,
        b15, 0, 0, 0, b44, 0,
        0, 0, 0, 0, 0, b66;
  return Ma;
}

// Full assembly: structural blocks + frozen added mass, factorized once per
// parameter set and reused by every integration step.
inline SystemMatrices assemble_system(const BodyProperties& body,
                                      const std::vector<CylinderSpec>& cyls,
                                      double rho_w) {
  SystemMatrices m = structural_mass_matrix(body);
  m.Ma = added_mass_matrix(cyls, rho_w);
  m.b11 = m.Ma(0, 0);
  m.b15 = m.Ma(0, 4);
  m.b33 = m.Ma(2, 2);
  m.b44 = m.Ma(3, 3);
  m.b66 = m.Ma(5, 5);

  m.Ms_bar.topLeftCorner<6, 6>() = m.Ms1 + m.Ma;
  m.Ms_bar.topRightCorner<6, 1>() = m.Ms2;
  m.Ms_bar.bottomLeftCorner<1, 6>() = m.Ms2.transpose();
  m.Ms_bar(6, 6) = m.I_rx;

  m.llt.compute(m.Ms_bar);
  if (m.llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(
        "Ms_bar is not positive definite; check the parameter file");
  }
  return m;
}

// Full 13x13 left-hand matrix (identity over the kinematic rows).
inline Eigen::Matrix<double, 13, 13> assemble_M_bar(const SystemMatrices& m) {
  Eigen::Matrix<double, 13, 13> M = Eigen::Matrix<double, 13, 13>::Identity();
  M.bottomRightCorner<7, 7>() = m.Ms_bar;
  return M;
}

// Velocity-product and gravity terms. Rows 1..6 are zero; rows 7..13 hold
// -Cs * [v; w; Omega] plus the gravity column.
inline Vec13 coriolis_and_gravity(const StateVector& s,
                                  const SystemMatrices& m) {
  const Mat3 wt = skew(s.omega_p);
  const Mat3 vt = skew(s.v_p);
  Mat6 S = Mat6::Zero();
  S.topLeftCorner<3, 3>() = wt;
  S.bottomLeftCorner<3, 3>() = vt;
  S.bottomRightCorner<3, 3>() = wt;
  const Mat6 Cs1 = S * m.Ms1;

  Vec6 Cs2 = Vec6::Zero();
  Cs2(4) = m.I_rx * s.omega_p.z();
  Cs2(5) = -m.I_rx * s.omega_p.y();

  Vec6 vw;
  vw << s.v_p, s.omega_p;

  const double cx = std::cos(s.theta.x), sx = std::sin(s.theta.x);
  const double cy = std::cos(s.theta.y), sy = std::sin(s.theta.y);
  Vec6 grav;
  grav << m.a[0] * sy,
          -m.a[0] * cy * sx,
          -m.a[0] * cx * cy,
          cy * sx * m.a[1],
          sy * m.a[1] + cx * cy * m.m_d,
          -sx * cy * m.m_d;

  Vec13 out = Vec13::Zero();
  out.segment<6>(6) = -(Cs1 * vw + Cs2 * s.omega_r) + m.g * grav;
  // rotor row: no velocity-product or gravity contribution
  return out;
}

// h1..h5 and the control-direction constants b1 = 1/I_rx,
// b2 = h1 (h2 - H_r h3) / (h1 h2^2 + h3 h4^2 - h5 h3 h1). Both positive for
// any physically consistent parameter set.
struct ControlDirection {
  double h1, h2, h3, h4, h5;
  double b1, b2;
};

inline ControlDirection control_direction_constants(const SystemMatrices& m,
                                                    double H_r) {
  ControlDirection c{};
  c.h1 = m.a[0] + m.b33;
  c.h2 = m.a[1] + m.b15;
  c.h3 = m.a[0] + m.b11;
  c.h4 = m.a[2];
  c.h5 = m.a[4] + m.b44;
  c.b1 = 1.0 / m.I_rx;
  const double denom = c.h1 * c.h2 * c.h2 + c.h3 * c.h4 * c.h4 -
                       c.h5 * c.h3 * c.h1;
  c.b2 = c.h1 * (c.h2 - H_r * c.h3) / denom;
  return c;
}

}  // namespace fwt
