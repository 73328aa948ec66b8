#pragma once

// Hydrostatic buoyancy with finite rotations, Morison strip loads, heave
// plate loads and the linearized mooring model. All wrenches are expressed in
// the body frame about the platform CM. Member axes are the body e3 axis.

#include <array>
#include <cmath>
#include <vector>

#include "fwt/environment.hpp"
#include "fwt/errors.hpp"
#include "fwt/frames.hpp"
#include "fwt/params.hpp"
#include "fwt/state.hpp"

namespace fwt {

enum class LoadSource { buoyancy, hydrodynamic, aero, mooring };

struct LoadWrench {
  Vec3 force{Vec3::Zero()};   // N, body frame
  Vec3 moment{Vec3::Zero()};  // N m, body frame about platform CM
  LoadSource source{LoadSource::hydrodynamic};

  LoadWrench& operator+=(const LoadWrench& o) {
    force += o.force;
    moment += o.moment;
    return *this;
  }
};

struct FlowSample {
  Vec3 vel{Vec3::Zero()};  // particle velocity, inertial frame (m/s)
  Vec3 acc{Vec3::Zero()};  // particle acceleration (m/s^2)
  double p_dyn{0};         // dynamic pressure (Pa)
};

// Flow field seen by the members, sampled at inertial positions. The Airy
// implementation converts to still-water-line coordinates internally; tests
// substitute synthetic fields (uniform cross-flow, single-term forcing).
class FlowField {
 public:
  virtual ~FlowField() = default;
  virtual double elevation(double x, double y, double t) const = 0;
  virtual FlowSample sample(const Vec3& p_inertial, double t) const = 0;
};

class AiryFlow final : public FlowField {
 public:
  AiryFlow(const WaveSpec& spec, double z_swl, double rho_w, double g)
      : spec_(spec), z_swl_(z_swl), rho_w_(rho_w), g_(g) {}

  // Elevation relative to the still-water line (m).
  double elevation(double x, double y, double t) const override {
    return wave_elevation(spec_, x, y, t, g_);
  }

  FlowSample sample(const Vec3& p, double t) const override {
    const WaterKinematics k = water_particle_kinematics(
        spec_, p.x(), p.y(), p.z() - z_swl_, t, rho_w_, g_);
    return FlowSample{k.vel, k.acc, k.p_dyn};
  }

  const WaveSpec& spec() const { return spec_; }

 private:
  WaveSpec spec_;
  double z_swl_, rho_w_, g_;
};

inline constexpr double kAttitudeCosLimit = 0.5;  // 60 deg tilt

// Instantaneous wetted length of a member. Fully submerged members keep their
// actual length; floating members intersect the axis with the free surface
// and clamp to [0, column length].
inline double submerged_length(const CylinderSpec& cyl, const StateVector& s,
                               double eta_i, double /*z_swl*/,
                               const Mat3& R) {
  if (!cyl.floating()) return cyl.length;
  const double denom = R(2, 2);  // (R e3_p) . e3_I
  if (denom <= kAttitudeCosLimit) {
    throw DegenerateAttitude("submerged_length: platform tilt beyond limit");
  }
  const double h_b = (cyl.r_b - R * cyl.r_b).z() - s.r_p.z();
  const double L = (eta_i + cyl.L_0 + h_b) / denom;
  return std::clamp(L, 0.0, cyl.length);
}

inline double submerged_length(const CylinderSpec& cyl, const StateVector& s,
                               double eta_i, double z_swl) {
  return submerged_length(cyl, s, eta_i, z_swl, rotation_matrix(s.theta));
}

// Total displaced volume at the given per-member wetted lengths.
inline double displaced_volume(const std::vector<CylinderSpec>& cyls,
                               const std::vector<double>& lengths) {
  double v = 0;
  for (size_t i = 0; i < cyls.size(); ++i) v += cyls[i].area() * lengths[i];
  return v;
}

inline std::vector<double> wetted_lengths(const std::vector<CylinderSpec>& cyls,
                                          const StateVector& s,
                                          const std::vector<double>& eta,
                                          double z_swl) {
  const Mat3 R = rotation_matrix(s.theta);
  std::vector<double> L(cyls.size());
  for (size_t i = 0; i < cyls.size(); ++i) {
    L[i] = submerged_length(cyls[i], s, eta[i], z_swl, R);
  }
  return L;
}

// Buoyant force through the volume centroid of the displaced strips.
inline LoadWrench buoyancy_wrench(const std::vector<CylinderSpec>& cyls,
                                  const StateVector& s,
                                  const std::vector<double>& eta,
                                  double rho_w, double g, double z_swl) {
  const Mat3 R = rotation_matrix(s.theta);
  double V_d = 0;
  Vec3 moment_vol = Vec3::Zero();  // sum V_i * r_mi
  for (size_t i = 0; i < cyls.size(); ++i) {
    const double L = submerged_length(cyls[i], s, eta[i], z_swl, R);
    const double V = cyls[i].area() * L;
    V_d += V;
    moment_vol += V * (cyls[i].r_b + 0.5 * L * Vec3::UnitZ());
  }
  LoadWrench w;
  w.source = LoadSource::buoyancy;
  w.force = R.transpose() * (rho_w * g * V_d * Vec3::UnitZ());
  if (V_d > 0) {
    const Vec3 r_B = moment_vol / V_d;
    w.moment = r_B.cross(w.force);
  }
  return w;
}

// Morison transverse load on one member by midpoint strip quadrature over the
// instantaneous wetted length. The body-acceleration inertia term is absorbed
// by the added-mass matrix and does not appear here.
inline LoadWrench morison_transverse(const CylinderSpec& cyl,
                                     const StateVector& s,
                                     const FlowField& flow, double t,
                                     const HydroConfig& cfg, double z_swl) {
  const Mat3 R = rotation_matrix(s.theta);
  const Vec3 base_i = s.r_p + R * cyl.r_b;
  const double eta_i = flow.elevation(base_i.x(), base_i.y(), t);
  const double L = submerged_length(cyl, s, eta_i, z_swl, R);

  LoadWrench w;
  w.source = LoadSource::hydrodynamic;
  if (L <= 0.0) return w;

  const double C_D = 0.5 * cyl.C_d * cfg.rho_w * cyl.d;        // N s^2/m^3
  const double C_A = cyl.C_a * cfg.rho_w * cyl.area();         // kg/m
  const double inertia_coeff = C_A + cfg.rho_w * cyl.area();   // C_A + rho A
  const int n = cfg.quadrature_points;
  const double dz = L / n;
  Vec3 force = Vec3::Zero(), moment = Vec3::Zero();
  for (int q = 0; q < n; ++q) {
    const double z = (q + 0.5) * dz;
    const Vec3 r_a = cyl.r_b + z * Vec3::UnitZ();
    const FlowSample f = flow.sample(s.r_p + R * r_a, t);
    const Vec3 v_w = R.transpose() * f.vel;
    const Vec3 a_w = R.transpose() * f.acc;
    const Vec3 v_a = s.v_p + s.omega_p.cross(r_a);
    Vec3 v_ref = v_w - v_a;
    v_ref.z() = 0.0;  // transverse component w.r.t. the member axis
    Vec3 a_perp = a_w;
    a_perp.z() = 0.0;
    const Vec3 df = C_D * v_ref.norm() * v_ref + inertia_coeff * a_perp;
    force += df * dz;
    moment += r_a.cross(df) * dz;
  }
  w.force = force;
  w.moment = moment;
  return w;
}

// Heave (axial) drag, Froude-Krylov inertia and face-pressure load on a base
// column. paired_area is the cross-section of the upper column standing on
// the plate; the top face exposes only the annulus.
inline LoadWrench heave_plate_loads(const CylinderSpec& cyl,
                                    const StateVector& s,
                                    const FlowField& flow, double t,
                                    const HydroConfig& cfg,
                                    double paired_area) {
  if (cyl.floating()) {
    throw RoleMismatch("heave_plate_loads: member is not a base column");
  }
  const Mat3 R = rotation_matrix(s.theta);
  const double L = cyl.length;
  const Vec3 r_c = cyl.r_b + 0.5 * L * Vec3::UnitZ();

  const double A = cyl.area();
  const double C_Dz = 0.5 * cyl.C_dz * cfg.rho_w * A;
  const double V_R = (2.0 / 3.0) * M_PI * std::pow(cyl.d / 2.0, 3);
  const double C_Az = cyl.C_az * cfg.rho_w * V_R;

  const FlowSample fc = flow.sample(s.r_p + R * r_c, t);
  const Vec3 v_w = R.transpose() * fc.vel;
  const Vec3 a_w = R.transpose() * fc.acc;
  const Vec3 v_c = s.v_p + s.omega_p.cross(r_c);
  const double v_ref_ax = (v_w - v_c).z();
  const double a_ax = a_w.z();

  const double p_b = flow.sample(s.r_p + R * cyl.r_b, t).p_dyn;
  const double p_t = flow.sample(s.r_p + R * (cyl.r_b + L * Vec3::UnitZ()), t)
                         .p_dyn;

  const double f_ax = C_Dz * std::abs(v_ref_ax) * v_ref_ax + C_Az * a_ax +
                      (A * p_b - (A - paired_area) * p_t);
  LoadWrench w;
  w.source = LoadSource::hydrodynamic;
  w.force = f_ax * Vec3::UnitZ();
  w.moment = r_c.cross(w.force);
  return w;
}

// Sum of the 7 transverse member loads and the 3 heave-plate loads. Base
// column i pairs with upper column i-3 for the top-face annulus.
inline LoadWrench total_hydro(const std::vector<CylinderSpec>& cyls,
                              const StateVector& s, const FlowField& flow,
                              double t, const HydroConfig& cfg, double z_swl) {
  LoadWrench total;
  total.source = LoadSource::hydrodynamic;
  for (const auto& c : cyls) {
    total += morison_transverse(c, s, flow, t, cfg, z_swl);
  }
  for (size_t i = 0; i < cyls.size(); ++i) {
    if (!cyls[i].floating()) {
      const double paired = cyls[i - 3].area();
      total += heave_plate_loads(cyls[i], s, flow, t, cfg, paired);
    }
  }
  return total;
}

struct MooringLoads {
  LoadWrench wrench;                       // body frame
  std::array<double, 3> fairlead_tension{};  // N
  std::array<double, 3> anchor_tension{};    // N
};

// Linear restoring/damping about the undisplaced pose plus the equilibrium
// pretension wrench. Per-line tensions come from the fairlead-anchor chord
// stretch; the anchor sees the horizontal projection.
inline MooringLoads mooring_wrench(const MooringConfig& cfg,
                                   const StateVector& s) {
  const Mat3 R = rotation_matrix(s.theta);
  const Mat3 J = euler_rate_map(s.theta);
  Vec6 q, qdot;
  q << s.r_p, s.theta.x, s.theta.y, s.theta.z;
  qdot << R * s.v_p, J * s.omega_p;
  const Vec6 w_i = cfg.pretension - cfg.stiffness * q - cfg.damping * qdot;

  MooringLoads out;
  out.wrench.source = LoadSource::mooring;
  out.wrench.force = R.transpose() * w_i.head<3>();
  out.wrench.moment = R.transpose() * w_i.tail<3>();
  for (size_t i = 0; i < cfg.lines.size() && i < 3; ++i) {
    const MooringLine& l = cfg.lines[i];
    const Vec3 fairlead = s.r_p + R * l.fairlead_b;
    const Vec3 chord = l.anchor_i - fairlead;
    const double len = chord.norm();
    const double T = std::max(
        0.0, l.pretension_n + l.axial_stiffness_npm * (len - l.rest_chord_m));
    out.fairlead_tension[i] = T;
    out.anchor_tension[i] = T * chord.head<2>().norm() / len;
  }
  return out;
}

}  // namespace fwt
