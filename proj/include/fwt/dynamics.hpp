#pragma once

// Full state derivative, fixed-step RK4 integration, scenario execution and
// static equilibrium. A single simulation is strictly sequential; independent
// scenarios can run concurrently without shared mutable state.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "fwt/aero.hpp"
#include "fwt/control.hpp"
#include "fwt/environment.hpp"
#include "fwt/errors.hpp"
#include "fwt/hydro.hpp"
#include "fwt/params.hpp"
#include "fwt/rigid_body.hpp"
#include "fwt/state.hpp"

namespace fwt {

struct PlantLoads {
  LoadWrench buoy{Vec3::Zero(), Vec3::Zero(), LoadSource::buoyancy};
  LoadWrench hydro{Vec3::Zero(), Vec3::Zero(), LoadSource::hydrodynamic};
  LoadWrench aero{Vec3::Zero(), Vec3::Zero(), LoadSource::aero};
  LoadWrench moor{Vec3::Zero(), Vec3::Zero(), LoadSource::mooring};
  double tau_a{0}, tau_g{0};
  std::array<double, 3> fairlead_tension{};
  std::array<double, 3> anchor_tension{};
  double wind_speed{0};
  double eta0{0};  // elevation at the platform's horizontal position
};

// Rows 1-3: r_dot = R v; rows 4-6: theta_dot = J w; rows 7-13: the
// velocity-level equations solved through the factorized mass matrix.
inline Vec13 state_derivative(const StateVector& s, const SystemMatrices& m,
                              const PlantLoads& loads) {
  const Mat3 R = rotation_matrix(s.theta);
  const Mat3 J = euler_rate_map(s.theta);

  Vec3 force = loads.buoy.force + loads.hydro.force + loads.aero.force +
               loads.moor.force;
  Vec3 moment = loads.buoy.moment + loads.hydro.moment + loads.aero.moment +
                loads.moor.moment;

  Vec7 rhs;
  rhs << force, moment, loads.tau_a - loads.tau_g;
  rhs += coriolis_and_gravity(s, m).segment<7>(6);

  Vec13 dx;
  dx.segment<3>(0) = R * s.v_p;
  dx.segment<3>(3) = J * s.omega_p;
  dx.segment<7>(6) = m.solve(rhs);
  return dx;
}

// Classical fixed-step RK4. The derivative closure receives (state, time).
template <typename Deriv>
StateVector step_rk4(const StateVector& s, double t, double dt, Deriv&& f) {
  const Vec13 y = s.pack();
  const Vec13 k1 = f(s, t);
  const Vec13 k2 = f(StateVector::unpack(y + 0.5 * dt * k1), t + 0.5 * dt);
  const Vec13 k3 = f(StateVector::unpack(y + 0.5 * dt * k2), t + 0.5 * dt);
  const Vec13 k4 = f(StateVector::unpack(y + dt * k3), t + dt);
  return StateVector::unpack(y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

// Couples the load modules into one plant. Immutable after construction;
// evaluation is pure in (state, t, beta).
class PlantModel {
 public:
  PlantModel(ParameterSet params, RotorAeroTable table, WaveSpec wave,
             WindSource wind)
      : params_(std::move(params)),
        mats_(assemble_system(params_.body, params_.cylinders,
                              params_.hydro.rho_w)),
        table_(std::move(table)),
        flow_(wave, params_.z_swl, params_.hydro.rho_w, params_.body.g),
        wind_(std::move(wind)) {
    params_.validate();
  }

  PlantLoads loads(const StateVector& s, double t, double beta) const {
    PlantLoads out;
    const Mat3 R = rotation_matrix(s.theta);
    std::vector<double> eta(params_.cylinders.size());
    for (size_t i = 0; i < eta.size(); ++i) {
      const Vec3 base = s.r_p + R * params_.cylinders[i].r_b;
      eta[i] = flow_.elevation(base.x(), base.y(), t);
    }
    out.buoy = buoyancy_wrench(params_.cylinders, s, eta, params_.hydro.rho_w,
                               params_.body.g, params_.z_swl);
    out.hydro = total_hydro(params_.cylinders, s, flow_, t, params_.hydro,
                            params_.z_swl);
    const MooringLoads moor = mooring_wrench(params_.mooring, s);
    out.moor = moor.wrench;
    out.fairlead_tension = moor.fairlead_tension;
    out.anchor_tension = moor.anchor_tension;

    const Vec3 wind_i = wind_.at(t);
    const AeroLoads aero = aero_loads(params_.rotor, table_, s, wind_i, beta);
    out.aero = aero.wrench;
    out.tau_a = aero.tau_a;
    out.tau_g = generator_torque(params_.rotor, s.omega_r);
    out.wind_speed = wind_i.norm();
    out.eta0 = flow_.elevation(s.r_p.x(), s.r_p.y(), t);
    return out;
  }

  Vec13 derivative(const StateVector& s, double t, double beta) const {
    return state_derivative(s, mats_, loads(s, t, beta));
  }

  const ParameterSet& params() const { return params_; }
  const SystemMatrices& matrices() const { return mats_; }
  const RotorAeroTable& table() const { return table_; }
  const AiryFlow& flow() const { return flow_; }
  const WindSource& wind() const { return wind_; }

 private:
  ParameterSet params_;
  SystemMatrices mats_;
  RotorAeroTable table_;
  AiryFlow flow_;
  WindSource wind_;
};

struct SanityBounds {
  double max_position{500.0};         // m
  double max_tilt{1.0};               // rad, roll/pitch
  double rotor_over_rated{3.0};       // multiples of rated speed
};

struct Scenario {
  double duration{1000.0};
  double dt{0.0125};
  StateVector initial;
  double initial_beta{0.0};
  uint64_t seed{0};
  SanityBounds bounds;
};

struct TrajectoryStep {
  double t{0};
  StateVector x;
  ControlOutput ctrl;
  PlantLoads loads;
};

struct Trajectory {
  double dt{0};
  uint64_t seed{0};
  std::string controller;
  std::string scenario_id;  // hash of the run configuration
  double omega_ref{0};
  std::vector<TrajectoryStep> steps;

  // Channel extraction by documented column name.
  std::vector<double> channel(const std::string& name) const;
};

// Column table shared by the trajectory writer, reader and channel lookup.
struct ChannelDef {
  const char* name;
  double (*get)(const TrajectoryStep&);
};

inline const std::vector<ChannelDef>& trajectory_channels() {
  static const std::vector<ChannelDef> defs = {
      {"t", [](const TrajectoryStep& s) { return s.t; }},
      {"r_x", [](const TrajectoryStep& s) { return s.x.r_p.x(); }},
      {"r_y", [](const TrajectoryStep& s) { return s.x.r_p.y(); }},
      {"r_z", [](const TrajectoryStep& s) { return s.x.r_p.z(); }},
      {"theta_x", [](const TrajectoryStep& s) { return s.x.theta.x; }},
      {"theta_y", [](const TrajectoryStep& s) { return s.x.theta.y; }},
      {"theta_z", [](const TrajectoryStep& s) { return s.x.theta.z; }},
      {"v_x", [](const TrajectoryStep& s) { return s.x.v_p.x(); }},
      {"v_y", [](const TrajectoryStep& s) { return s.x.v_p.y(); }},
      {"v_z", [](const TrajectoryStep& s) { return s.x.v_p.z(); }},
      {"omega_x", [](const TrajectoryStep& s) { return s.x.omega_p.x(); }},
      {"omega_y", [](const TrajectoryStep& s) { return s.x.omega_p.y(); }},
      {"omega_z", [](const TrajectoryStep& s) { return s.x.omega_p.z(); }},
      {"omega_r", [](const TrajectoryStep& s) { return s.x.omega_r; }},
      {"beta", [](const TrajectoryStep& s) { return s.ctrl.beta_start; }},
      {"tau_g", [](const TrajectoryStep& s) { return s.loads.tau_g; }},
      {"xi", [](const TrajectoryStep& s) { return s.ctrl.xi; }},
      {"xi_bar", [](const TrajectoryStep& s) { return s.ctrl.xi_bar; }},
      {"gamma", [](const TrajectoryStep& s) { return s.ctrl.gamma; }},
      {"w_hat_norm", [](const TrajectoryStep& s) { return s.ctrl.w_hat_norm; }},
      {"beta_dot_raw", [](const TrajectoryStep& s) { return s.ctrl.beta_dot_raw; }},
      {"beta_dot", [](const TrajectoryStep& s) { return s.ctrl.beta_rate; }},
      {"buoy_fx", [](const TrajectoryStep& s) { return s.loads.buoy.force.x(); }},
      {"buoy_fy", [](const TrajectoryStep& s) { return s.loads.buoy.force.y(); }},
      {"buoy_fz", [](const TrajectoryStep& s) { return s.loads.buoy.force.z(); }},
      {"buoy_mx", [](const TrajectoryStep& s) { return s.loads.buoy.moment.x(); }},
      {"buoy_my", [](const TrajectoryStep& s) { return s.loads.buoy.moment.y(); }},
      {"buoy_mz", [](const TrajectoryStep& s) { return s.loads.buoy.moment.z(); }},
      {"hydro_fx", [](const TrajectoryStep& s) { return s.loads.hydro.force.x(); }},
      {"hydro_fy", [](const TrajectoryStep& s) { return s.loads.hydro.force.y(); }},
      {"hydro_fz", [](const TrajectoryStep& s) { return s.loads.hydro.force.z(); }},
      {"hydro_mx", [](const TrajectoryStep& s) { return s.loads.hydro.moment.x(); }},
      {"hydro_my", [](const TrajectoryStep& s) { return s.loads.hydro.moment.y(); }},
      {"hydro_mz", [](const TrajectoryStep& s) { return s.loads.hydro.moment.z(); }},
      {"aero_fx", [](const TrajectoryStep& s) { return s.loads.aero.force.x(); }},
      {"aero_fy", [](const TrajectoryStep& s) { return s.loads.aero.force.y(); }},
      {"aero_fz", [](const TrajectoryStep& s) { return s.loads.aero.force.z(); }},
      {"aero_mx", [](const TrajectoryStep& s) { return s.loads.aero.moment.x(); }},
      {"aero_my", [](const TrajectoryStep& s) { return s.loads.aero.moment.y(); }},
      {"aero_mz", [](const TrajectoryStep& s) { return s.loads.aero.moment.z(); }},
      {"moor_fx", [](const TrajectoryStep& s) { return s.loads.moor.force.x(); }},
      {"moor_fy", [](const TrajectoryStep& s) { return s.loads.moor.force.y(); }},
      {"moor_fz", [](const TrajectoryStep& s) { return s.loads.moor.force.z(); }},
      {"moor_mx", [](const TrajectoryStep& s) { return s.loads.moor.moment.x(); }},
      {"moor_my", [](const TrajectoryStep& s) { return s.loads.moor.moment.y(); }},
      {"moor_mz", [](const TrajectoryStep& s) { return s.loads.moor.moment.z(); }},
      {"ff1", [](const TrajectoryStep& s) { return s.loads.fairlead_tension[0]; }},
      {"ff2", [](const TrajectoryStep& s) { return s.loads.fairlead_tension[1]; }},
      {"ff3", [](const TrajectoryStep& s) { return s.loads.fairlead_tension[2]; }},
      {"af1", [](const TrajectoryStep& s) { return s.loads.anchor_tension[0]; }},
      {"af2", [](const TrajectoryStep& s) { return s.loads.anchor_tension[1]; }},
      {"af3", [](const TrajectoryStep& s) { return s.loads.anchor_tension[2]; }},
      {"wind_speed", [](const TrajectoryStep& s) { return s.loads.wind_speed; }},
      {"eta", [](const TrajectoryStep& s) { return s.loads.eta0; }},
  };
  return defs;
}

inline std::vector<double> Trajectory::channel(const std::string& name) const {
  for (const auto& def : trajectory_channels()) {
    if (name == def.name) {
      std::vector<double> out(steps.size());
      for (size_t i = 0; i < steps.size(); ++i) out[i] = def.get(steps[i]);
      return out;
    }
  }
  if (name == "delta_omega_r") {
    std::vector<double> out(steps.size());
    for (size_t i = 0; i < steps.size(); ++i) {
      out[i] = steps[i].x.omega_r - omega_ref;
    }
    return out;
  }
  if (name == "tb_proxy") {  // platform-pitch hydro + mooring moment
    std::vector<double> out(steps.size());
    for (size_t i = 0; i < steps.size(); ++i) {
      out[i] = steps[i].loads.hydro.moment.y() + steps[i].loads.moor.moment.y();
    }
    return out;
  }
  if (name == "br_proxy") {  // aerodynamic hub wrench, pitch axis
    std::vector<double> out(steps.size());
    for (size_t i = 0; i < steps.size(); ++i) {
      out[i] = steps[i].loads.aero.moment.y();
    }
    return out;
  }
  throw OutOfRange("unknown trajectory channel: " + name);
}

inline void check_sanity(const StateVector& s, double t,
                         const SanityBounds& b, double omega_rated) {
  const char* what = nullptr;
  if (s.r_p.cwiseAbs().maxCoeff() > b.max_position) what = "position";
  else if (std::abs(s.theta.x) > b.max_tilt ||
           std::abs(s.theta.y) > b.max_tilt) what = "tilt";
  else if (s.omega_r > b.rotor_over_rated * omega_rated) what = "rotor speed";
  else if (!s.finite()) what = "non-finite state";
  if (what) {
    throw SimulationDiverged("state exceeded sanity bound (" +
                             std::string(what) + ") at t = " +
                             std::to_string(t) + " s");
  }
}

// Fixed-step closed-loop run. The environment is frozen at each step's start
// time; the commanded pitch rate is held across the step so beta ramps
// linearly between controller updates.
inline Trajectory simulate(const PlantModel& plant, PitchController& ctrl,
                           const Scenario& sc) {
  if (!(sc.dt > 0) || !(sc.duration > 0)) {
    throw InvalidParameters("scenario: duration and dt must be > 0");
  }
  const size_t n_steps = static_cast<size_t>(sc.duration / sc.dt + 1e-9);
  Trajectory traj;
  traj.dt = sc.dt;
  traj.seed = sc.seed;
  traj.controller = ctrl.name();
  traj.omega_ref = plant.params().rotor.omega_rated;
  traj.steps.reserve(n_steps + 1);

  StateVector state = sc.initial;
  ctrl.reset(state, sc.initial_beta);
  const double omega_rated = plant.params().rotor.omega_rated;

  for (size_t k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * sc.dt;
    check_sanity(state, t, sc.bounds, omega_rated);
    const ControlOutput out = ctrl.step(state, t, sc.dt, plant.wind().at(t));
    traj.steps.push_back(
        {t, state, out, plant.loads(state, t, out.beta_start)});
    if (k == n_steps) break;

    const auto deriv = [&](const StateVector& s, double tau) {
      const double beta_tau = out.beta_start + (tau - t) * out.beta_rate;
      return plant.derivative(s, t, beta_tau);  // environment frozen at t
    };
    state = step_rk4(state, t, sc.dt, deriv);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Static equilibrium

struct EquilibriumOptions {
  double beta{0};
  double omega_r{0};        // held value, or initial guess when solving
  bool solve_rotor{false};  // include the rotor row as an unknown
  Vec3 wind{Vec3::Zero()};  // constant wind during the solve
  double tol{1e-8};
  int max_iter{200};
};

struct EquilibriumResult {
  StateVector state;
  Vec7 residual{Vec7::Zero()};  // velocity-level residual rows
  bool converged{false};
  int iterations{0};
};

namespace detail {

inline std::string residual_report(const Vec7& r, double tol) {
  static const char* names[7] = {"force_x", "force_y", "force_z",
                                 "moment_x", "moment_y", "moment_z", "rotor"};
  std::string msg;
  for (int i = 0; i < 7; ++i) {
    if (std::abs(r(i)) > tol) {
      msg += std::string(msg.empty() ? "" : ", ") + names[i] + "=" +
             std::to_string(r(i));
    }
  }
  return msg.empty() ? "none" : msg;
}

}  // namespace detail

// Damped Newton iteration on the static balance (rates zeroed, calm water).
// Returns the solved state; throws NoConvergence naming the failing rows.
inline EquilibriumResult solve_equilibrium(const PlantModel& plant,
                                           const EquilibriumOptions& opt) {
  // calm-water copy of the plant's flow: elevation 0, no kinematics
  const AiryFlow calm(WaveSpec{}, plant.params().z_swl,
                      plant.params().hydro.rho_w, plant.params().body.g);

  const auto residual = [&](const Eigen::VectorXd& q) -> Eigen::VectorXd {
    StateVector s;
    s.r_p = q.segment<3>(0);
    s.theta = EulerTriad{q(3), q(4), q(5)};
    s.omega_r = opt.solve_rotor ? q(6) : opt.omega_r;
    PlantLoads loads;
    const std::vector<double> eta(plant.params().cylinders.size(), 0.0);
    loads.buoy = buoyancy_wrench(plant.params().cylinders, s, eta,
                                 plant.params().hydro.rho_w,
                                 plant.params().body.g, plant.params().z_swl);
    loads.hydro = total_hydro(plant.params().cylinders, s, calm, 0.0,
                              plant.params().hydro, plant.params().z_swl);
    const MooringLoads moor = mooring_wrench(plant.params().mooring, s);
    loads.moor = moor.wrench;
    const AeroLoads aero =
        aero_loads(plant.params().rotor, plant.table(), s, opt.wind, opt.beta);
    loads.aero = aero.wrench;
    loads.tau_a = aero.tau_a;
    loads.tau_g = generator_torque(plant.params().rotor, s.omega_r);
    const Vec13 dx = state_derivative(s, plant.matrices(), loads);
    return Eigen::VectorXd(dx.segment<7>(6));
  };

  // Unknowns: platform pose (6) plus optionally the rotor speed. The rotor
  // row is solved by bracketing rather than Newton: the torque surface has a
  // flat zero region past the feathered/overspeed boundary where a Newton
  // step stalls.
  Eigen::VectorXd q = Eigen::VectorXd::Zero(7);
  q(6) = opt.omega_r;

  const auto platform_residual = [&](const Eigen::VectorXd& q7) {
    return Eigen::VectorXd(residual(q7).head(6));
  };

  const auto rotor_residual = [&](double omega, const Eigen::VectorXd& q7) {
    Eigen::VectorXd qq = q7;
    qq(6) = omega;
    return residual(qq)(6);
  };

  const auto solved_norm = [&](const Eigen::VectorXd& r) {
    return opt.solve_rotor ? r.cwiseAbs().maxCoeff()
                           : r.head(6).cwiseAbs().maxCoeff();
  };

  Eigen::VectorXd res = residual(q);
  int it = 0;
  for (; it < opt.max_iter && solved_norm(res) > opt.tol; ++it) {
    // damped Newton on the platform rows with per-component step caps
    Eigen::VectorXd res6 = res.head(6);
    Eigen::MatrixXd jac(6, 6);
    for (int j = 0; j < 6; ++j) {
      const double h = 1e-6 * (1.0 + std::abs(q(j)));
      Eigen::VectorXd qp = q;
      qp(j) += h;
      jac.col(j) = (platform_residual(qp) - res6) / h;
    }
    Eigen::VectorXd step = jac.fullPivLu().solve(-res6);
    double cap = 1.0;
    for (int j = 0; j < 6; ++j) {
      const double lim = j < 3 ? 2.0 : 0.05;
      if (std::abs(step(j)) > lim) cap = std::min(cap, lim / std::abs(step(j)));
    }
    step *= cap;
    double lambda = 1.0;
    const double base = res6.norm();
    while (lambda > 1e-6) {
      Eigen::VectorXd q_try = q;
      q_try.head(6) += lambda * step;
      Eigen::VectorXd res_try;
      try {
        res_try = platform_residual(q_try);
      } catch (const Error&) {
        lambda *= 0.5;
        continue;
      }
      if (res_try.norm() < base || lambda <= 2e-6) {
        q = q_try;
        break;
      }
      lambda *= 0.5;
    }

    if (opt.solve_rotor) {
      // grid-scan the torque residual and bisect inside the last
      // positive-to-negative sign change (the aerodynamically stable
      // balance; the torque surface decreases through it)
      const double w_lo = std::max(plant.params().rotor.omega_cut_in, 1e-3);
      const double w_hi = 3.0 * plant.params().rotor.omega_rated;
      const int n_scan = 240;
      double lo = 0, hi = 0, f_lo = 0;
      bool found = false;
      double prev_w = w_lo, prev_f = rotor_residual(w_lo, q);
      for (int g = 1; g <= n_scan; ++g) {
        const double w = w_lo + (w_hi - w_lo) * g / n_scan;
        const double f = rotor_residual(w, q);
        if (prev_f > 0.0 && f <= 0.0) {
          lo = prev_w;
          hi = w;
          f_lo = prev_f;
          found = true;
        }
        prev_w = w;
        prev_f = f;
      }
      if (found) {
        for (int b = 0; b < 200 && hi - lo > 1e-15 * hi; ++b) {
          const double mid = 0.5 * (lo + hi);
          const double f_mid = rotor_residual(mid, q);
          if (f_lo > 0.0 && f_mid <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
            f_lo = f_mid;
          }
        }
        q(6) = 0.5 * (lo + hi);
      }
    }
    res = residual(q);
  }

  EquilibriumResult out;
  out.iterations = it;
  out.state.r_p = q.segment<3>(0);
  out.state.theta = EulerTriad{q(3), q(4), q(5)};
  out.state.omega_r = q(6);
  out.residual = res;  // rotor row doubles as a diagnostic when held
  out.converged = solved_norm(res) <= opt.tol;
  if (!out.converged) {
    throw NoConvergence("equilibrium solve failed; residual rows above "
                        "tolerance: " +
                        detail::residual_report(out.residual, opt.tol));
  }
  return out;
}

}  // namespace fwt
