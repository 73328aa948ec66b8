#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fwt/config.hpp"
#include "fwt/dynamics.hpp"

using namespace fwt;

namespace {

ParameterSet reference_params() {
  return load_parameters("data/params_oc4_5mw.json");
}

PlantModel calm_plant() {
  return PlantModel(reference_params(), RotorAeroTable::surrogate(),
                    WaveSpec{}, WindSource::constant(0.0));
}

// Total kinetic + potential energy of the multibody stack for the
// conservative-subsystem check: structural KE, gravity PE of each component
// and the potential of a constant buoyant force acting at a fixed body point.
double mechanical_energy(const StateVector& s, const BodyProperties& b,
                         double f_buoy, const Vec3& r_buoy) {
  const Mat3 R = rotation_matrix(s.theta);
  const Vec3 om = s.omega_p;

  const Vec3 r_t(0, 0, b.H_t);
  const Vec3 r_nc(b.h_nc, 0, b.H_r);
  const Vec3 r_r(-b.h_r, 0, b.H_r);
  const Vec3 v_t = s.v_p + om.cross(r_t);
  const Vec3 v_nc = s.v_p + om.cross(r_nc);
  const Vec3 v_r = s.v_p + om.cross(r_r);
  const Vec3 om_rotor = om + Vec3(s.omega_r, 0, 0);

  double ke = 0.5 * b.m_p * s.v_p.squaredNorm() +
              0.5 * om.dot(b.I_p.asDiagonal() * om);
  ke += 0.5 * b.m_t * v_t.squaredNorm() +
        0.5 * om.dot(b.I_t.asDiagonal() * om);
  ke += 0.5 * b.m_nc * v_nc.squaredNorm() +
        0.5 * om.dot(b.I_nc.asDiagonal() * om);
  ke += 0.5 * b.m_r * v_r.squaredNorm() +
        0.5 * om_rotor.dot(b.I_r.asDiagonal() * om_rotor);

  double pe = b.m_p * b.g * s.r_p.z();
  pe += b.m_t * b.g * (s.r_p + R * r_t).z();
  pe += b.m_nc * b.g * (s.r_p + R * r_nc).z();
  pe += b.m_r * b.g * (s.r_p + R * r_r).z();
  pe -= f_buoy * (s.r_p + R * r_buoy).z();
  return ke + pe;
}

}  // namespace

TEST_CASE("rk4 reproduces the exponential decay test system") {
  // x_dot = -x on the first state slot
  const auto decay = [](const StateVector& s, double) {
    Vec13 d = Vec13::Zero();
    d(0) = -s.r_p.x();
    return d;
  };
  StateVector s;
  s.r_p.x() = 1.0;
  const StateVector next = step_rk4(s, 0.0, 0.1, decay);
  REQUIRE(next.r_p.x() == Catch::Approx(0.90483750).epsilon(1e-8));
  REQUIRE(std::abs(next.r_p.x() - std::exp(-0.1)) < 1e-7);

  SECTION("fourth-order convergence on step halving") {
    auto integrate = [&](double dt) {
      StateVector x;
      x.r_p.x() = 1.0;
      const int n = static_cast<int>(1.0 / dt + 0.5);
      for (int i = 0; i < n; ++i) x = step_rk4(x, i * dt, dt, decay);
      return std::abs(x.r_p.x() - std::exp(-1.0));
    };
    const double ratio = integrate(0.05) / integrate(0.025);
    REQUIRE(ratio > 12.0);
    REQUIRE(ratio < 20.0);
  }

  SECTION("zero derivative leaves the state unchanged") {
    const auto zero = [](const StateVector&, double) { return Vec13::Zero(); };
    StateVector x;
    x.r_p = Vec3(1, 2, 3);
    x.omega_r = 1.5;
    const StateVector y = step_rk4(x, 0.0, 0.1, zero);
    REQUIRE((y.pack() - x.pack()).norm() == 0.0);
  }
}

TEST_CASE("kinematic rows equal the frame maps") {
  const PlantModel plant = calm_plant();
  StateVector s;
  s.theta = EulerTriad{0.05, -0.1, 0.2};
  s.v_p = Vec3(0.7, -0.3, 0.2);
  s.omega_p = Vec3(0.01, 0.02, -0.03);
  const Vec13 dx = plant.derivative(s, 0.0, 0.0);
  const Mat3 R = rotation_matrix(s.theta);
  const Mat3 J = euler_rate_map(s.theta);
  REQUIRE((dx.segment<3>(0) - R * s.v_p).norm() == 0.0);
  REQUIRE((dx.segment<3>(3) - J * s.omega_p).norm() == 0.0);
}

TEST_CASE("calm equilibrium balances the static loads") {
  const PlantModel plant = calm_plant();
  const EquilibriumResult eq = solve_equilibrium(plant, EquilibriumOptions{});
  REQUIRE(eq.converged);
  REQUIRE(eq.residual.head<6>().cwiseAbs().maxCoeff() < 1e-8);
  // symmetry: no roll or yaw at equilibrium
  REQUIRE(std::abs(eq.state.theta.x) < 1e-9);
  REQUIRE(std::abs(eq.state.theta.z) < 1e-9);

  // feathered blades in calm air leave the balance untouched
  const Vec13 dx = plant.derivative(eq.state, 0.0, M_PI / 2.0);
  REQUIRE(dx.cwiseAbs().maxCoeff() < 1e-6);

  // buoyancy + gravity + mooring close to machine-level at the solution
  const PlantLoads loads = plant.loads(eq.state, 0.0, 0.0);
  const double rho_g_vd = loads.buoy.force.norm();
  const Vec3 gravity(0, 0, -plant.matrices().a[0] * plant.params().body.g);
  const Vec3 total = loads.buoy.force + loads.moor.force +
                     rotation_matrix(eq.state.theta).transpose() * gravity;
  REQUIRE(total.norm() < 1e-6 * rho_g_vd);
}

TEST_CASE("held rotor row reports the above-rated torque imbalance") {
  const ParameterSet p = reference_params();
  const PlantModel plant(p, RotorAeroTable::surrogate(), WaveSpec{},
                         WindSource::constant(18.0));
  EquilibriumOptions opt;
  opt.wind = Vec3(18, 0, 0);
  opt.beta = 0.0;
  opt.omega_r = p.rotor.omega_rated;  // held
  const EquilibriumResult eq = solve_equilibrium(plant, opt);
  REQUIRE(eq.converged);
  // zero pitch at rated speed in 18 m/s wind: tau_a far above tau_g
  REQUIRE(eq.residual(6) > 0.0);
  REQUIRE(eq.residual(6) * plant.matrices().I_rx > 1e6);
}

TEST_CASE("free rotor row finds the fixed-pitch torque balance") {
  const ParameterSet p = reference_params();
  const PlantModel plant(p, RotorAeroTable::surrogate(), WaveSpec{},
                         WindSource::constant(18.0));
  EquilibriumOptions opt;
  opt.wind = Vec3(18, 0, 0);
  opt.beta = 0.0;
  opt.omega_r = p.rotor.omega_rated;
  opt.solve_rotor = true;
  const EquilibriumResult eq = solve_equilibrium(plant, opt);
  REQUIRE(eq.converged);
  REQUIRE(eq.state.omega_r > p.rotor.omega_rated);
  const AeroLoads aero = aero_loads(p.rotor, plant.table(), eq.state,
                                    Vec3(18, 0, 0), 0.0);
  REQUIRE(aero.tau_a ==
          Catch::Approx(p.rotor.tau_g_rated).epsilon(1e-6));
}

TEST_CASE("gyroscopic coupling accelerates yaw for a spinning rotor") {
  const PlantModel plant = calm_plant();
  StateVector s;
  s.omega_p = Vec3(0, 0.02, 0);
  s.omega_r = 1.2;
  const Vec13 spinning = plant.derivative(s, 0.0, 0.0);
  s.omega_r = 0.0;
  const Vec13 parked = plant.derivative(s, 0.0, 0.0);
  // pitching with spin produces a yaw acceleration of gyroscopic sign
  REQUIRE(spinning(11) - parked(11) > 0.0);
}

TEST_CASE("zero environment holds the equilibrium for 100 s") {
  const PlantModel plant = calm_plant();
  const EquilibriumResult eq = solve_equilibrium(plant, EquilibriumOptions{});
  Scenario sc;
  sc.duration = 100.0;
  sc.dt = 0.0125;
  sc.initial = eq.state;
  FixedPitchController ctrl(0.0);
  const Trajectory traj = simulate(plant, ctrl, sc);
  const Vec13 ref = eq.state.pack();
  double worst = 0;
  for (const auto& step : traj.steps) {
    worst = std::max(worst, (step.x.pack() - ref).cwiseAbs().maxCoeff());
  }
  REQUIRE(worst < 1e-4);
}

TEST_CASE("identical scenarios give bit-identical trajectories") {
  const ParameterSet p = reference_params();
  WaveSpec wave;
  wave.H_s = 3.0;
  wave.T_p = 10.0;
  auto make_traj = [&] {
    PlantModel plant(p, RotorAeroTable::surrogate(), wave,
                     WindSource::spectral(18.0, 0.10, 42, 20.0));
    Scenario sc;
    sc.duration = 20.0;
    sc.dt = 0.0125;
    sc.seed = 42;
    sc.initial.r_p.x() = 5.0;
    sc.initial.theta.y = 9.0 * M_PI / 180.0;
    sc.initial.omega_r = p.rotor.omega_rated;
    FixedPitchController ctrl(0.0);
    return simulate(plant, ctrl, sc);
  };
  const Trajectory a = make_traj();
  const Trajectory b = make_traj();
  REQUIRE(a.steps.size() == b.steps.size());
  for (size_t i = 0; i < a.steps.size(); ++i) {
    REQUIRE((a.steps[i].x.pack() - b.steps[i].x.pack()).cwiseAbs()
                .maxCoeff() == 0.0);
  }
}

TEST_CASE("divergent states abort the run") {
  const PlantModel plant = calm_plant();
  Scenario sc;
  sc.duration = 10.0;
  sc.initial.r_p.x() = 1000.0;  // outside the position sanity bound
  FixedPitchController ctrl(0.0);
  REQUIRE_THROWS_AS(simulate(plant, ctrl, sc), SimulationDiverged);
}

TEST_CASE("conservative subsystem conserves energy over 100 s") {
  ParameterSet p = reference_params();
  p.body.h_nc = 0.0;
  p.body.h_r = 0.0;  // offset-mass gravity terms vanish (a3 = m_d = 0)
  for (auto& c : p.cylinders) {
    c.C_d = c.C_a = c.C_dz = c.C_az = 0.0;  // no drag, no added mass
  }
  const SystemMatrices mats =
      assemble_system(p.body, p.cylinders, p.hydro.rho_w);
  REQUIRE(mats.Ma.cwiseAbs().maxCoeff() == 0.0);

  // constant buoyant force equal to the weight, acting at a fixed body point
  // high enough to keep the frozen-geometry pitch stiffness positive
  const double f_buoy = mats.a[0] * p.body.g;
  const Vec3 r_buoy(0, 0, 10.0);
  const auto deriv = [&](const StateVector& s, double) {
    PlantLoads loads;
    const Mat3 R = rotation_matrix(s.theta);
    loads.buoy.force = R.transpose() * (f_buoy * Vec3::UnitZ());
    loads.buoy.moment = r_buoy.cross(loads.buoy.force);
    return state_derivative(s, mats, loads);
  };

  StateVector s;
  s.theta = EulerTriad{1.0 * M_PI / 180.0, 2.0 * M_PI / 180.0, 0.0};
  s.omega_p = Vec3(0.002, -0.003, 0.001);
  s.omega_r = 1.0;

  StateVector rest;
  const double e_rest = mechanical_energy(rest, p.body, f_buoy, r_buoy);
  const double e0 =
      mechanical_energy(s, p.body, f_buoy, r_buoy) - e_rest;
  REQUIRE(e0 > 0.0);

  const double dt = 0.0125;
  double worst = 0;
  for (int k = 0; k < 8000; ++k) {
    s = step_rk4(s, k * dt, dt, deriv);
    const double e =
        mechanical_energy(s, p.body, f_buoy, r_buoy) - e_rest;
    worst = std::max(worst, std::abs(e - e0));
  }
  REQUIRE(worst < 1e-3 * e0);
}

TEST_CASE("free tumbling conserves angular momentum over 60 s") {
  ParameterSet p = reference_params();
  p.body.h_nc = 0.0;
  p.body.h_r = 0.0;
  p.body.H_t = 0.0;
  p.body.H_r = 1e-9;  // all masses on the spin axis; gravity through the CM
  for (auto& c : p.cylinders) c.C_d = c.C_a = c.C_dz = c.C_az = 0.0;
  const SystemMatrices mats =
      assemble_system(p.body, p.cylinders, p.hydro.rho_w);

  // buoyant force through the CM cancels gravity exactly; no external moment
  const auto deriv = [&](const StateVector& s, double) {
    PlantLoads loads;
    const Mat3 R = rotation_matrix(s.theta);
    loads.buoy.force =
        R.transpose() * (mats.a[0] * p.body.g * Vec3::UnitZ());
    return state_derivative(s, mats, loads);
  };

  StateVector s;
  s.omega_p = Vec3(0.05, 0.02, 0.03);
  s.omega_r = 1.2;

  const auto momentum = [&](const StateVector& x) {
    const Vec3 h(mats.a[3] * x.omega_p.x() + mats.I_rx * x.omega_r,
                 mats.a[4] * x.omega_p.y(), mats.a[6] * x.omega_p.z());
    return (rotation_matrix(x.theta) * h).norm();
  };
  const double h0 = momentum(s);
  const double dt = 0.0125;
  double worst = 0;
  for (int k = 0; k < 4800; ++k) {
    s = step_rk4(s, k * dt, dt, deriv);
    worst = std::max(worst, std::abs(momentum(s) - h0));
  }
  REQUIRE(worst < 1e-3 * h0);
}

TEST_CASE("recorded velocities integrate to the recorded positions") {
  const ParameterSet p = reference_params();
  WaveSpec wave;
  wave.H_s = 2.0;
  wave.T_p = 9.0;
  auto run = [&](double dt) {
    PlantModel plant(p, RotorAeroTable::surrogate(), wave,
                     WindSource::constant(16.0));
    Scenario sc;
    sc.duration = 5.0;
    sc.dt = dt;
    sc.initial.omega_r = p.rotor.omega_rated;
    FixedPitchController ctrl(0.0);
    const Trajectory traj = simulate(plant, ctrl, sc);
    double worst = 0;
    for (size_t i = 1; i + 1 < traj.steps.size(); ++i) {
      const Vec3 fd =
          (traj.steps[i + 1].x.r_p - traj.steps[i - 1].x.r_p) / (2.0 * dt);
      const Vec3 rv = rotation_matrix(traj.steps[i].x.theta) *
                      traj.steps[i].x.v_p;
      worst = std::max(worst, (fd - rv).norm());
    }
    return worst;
  };
  const double coarse = run(0.025);
  const double fine = run(0.0125);
  REQUIRE(coarse < 1e-3);                 // small in absolute terms
  const double ratio = coarse / fine;     // central difference is O(dt^2)
  REQUIRE(ratio > 3.0);
  REQUIRE(ratio < 5.5);
}

TEST_CASE("scenario rejects non-positive step sizes") {
  const PlantModel plant = calm_plant();
  Scenario sc;
  sc.dt = 0.0;
  FixedPitchController ctrl(0.0);
  REQUIRE_THROWS_AS(simulate(plant, ctrl, sc), InvalidParameters);
}
