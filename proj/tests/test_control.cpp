#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fwt/control.hpp"

using namespace fwt;

namespace {

StateVector state_with_xi(double delta_omega, double wy = 0.0,
                          double theta_x = 0.0, double wz = 0.0,
                          const RiseConfig& cfg = RiseConfig{}) {
  StateVector s;
  s.omega_r = cfg.omega_ref + delta_omega;
  s.theta.x = theta_x;
  s.omega_p = Vec3(0, wy, wz);
  return s;
}

}  // namespace

TEST_CASE("tracking error") {
  RiseConfig cfg;

  SECTION("rated speed with no platform rate gives zero") {
    REQUIRE(tracking_error(state_with_xi(0.0), cfg) == 0.0);
  }

  SECTION("spec arithmetic example") {
    cfg.k = 4.5;
    const StateVector s = state_with_xi(0.1, 0.01);
    REQUIRE(tracking_error(s, cfg) == Catch::Approx(0.145));
  }

  SECTION("matches the regressor form on random states") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      StateVector s;
      s.r_p = Vec3(u(rng), u(rng), u(rng)) * 10;
      s.theta = EulerTriad{u(rng), u(rng), u(rng)};
      s.v_p = Vec3(u(rng), u(rng), u(rng));
      s.omega_p = Vec3(u(rng), u(rng), u(rng)) * 0.2;
      s.omega_r = cfg.omega_ref + u(rng);
      // m = [0_1x9, 0, k cos(theta_x), -k sin(theta_x), 1]
      Vec13 m = Vec13::Zero();
      m(10) = cfg.k * std::cos(s.theta.x);
      m(11) = -cfg.k * std::sin(s.theta.x);
      m(12) = 1.0;
      const double via_m = m.dot(s.pack()) - cfg.omega_ref;
      REQUIRE(tracking_error(s, cfg) ==
              Catch::Approx(via_m).margin(1e-14));
    }
  }
}

TEST_CASE("filtered error estimator") {
  RiseConfig cfg;
  cfg.c = 2.0;
  const double dt = 0.0125;

  SECTION("constant input settles to c*xi") {
    ControllerState st;
    double xi_bar = 0;
    for (int i = 0; i < 400; ++i) {
      xi_bar = filtered_error(0.3, st, dt, cfg);
      st.primed = true;
      st.xi_prev = 0.3;
    }
    REQUIRE(xi_bar == Catch::Approx(2.0 * 0.3).epsilon(1e-9));
  }

  SECTION("ramp input recovers the slope") {
    ControllerState st;
    const double slope = 0.7;
    double xi_dot_est = 0;
    for (int i = 0; i < 400; ++i) {
      const double xi = slope * i * dt;
      const double xb = filtered_error(xi, st, dt, cfg);
      xi_dot_est = xb - cfg.c * xi;
      st.primed = true;
      st.xi_prev = xi;
    }
    REQUIRE(xi_dot_est == Catch::Approx(slope).epsilon(0.01));
  }

  SECTION("zero input stays zero") {
    ControllerState st;
    for (int i = 0; i < 50; ++i) {
      REQUIRE(filtered_error(0.0, st, dt, cfg) == 0.0);
      st.primed = true;
      st.xi_prev = 0.0;
    }
  }
}

TEST_CASE("rbf features") {
  RiseConfig cfg;
  const RbfNetwork net(cfg.n_basis, cfg.center_seed, cfg.envelope);

  SECTION("a center evaluates its own component to one") {
    // invert the scaling for center 0
    Eigen::Matrix<double, 15, 1> z_raw;
    for (int i = 0; i < 15; ++i) {
      const double span = cfg.envelope.hi[i] - cfg.envelope.lo[i];
      z_raw(i) = cfg.envelope.lo[i] + net.centers()[0](i) * span;
    }
    const Eigen::VectorXd phi = net.features(z_raw);
    REQUIRE(phi(0) == Catch::Approx(1.0).epsilon(1e-12));
  }

  SECTION("norm bound sqrt(N) over random inputs") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    const double bound = std::sqrt(static_cast<double>(cfg.n_basis));
    for (int i = 0; i < 10000; ++i) {
      Eigen::Matrix<double, 15, 1> z;
      for (int d = 0; d < 15; ++d) z(d) = u(rng);
      const double n = net.features(z).norm();
      REQUIRE(n <= bound);
      REQUIRE(n > 0.0);
    }
  }

  SECTION("identical seeds give identical centers") {
    const RbfNetwork a(50, 99, cfg.envelope);
    const RbfNetwork b(50, 99, cfg.envelope);
    const RbfNetwork c(50, 100, cfg.envelope);
    for (int i = 0; i < 50; ++i) {
      REQUIRE((a.centers()[i] - b.centers()[i]).norm() == 0.0);
    }
    REQUIRE((a.centers()[0] - c.centers()[0]).norm() > 0.0);
  }
}

TEST_CASE("rise step") {
  RiseConfig cfg;
  ActuatorLimits lim;
  const RbfNetwork net(cfg.n_basis, cfg.center_seed, cfg.envelope);
  const double dt = 0.0125;

  auto z_of = [&](const StateVector& s, double beta) {
    Eigen::Matrix<double, 15, 1> z;
    z << s.pack(), beta, 18.0;
    return z;
  };

  SECTION("exact fixed point at zero error (sgn(0) = 0)") {
    ControllerState st;
    st.W_hat = Eigen::VectorXd::Zero(cfg.n_basis);
    const StateVector s = state_with_xi(0.0);
    for (int i = 0; i < 10; ++i) {
      const ControlOutput out = rise_step(st, s, z_of(s, st.beta), dt, cfg,
                                          lim, net);
      REQUIRE(out.xi == 0.0);
      REQUIRE(out.beta_dot_raw == 0.0);
      REQUIRE(st.gamma == 0.0);
      REQUIRE(st.beta == 0.0);
    }
  }

  SECTION("feedback term (k_c+1)*xi_bar") {
    ControllerState st;
    st.W_hat = Eigen::VectorXd::Zero(cfg.n_basis);
    st.primed = true;
    st.xi_prev = 0.5;  // no difference contribution
    st.xi_dot_filt = 0.0;
    const StateVector s = state_with_xi(0.5);
    const double tiny = 1e-9;
    const ControlOutput out = rise_step(st, s, z_of(s, 0.0), tiny, cfg, lim,
                                        net);
    REQUIRE(out.xi_bar == Catch::Approx(cfg.c * 0.5));
    // (k_c + 1) * 1.0 with W = 0 and gamma ~ c*dt*|xi|
    REQUIRE(out.beta_dot_raw ==
            Catch::Approx((cfg.k_c + 1.0) * 1.0).margin(1e-6));
  }

  SECTION("gamma growth under a held error matches the closed form") {
    ControllerState st;
    st.W_hat = Eigen::VectorXd::Zero(cfg.n_basis);
    const double xi0 = 0.3;
    const StateVector s = state_with_xi(xi0);
    const int n = 400;
    for (int i = 0; i < n; ++i) {
      rise_step(st, s, z_of(s, st.beta), dt, cfg, lim, net);
      const double cf = gamma_closed_form(st, xi0, cfg);
      REQUIRE(std::abs(st.gamma - cf) <= 1e-9 * (1.0 + std::abs(st.gamma)));
    }
    // first call carries no increment, so (n-1) right-endpoint samples
    REQUIRE(st.gamma ==
            Catch::Approx(cfg.c * xi0 * (n - 1) * dt).epsilon(1e-9));
  }

  SECTION("gamma integral equals the closed form on a sign-changing error") {
    ControllerState st;
    st.W_hat = Eigen::VectorXd::Zero(cfg.n_basis);
    for (int i = 0; i < 2000; ++i) {
      const double xi = 0.2 * std::sin(0.8 * i * dt) +
                        0.05 * std::sin(5.3 * i * dt);
      const StateVector s = state_with_xi(xi);
      rise_step(st, s, z_of(s, st.beta), dt, cfg, lim, net);
      const double cf = gamma_closed_form(st, xi, cfg);
      REQUIRE(std::abs(st.gamma - cf) <= 1e-9 * (1.0 + std::abs(st.gamma)));
    }
  }

  SECTION("pitch rate and magnitude are clamped, output stays continuous") {
    ControllerState st;
    st.W_hat = Eigen::VectorXd::Zero(cfg.n_basis);
    double beta_prev = st.beta;
    for (int i = 0; i < 1200; ++i) {
      const StateVector s = state_with_xi(2.0);  // large persistent error
      const ControlOutput out = rise_step(st, s, z_of(s, st.beta), dt, cfg,
                                          lim, net);
      REQUIRE(std::abs(out.beta_end - out.beta_start) <=
              lim.rate_max * dt * (1.0 + 1e-12));
      REQUIRE(out.beta_start == beta_prev);
      REQUIRE(st.beta <= lim.beta_max);
      REQUIRE(st.beta >= lim.beta_min);
      beta_prev = st.beta;
    }
    REQUIRE(st.beta == Catch::Approx(lim.beta_max));  // railed high
  }

  SECTION("weight estimate respects the adaptation bound") {
    ControllerState st;
    st.W_hat = Eigen::VectorXd::Zero(cfg.n_basis);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    const double bound =
        cfg.c * std::sqrt(static_cast<double>(cfg.n_basis)) / cfg.k_w + 1e-6;
    for (int i = 0; i < 5000; ++i) {
      const StateVector s = state_with_xi(u(rng));
      rise_step(st, s, z_of(s, st.beta), dt, cfg, lim, net);
      REQUIRE(st.W_hat.norm() <= bound);
    }
  }
}

TEST_CASE("gspi step") {
  GspiConfig cfg;
  ActuatorLimits lim;
  const double dt = 0.0125;

  SECTION("gain schedule is unity at zero pitch") {
    REQUIRE(cfg.gain_schedule(0.0) == 1.0);
    REQUIRE(cfg.gain_schedule(cfg.beta_k) == Catch::Approx(0.5));
  }

  SECTION("zero error and zero integrator hold the pitch") {
    GspiState st;
    const ControlOutput out = gspi_step(st, cfg.omega_ref, dt, cfg, lim);
    REQUIRE(out.beta_end == 0.0);
    REQUIRE(st.integral == 0.0);
  }

  SECTION("priming from a nonzero pitch holds it at zero error") {
    GspiController ctrl(cfg, lim);
    StateVector s;
    s.omega_r = cfg.omega_ref;
    ctrl.reset(s, 0.2);
    for (int i = 0; i < 100; ++i) {
      const ControlOutput out = ctrl.step(s, i * dt, dt, Vec3(18, 0, 0));
      REQUIRE(out.beta_end == Catch::Approx(0.2).margin(1e-12));
    }
  }

  SECTION("anti-windup freezes the integrator at the high stop") {
    GspiState st;
    st.beta = lim.beta_max;
    st.integral = (lim.beta_max / cfg.gain_schedule(lim.beta_max)) / cfg.ki;
    const double integral_before = st.integral;
    for (int i = 0; i < 200; ++i) {
      const ControlOutput out = gspi_step(st, cfg.omega_ref + 0.5, dt, cfg,
                                          lim);
      REQUIRE(out.beta_end == lim.beta_max);
    }
    REQUIRE(st.integral == integral_before);
  }
}

TEST_CASE("lyapunov monitor emits the computable terms") {
  RiseConfig cfg;

  SECTION("constant inputs give a constant series") {
    const std::vector<double> xi(100, 0.0);
    const std::vector<double> wn(100, 0.4);
    const LyapunovSeries out = lyapunov_monitor(xi, wn, cfg);
    REQUIRE(out.total.size() == xi.size());
    for (double v : out.half_xi_sq) REQUIRE(v == 0.0);
    for (size_t i = 1; i < out.total.size(); ++i) {
      REQUIRE(out.total[i] == out.total[0]);
    }
  }

  SECTION("series length matches the trajectory length") {
    const std::vector<double> xi(37, 0.1);
    const std::vector<double> wn(37, 0.0);
    REQUIRE(lyapunov_monitor(xi, wn, cfg).half_xi_sq.size() == 37);
  }
}

TEST_CASE("actuator limits validation") {
  ActuatorLimits lim;
  lim.beta_min = 0.5;
  lim.beta_max = 0.2;
  REQUIRE_THROWS_AS(lim.validate(), InvalidParameters);
}
