#pragma once

// Blade pitch controllers: the adaptive RISE law with an RBF online
// approximator and integral sign-of-error gain, and the gain-scheduled PI
// baseline. All controllers run at the integrator rate and emit a pitch rate
// that is held over the step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fwt/errors.hpp"
#include "fwt/state.hpp"

namespace fwt {

struct ActuatorLimits {
  double beta_min{0.0};                    // rad
  double beta_max{M_PI / 2.0};             // rad
  double rate_max{8.0 * M_PI / 180.0};     // rad/s

  void validate() const {
    if (!(beta_min < beta_max) || !(rate_max > 0)) {
      throw InvalidParameters("actuator limits: need beta_min < beta_max and "
                              "rate_max > 0");
    }
  }
};

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Scaling envelope for the approximator input Z = [X, beta, v_w].
struct FeatureEnvelope {
  std::array<double, 15> lo;
  std::array<double, 15> hi;

  static FeatureEnvelope defaults() {
    FeatureEnvelope e{};
    auto set = [&](int i, double a, double b) { e.lo[i] = a; e.hi[i] = b; };
    set(0, -10, 20); set(1, -10, 10); set(2, -5, 5);        // r_p
    set(3, -0.2, 0.2); set(4, -0.2, 0.2); set(5, -0.2, 0.2);  // theta
    set(6, -2, 2); set(7, -2, 2); set(8, -2, 2);            // v_p
    set(9, -0.1, 0.1); set(10, -0.1, 0.1); set(11, -0.1, 0.1);  // omega
    set(12, 0.6, 2.2);                                      // rotor speed
    set(13, 0.0, 0.8);                                      // beta
    set(14, 8.0, 28.0);                                     // wind speed
    return e;
  }
};

struct RiseConfig {
  double k{4.5};      // platform-rate coupling gain (s)
  double c{2.0};      // filter gain (1/s)
  double k_c{10.0};   // feedback gain
  int n_basis{50};    // hidden nodes
  double l_w{1e-3};   // learning rate
  double k_w{1e-3};   // damping rate
  double omega_ref{1.267109036947883};  // rated rotor speed (rad/s)
  double xi_filter_cutoff_hz{5.0};
  uint64_t center_seed{0x5eedULL};
  FeatureEnvelope envelope{FeatureEnvelope::defaults()};

  void validate() const {
    if (!(k > 0 && c > 0 && k_c > 0 && l_w > 0 && k_w > 0 && n_basis >= 1)) {
      throw InvalidParameters("rise: gains must be positive and N >= 1");
    }
  }
};

// xi = (Omega_r - Omega_r0) + k * theta_dot_y.
inline double tracking_error(const StateVector& s, const RiseConfig& cfg) {
  return (s.omega_r - cfg.omega_ref) + cfg.k * platform_pitch_rate(s);
}

// Gaussian RBF layer over seeded Halton centers in the scaled input cube.
// Every activation lies in (0, 1], so ||phi|| <= sqrt(N).
class RbfNetwork {
 public:
  RbfNetwork(int n_basis, uint64_t seed, const FeatureEnvelope& env)
      : env_(env) {
    centers_ = halton_centers(n_basis, seed);
    // width: mean nearest-center distance in the unit cube
    double acc = 0;
    for (int i = 0; i < n_basis; ++i) {
      double best = 1e300;
      for (int j = 0; j < n_basis; ++j) {
        if (j == i) continue;
        best = std::min(best, (centers_[i] - centers_[j]).squaredNorm());
      }
      acc += std::sqrt(best);
    }
    width_ = n_basis > 1 ? acc / n_basis : 1.0;
  }

  Eigen::VectorXd features(const Eigen::Matrix<double, 15, 1>& z_raw) const {
    Eigen::Matrix<double, 15, 1> z;
    for (int i = 0; i < 15; ++i) {
      const double span = env_.hi[i] - env_.lo[i];
      z(i) = std::clamp((z_raw(i) - env_.lo[i]) / span, 0.0, 1.0);
    }
    Eigen::VectorXd phi(centers_.size());
    const double inv2s2 = 1.0 / (2.0 * width_ * width_);
    for (size_t j = 0; j < centers_.size(); ++j) {
      phi(j) = std::exp(-(z - centers_[j]).squaredNorm() * inv2s2);
    }
    return phi;
  }

  const std::vector<Eigen::Matrix<double, 15, 1>>& centers() const {
    return centers_;
  }
  double width() const { return width_; }

 private:
  static std::vector<Eigen::Matrix<double, 15, 1>> halton_centers(
      int n, uint64_t seed) {
    static constexpr int primes[15] = {2,  3,  5,  7,  11, 13, 17, 19,
                                       23, 29, 31, 37, 41, 43, 47};
    // seeded Cranley-Patterson rotation keeps the low-discrepancy layout
    // while making the placement reproducible per seed
    std::array<double, 15> shift{};
    uint64_t h = seed * 0x9e3779b97f4a7c15ULL + 1;
    for (auto& v : shift) {
      h ^= h >> 30;
      h *= 0xbf58476d1ce4e5b9ULL;
      h ^= h >> 27;
      v = static_cast<double>(h % 1000003ULL) / 1000003.0;
    }
    std::vector<Eigen::Matrix<double, 15, 1>> c(n);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < 15; ++d) {
        double f = 1.0, r = 0.0;
        int idx = i + 1;
        while (idx > 0) {
          f /= primes[d];
          r += f * (idx % primes[d]);
          idx /= primes[d];
        }
        c[i](d) = std::fmod(r + shift[d], 1.0);
      }
    }
    return c;
  }

  FeatureEnvelope env_;
  std::vector<Eigen::Matrix<double, 15, 1>> centers_;
  double width_{1.0};
};

struct ControllerState {
  Eigen::VectorXd W_hat;       // weight estimate
  double gamma{0};             // adaptive gain
  double beta{0};              // commanded pitch (rad)
  double xi_prev{0};
  double xi_dot_filt{0};
  double xi0_abs{0};           // |xi(0)| for the closed-form cross-check
  double int_abs_xi{0};        // integral of |xi|
  bool primed{false};
};

// Causal pitch-rate estimate of xi_dot: backward difference through a
// first-order low-pass. Returns xi_bar = xi_dot_est + c xi.
inline double filtered_error(double xi, ControllerState& st, double dt,
                             const RiseConfig& cfg) {
  if (!st.primed) {
    st.xi_prev = xi;
    st.xi_dot_filt = 0.0;
  }
  const double raw = (xi - st.xi_prev) / dt;
  const double alpha =
      1.0 - std::exp(-2.0 * M_PI * cfg.xi_filter_cutoff_hz * dt);
  st.xi_dot_filt += alpha * (raw - st.xi_dot_filt);
  return st.xi_dot_filt + cfg.c * xi;
}

struct ControlOutput {
  double beta_start{0};         // pitch applied at the step start (rad)
  double beta_end{0};           // pitch at the step end after clamping
  double beta_rate{0};          // applied (clamped) pitch rate (rad/s)
  double beta_dot_raw{0};       // commanded rate before clamping
  double xi{0}, xi_bar{0}, gamma{0}, w_hat_norm{0};
};

// One RISE update: adaptive laws by explicit Euler at the control rate, pitch
// rate integrated and clamped against the actuator limits. The gamma state is
// advanced with the exact per-step integral d|xi| + c|xi|dt, which the
// closed-form reconstruction must match.
inline ControlOutput rise_step(ControllerState& st, const StateVector& s,
                               const Eigen::Matrix<double, 15, 1>& z,
                               double dt, const RiseConfig& cfg,
                               const ActuatorLimits& lim,
                               const RbfNetwork& rbf) {
  const double xi = tracking_error(s, cfg);
  const double xi_bar = filtered_error(xi, st, dt, cfg);

  if (!st.primed) {
    if (st.W_hat.size() == 0) st.W_hat = Eigen::VectorXd::Zero(cfg.n_basis);
    st.xi0_abs = std::abs(xi);
    st.primed = true;
  } else {
    st.gamma += (std::abs(xi) - std::abs(st.xi_prev)) + cfg.c * dt * std::abs(xi);
    st.int_abs_xi += dt * std::abs(xi);
  }

  const Eigen::VectorXd phi = rbf.features(z);

  ControlOutput out;
  out.xi = xi;
  out.xi_bar = xi_bar;
  out.gamma = st.gamma;
  out.w_hat_norm = st.W_hat.norm();
  out.beta_start = st.beta;
  out.beta_dot_raw = (cfg.k_c + 1.0) * xi_bar + st.W_hat.dot(phi) +
                     st.gamma * sgn(xi);
  st.W_hat += dt * cfg.l_w * (cfg.c * phi * xi -
                              cfg.k_w * std::abs(xi) * st.W_hat);
  const double rate = std::clamp(out.beta_dot_raw, -lim.rate_max, lim.rate_max);
  out.beta_end = std::clamp(st.beta + dt * rate, lim.beta_min, lim.beta_max);
  out.beta_rate = (out.beta_end - out.beta_start) / dt;

  st.beta = out.beta_end;
  st.xi_prev = xi;
  return out;
}

// Eq.-43-style reconstruction of gamma from the current xi.
inline double gamma_closed_form(const ControllerState& st, double xi,
                                const RiseConfig& cfg) {
  return std::abs(xi) - st.xi0_abs + cfg.c * st.int_abs_xi;
}

struct GspiConfig {
  double kp{0.28};      // s
  double ki{0.26};      // -
  double beta_k{0.3054326};  // gain-schedule pitch constant (rad)
  double omega_ref{1.267109036947883};

  double gain_schedule(double beta) const { return 1.0 / (1.0 + beta / beta_k); }
};

struct GspiState {
  double integral{0};  // integral of speed error (rad)
  double beta{0};
};

// Positional gain-scheduled PI with conditional anti-windup. The integrator
// is primed from the initial pitch so a zero-error start holds pitch.
inline ControlOutput gspi_step(GspiState& st, double omega_r, double dt,
                               const GspiConfig& cfg,
                               const ActuatorLimits& lim) {
  const double err = omega_r - cfg.omega_ref;
  const double gk = cfg.gain_schedule(st.beta);
  double integral_next = st.integral + dt * err;
  double cmd = gk * (cfg.kp * err + cfg.ki * integral_next);
  const bool sat_hi = cmd > lim.beta_max && err > 0;
  const bool sat_lo = cmd < lim.beta_min && err < 0;
  if (sat_hi || sat_lo) {
    integral_next = st.integral;  // freeze
    cmd = gk * (cfg.kp * err + cfg.ki * integral_next);
  }
  st.integral = integral_next;

  ControlOutput out;
  out.beta_start = st.beta;
  const double cmd_clamped = std::clamp(cmd, lim.beta_min, lim.beta_max);
  out.beta_dot_raw = (cmd_clamped - st.beta) / dt;
  const double rate = std::clamp(out.beta_dot_raw, -lim.rate_max, lim.rate_max);
  out.beta_end = std::clamp(st.beta + dt * rate, lim.beta_min, lim.beta_max);
  out.beta_rate = (out.beta_end - out.beta_start) / dt;
  st.beta = out.beta_end;
  return out;
}

// Computable Lyapunov-style diagnostic terms along a recorded run: kinetic
// term of the tracking error and the weight-energy term. Trend only.
struct LyapunovSeries {
  std::vector<double> half_xi_sq;
  std::vector<double> weight_term;
  std::vector<double> total;
};

inline LyapunovSeries lyapunov_monitor(const std::vector<double>& xi,
                                       const std::vector<double>& w_hat_norm,
                                       const RiseConfig& cfg) {
  LyapunovSeries out;
  const size_t n = xi.size();
  out.half_xi_sq.resize(n);
  out.weight_term.resize(n);
  out.total.resize(n);
  for (size_t i = 0; i < n; ++i) {
    out.half_xi_sq[i] = 0.5 * xi[i] * xi[i];
    const double w = i < w_hat_norm.size() ? w_hat_norm[i] : 0.0;
    out.weight_term[i] = w * w / (2.0 * cfg.l_w);
    out.total[i] = out.half_xi_sq[i] + out.weight_term[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Controller front end used by the simulation loop.

class PitchController {
 public:
  virtual ~PitchController() = default;
  virtual void reset(const StateVector& s, double beta0) = 0;
  virtual ControlOutput step(const StateVector& s, double t, double dt,
                             const Vec3& wind_i) = 0;
  virtual std::string name() const = 0;
};

class FixedPitchController final : public PitchController {
 public:
  explicit FixedPitchController(double beta = 0.0) : beta_(beta) {}
  void reset(const StateVector&, double beta0) override { beta_ = beta0; }
  ControlOutput step(const StateVector&, double, double, const Vec3&) override {
    ControlOutput out;
    out.beta_start = out.beta_end = beta_;
    return out;
  }
  std::string name() const override { return "none"; }

 private:
  double beta_;
};

class GspiController final : public PitchController {
 public:
  GspiController(const GspiConfig& cfg, const ActuatorLimits& lim)
      : cfg_(cfg), lim_(lim) {
    lim_.validate();
  }
  void reset(const StateVector&, double beta0) override {
    st_ = GspiState{};
    st_.beta = beta0;
    st_.integral = beta0 * (1.0 + beta0 / cfg_.beta_k) / cfg_.ki;
  }
  ControlOutput step(const StateVector& s, double, double dt,
                     const Vec3&) override {
    return gspi_step(st_, s.omega_r, dt, cfg_, lim_);
  }
  std::string name() const override { return "gspi"; }

 private:
  GspiConfig cfg_;
  ActuatorLimits lim_;
  GspiState st_;
};

class RiseController final : public PitchController {
 public:
  RiseController(const RiseConfig& cfg, const ActuatorLimits& lim)
      : cfg_(cfg), lim_(lim),
        rbf_(cfg.n_basis, cfg.center_seed, cfg.envelope) {
    cfg_.validate();
    lim_.validate();
  }
  void reset(const StateVector&, double beta0) override {
    st_ = ControllerState{};
    st_.W_hat = Eigen::VectorXd::Zero(cfg_.n_basis);
    st_.beta = beta0;
  }
  ControlOutput step(const StateVector& s, double, double dt,
                     const Vec3& wind_i) override {
    Eigen::Matrix<double, 15, 1> z;
    z << s.pack(), st_.beta, wind_i.norm();
    return rise_step(st_, s, z, dt, cfg_, lim_, rbf_);
  }
  std::string name() const override { return "rise"; }

  const ControllerState& state() const { return st_; }
  const RbfNetwork& network() const { return rbf_; }
  const RiseConfig& config() const { return cfg_; }

 private:
  RiseConfig cfg_;
  ActuatorLimits lim_;
  RbfNetwork rbf_;
  ControllerState st_;
};

}  // namespace fwt
