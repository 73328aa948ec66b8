#pragma once

// Wind velocity sources and linear (Airy) wave kinematics. Wave fields take z
// measured from the still-water line (z <= 0 below the surface); callers that
// work in the body/inertial frames convert before sampling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fwt/errors.hpp"
#include "fwt/frames.hpp"

namespace fwt {

struct WaveSpec {
  double H_s{0};          // significant wave height (m); regular amplitude H_s/2
  double T_p{10.0};       // peak period (s)
  double direction{0};    // heading (rad)
  double phase{0};        // initial phase (rad)
  double water_depth{0};  // <= 0 means deep water

  bool deep() const { return water_depth <= 0.0; }
};

struct WaterKinematics {
  double eta{0};            // surface elevation (m)
  Vec3 vel{Vec3::Zero()};   // particle velocity (m/s)
  Vec3 acc{Vec3::Zero()};   // particle acceleration (m/s^2)
  double p_dyn{0};          // dynamic pressure (Pa)
};

// Wavenumber from the dispersion relation w^2 = g k tanh(k d); deep water
// reduces to k = w^2 / g. Newton iteration for finite depth.
inline double wave_number(const WaveSpec& spec, double g) {
  const double w = 2.0 * M_PI / spec.T_p;
  const double k_deep = w * w / g;
  if (spec.deep()) return k_deep;
  double k = k_deep;  // deep-water guess
  for (int it = 0; it < 50; ++it) {
    const double th = std::tanh(k * spec.water_depth);
    const double f = g * k * th - w * w;
    const double df = g * th + g * k * spec.water_depth * (1.0 - th * th);
    const double dk = f / df;
    k -= dk;
    if (std::abs(dk) < 1e-14 * k) break;
  }
  return k;
}

inline double wave_elevation(const WaveSpec& spec, double x, double y,
                             double t, double g = 9.81) {
  if (spec.H_s <= 0.0) return 0.0;
  const double a = spec.H_s / 2.0;
  const double w = 2.0 * M_PI / spec.T_p;
  const double k = wave_number(spec, g);
  const double s = x * std::cos(spec.direction) + y * std::sin(spec.direction);
  return a * std::cos(k * s - w * t + spec.phase);
}

// Deep-water Airy particle kinematics at (x, y, z), z <= 0 below the mean
// surface. Points between the mean surface and an elevated crest reuse the
// z = 0 amplitudes (exponent clamped).
inline WaterKinematics water_particle_kinematics(const WaveSpec& spec,
                                                 double x, double y, double z,
                                                 double t, double rho_w,
                                                 double g = 9.81) {
  WaterKinematics out;
  if (spec.H_s <= 0.0) return out;
  const double a = spec.H_s / 2.0;
  const double w = 2.0 * M_PI / spec.T_p;
  const double k = wave_number(spec, g);
  const double cd = std::cos(spec.direction), sd = std::sin(spec.direction);
  const double s = x * cd + y * sd;
  const double ph = k * s - w * t + spec.phase;
  const double cp = std::cos(ph), sp = std::sin(ph);
  const double decay = std::exp(k * std::min(z, 0.0));

  out.eta = a * cp;
  const double u = a * w * decay * cp;   // along wave heading
  const double wv = a * w * decay * sp;  // vertical
  out.vel = Vec3(u * cd, u * sd, wv);
  const double du = a * w * w * decay * sp;    // d/dt of u
  const double dwv = -a * w * w * decay * cp;  // d/dt of wv
  out.acc = Vec3(du * cd, du * sd, dwv);
  out.p_dyn = rho_w * g * a * decay * cp;
  return out;
}

enum class WindMode { constant, file_series, spectral };

// Hub-height wind source. The spectral mode synthesizes a stationary series
// from a Kaimal-type spectrum with seeded phases at construction; evaluation
// afterwards is pure and bit-reproducible.
class WindSource {
 public:
  static WindSource constant(double speed) {
    WindSource w;
    w.mode_ = WindMode::constant;
    w.mean_ = speed;
    return w;
  }

  static WindSource from_series(std::vector<double> times,
                                std::vector<double> speeds) {
    if (times.size() != speeds.size() || times.size() < 2) {
      throw InvalidParameters("wind series needs >= 2 samples");
    }
    for (size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1])) {
        throw InvalidParameters("wind series times must be strictly "
                                "increasing");
      }
    }
    WindSource w;
    w.mode_ = WindMode::file_series;
    w.times_ = std::move(times);
    w.speeds_ = std::move(speeds);
    return w;
  }

  // Two-column delimited text (time_s, speed_mps); '#' comments and an
  // optional non-numeric header line are skipped.
  static WindSource from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open wind series: " + path);
    std::vector<double> ts, us;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss(line);
      double t, u;
      if (ss >> t >> u) {
        ts.push_back(t);
        us.push_back(u);
      } else if (!ts.empty()) {
        throw ParseError(path + ": malformed wind series line: " + line);
      }
      // non-numeric first line treated as header
    }
    return from_series(std::move(ts), std::move(us));
  }

  // Single-point Kaimal-type spectrum, inverse-transformed with seeded
  // phases. Components above cutoff_hz carry negligible energy for the
  // platform/rotor band and are dropped.
  static WindSource spectral(double mean_speed, double turbulence_intensity,
                             uint64_t seed, double duration_s,
                             double sample_dt = 0.05, double cutoff_hz = 0.5,
                             double length_scale_m = 340.2) {
    WindSource w;
    w.mode_ = WindMode::spectral;
    w.mean_ = mean_speed;
    const double sigma = turbulence_intensity * mean_speed;
    const double T = duration_s + 10.0 * sample_dt;
    const double df = 1.0 / T;
    const int n_freq = static_cast<int>(cutoff_hz / df);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);
    std::vector<double> amp(n_freq), phase(n_freq), omega(n_freq);
    const double LU = length_scale_m / mean_speed;
    for (int i = 0; i < n_freq; ++i) {
      const double f = (i + 1) * df;
      const double S = 4.0 * sigma * sigma * LU /
                       std::pow(1.0 + 6.0 * f * LU, 5.0 / 3.0);
      amp[i] = std::sqrt(2.0 * S * df);
      phase[i] = uphase(rng);
      omega[i] = 2.0 * M_PI * f;
    }
    const int n_samp = static_cast<int>(duration_s / sample_dt) + 2;
    w.times_.resize(n_samp);
    w.speeds_.resize(n_samp);
    for (int k = 0; k < n_samp; ++k) {
      const double t = k * sample_dt;
      double u = mean_speed;
      for (int i = 0; i < n_freq; ++i) {
        u += amp[i] * std::cos(omega[i] * t + phase[i]);
      }
      w.times_[k] = t;
      w.speeds_[k] = u;
    }
    return w;
  }

  // Wind vector at time t; blows along +x.
  Vec3 at(double t) const {
    switch (mode_) {
      case WindMode::constant:
        return Vec3(mean_, 0, 0);
      case WindMode::file_series:
        if (t < times_.front() || t > times_.back()) {
          throw OutOfRange("wind series does not cover t = " +
                           std::to_string(t));
        }
        return Vec3(interp(t), 0, 0);
      case WindMode::spectral:
      default: {
        const double tc = std::clamp(t, times_.front(), times_.back());
        return Vec3(interp(tc), 0, 0);
      }
    }
  }

  WindMode mode() const { return mode_; }
  const std::vector<double>& sample_times() const { return times_; }
  const std::vector<double>& sample_speeds() const { return speeds_; }

 private:
  WindSource() = default;

  double interp(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return speeds_.front();
    if (it == times_.end()) return speeds_.back();
    const size_t i = static_cast<size_t>(it - times_.begin());
    const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return speeds_[i - 1] + w * (speeds_[i] - speeds_[i - 1]);
  }

  WindMode mode_{WindMode::constant};
  double mean_{0};
  std::vector<double> times_, speeds_;
};

}  // namespace fwt
