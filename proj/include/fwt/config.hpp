#pragma once

// Run configuration: scenario, controller selection and gains, output
// options. Strict JSON with unknown-key rejection; every applied default is
// recorded so the CLI can log it.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fwt/control.hpp"
#include "fwt/dynamics.hpp"
#include "fwt/io.hpp"
#include "fwt/params.hpp"
#include "fwt/report.hpp"

namespace fwt {

struct WindConfig {
  std::string mode{"constant"};  // constant | file | spectral
  double mean_speed{18.0};
  double turbulence_intensity{0.10};
  double cutoff_hz{0.5};
  std::string path;
};

struct InitialConfig {
  std::string mode{"equilibrium"};  // equilibrium | zero
  double surge_offset{0};           // m
  double pitch_offset{0};           // rad
  double rotor_speed{0};            // rad/s
  double beta{0};                   // rad
};

struct ControllerConfig {
  std::string type{"none"};  // none | gspi | rise
  double fixed_beta{0};
  GspiConfig gspi;
  RiseConfig rise;
};

struct RunConfig {
  std::string params_path;
  double duration{1000.0};
  double dt{0.0125};
  uint64_t seed{0};
  WindConfig wind;
  WaveSpec wave;
  InitialConfig initial;
  std::vector<ControllerConfig> controllers;  // one entry for openloop
  ActuatorLimits limits;
  double trim_s{kDefaultTrimSeconds};
  std::string config_hash;
  std::vector<std::string> applied_defaults;
  nlohmann::json raw;
};

namespace detail {

inline double deg2rad(double d) { return d * M_PI / 180.0; }

template <typename T>
T value_or_default(const nlohmann::json& j, const std::string& key, T def,
                   const std::string& context, RunConfig& cfg) {
  if (j.contains(key)) return j.at(key).get<T>();
  std::ostringstream os;
  os << context << "." << key << " defaulted";
  cfg.applied_defaults.push_back(os.str());
  return def;
}

inline ControllerConfig parse_controller(const nlohmann::json& j,
                                         RunConfig& cfg, double omega_ref) {
  check_keys(j,
             {"type", "beta_deg", "kp", "ki", "beta_k_deg", "k", "c", "k_c",
              "n_basis", "l_w", "k_w", "xi_filter_cutoff_hz", "center_seed"},
             "controller");
  ControllerConfig out;
  out.type = require(j, "type", "controller").get<std::string>();
  if (out.type == "none") {
    out.fixed_beta = deg2rad(value_or_default(j, "beta_deg", 0.0,
                                              "controller", cfg));
  } else if (out.type == "gspi") {
    out.gspi.omega_ref = omega_ref;
    out.gspi.kp = value_or_default(j, "kp", out.gspi.kp, "controller", cfg);
    out.gspi.ki = value_or_default(j, "ki", out.gspi.ki, "controller", cfg);
    out.gspi.beta_k = deg2rad(value_or_default(
        j, "beta_k_deg", out.gspi.beta_k * 180.0 / M_PI, "controller", cfg));
  } else if (out.type == "rise") {
    out.rise.omega_ref = omega_ref;
    out.rise.k = value_or_default(j, "k", out.rise.k, "controller", cfg);
    out.rise.c = value_or_default(j, "c", out.rise.c, "controller", cfg);
    out.rise.k_c = value_or_default(j, "k_c", out.rise.k_c, "controller", cfg);
    out.rise.n_basis =
        value_or_default(j, "n_basis", out.rise.n_basis, "controller", cfg);
    out.rise.l_w = value_or_default(j, "l_w", out.rise.l_w, "controller", cfg);
    out.rise.k_w = value_or_default(j, "k_w", out.rise.k_w, "controller", cfg);
    out.rise.xi_filter_cutoff_hz =
        value_or_default(j, "xi_filter_cutoff_hz",
                         out.rise.xi_filter_cutoff_hz, "controller", cfg);
    out.rise.center_seed = value_or_default<uint64_t>(
        j, "center_seed", out.rise.center_seed, "controller", cfg);
    out.rise.validate();
  } else {
    throw ParseError("controller type must be none, gspi or rise; got \"" +
                     out.type + "\"");
  }
  return out;
}

}  // namespace detail

// Loads and fully validates a run configuration. The parameter file is loaded
// as part of validation (referenced files must exist).
inline RunConfig load_config(const std::string& path) {
  using nlohmann::json;
  const json j = detail::parse_json_file(path);
  detail::check_keys(
      j, {"params", "scenario", "controller", "controllers", "actuator",
          "output", "description"},
      path);

  RunConfig cfg;
  cfg.raw = j;
  cfg.config_hash = [&] {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a_hash(j.dump())));
    return std::string(buf);
  }();

  cfg.params_path = detail::require(j, "params", path).get<std::string>();
  const ParameterSet params = load_parameters(cfg.params_path);
  const double omega_ref = params.rotor.omega_rated;

  const json& sc = detail::require(j, "scenario", path);
  detail::check_keys(
      sc, {"duration_s", "dt_s", "seed", "wind", "wave", "initial"},
      "scenario");
  cfg.duration = detail::require(sc, "duration_s", "scenario").get<double>();
  cfg.dt = detail::value_or_default(sc, "dt_s", 0.0125, "scenario", cfg);
  cfg.seed = detail::value_or_default<uint64_t>(sc, "seed", 0, "scenario", cfg);
  if (!(cfg.duration > 0) || !(cfg.dt > 0)) {
    throw ParseError("scenario: duration_s and dt_s must be > 0");
  }

  if (sc.contains("wind")) {
    const json& w = sc.at("wind");
    detail::check_keys(w,
                       {"mode", "mean_speed_mps", "turbulence_intensity",
                        "cutoff_hz", "path"},
                       "scenario.wind");
    cfg.wind.mode = detail::value_or_default<std::string>(
        w, "mode", "constant", "scenario.wind", cfg);
    cfg.wind.mean_speed = detail::value_or_default(
        w, "mean_speed_mps", 18.0, "scenario.wind", cfg);
    cfg.wind.turbulence_intensity = detail::value_or_default(
        w, "turbulence_intensity", 0.10, "scenario.wind", cfg);
    cfg.wind.cutoff_hz =
        detail::value_or_default(w, "cutoff_hz", 0.5, "scenario.wind", cfg);
    cfg.wind.path = detail::value_or_default<std::string>(
        w, "path", "", "scenario.wind", cfg);
    if (cfg.wind.mode != "constant" && cfg.wind.mode != "file" &&
        cfg.wind.mode != "spectral") {
      throw ParseError("scenario.wind.mode must be constant, file or "
                       "spectral");
    }
    if (cfg.wind.mode == "file" && !std::filesystem::exists(cfg.wind.path)) {
      throw MissingFile("wind series file not found: " + cfg.wind.path);
    }
  } else {
    cfg.applied_defaults.push_back("scenario.wind defaulted (calm)");
    cfg.wind.mode = "constant";
    cfg.wind.mean_speed = 0.0;
  }

  if (sc.contains("wave")) {
    const json& w = sc.at("wave");
    detail::check_keys(w,
                       {"significant_height_m", "peak_period_s",
                        "direction_deg", "phase_deg", "water_depth_m"},
                       "scenario.wave");
    cfg.wave.H_s = detail::value_or_default(w, "significant_height_m", 0.0,
                                            "scenario.wave", cfg);
    cfg.wave.T_p = detail::value_or_default(w, "peak_period_s", 10.0,
                                            "scenario.wave", cfg);
    cfg.wave.direction = detail::deg2rad(detail::value_or_default(
        w, "direction_deg", 0.0, "scenario.wave", cfg));
    cfg.wave.phase = detail::deg2rad(
        detail::value_or_default(w, "phase_deg", 0.0, "scenario.wave", cfg));
    cfg.wave.water_depth = detail::value_or_default(w, "water_depth_m", 0.0,
                                                    "scenario.wave", cfg);
  } else {
    cfg.applied_defaults.push_back("scenario.wave defaulted (calm)");
  }

  {
    const json& init = detail::require(sc, "initial", "scenario");
    detail::check_keys(init,
                       {"mode", "surge_offset_m", "pitch_offset_deg",
                        "rotor_speed_rpm", "beta_deg"},
                       "scenario.initial");
    cfg.initial.mode = detail::value_or_default<std::string>(
        init, "mode", "equilibrium", "scenario.initial", cfg);
    if (cfg.initial.mode != "equilibrium" && cfg.initial.mode != "zero") {
      throw ParseError("scenario.initial.mode must be equilibrium or zero");
    }
    cfg.initial.surge_offset = detail::value_or_default(
        init, "surge_offset_m", 0.0, "scenario.initial", cfg);
    cfg.initial.pitch_offset = detail::deg2rad(detail::value_or_default(
        init, "pitch_offset_deg", 0.0, "scenario.initial", cfg));
    cfg.initial.rotor_speed =
        detail::value_or_default(init, "rotor_speed_rpm",
                                 omega_ref * 30.0 / M_PI, "scenario.initial",
                                 cfg) *
        M_PI / 30.0;
    cfg.initial.beta = detail::deg2rad(detail::value_or_default(
        init, "beta_deg", 0.0, "scenario.initial", cfg));
  }

  if (j.contains("controller") && j.contains("controllers")) {
    throw ParseError(path + ": give either controller or controllers, "
                     "not both");
  }
  if (j.contains("controller")) {
    cfg.controllers.push_back(
        detail::parse_controller(j.at("controller"), cfg, omega_ref));
  } else if (j.contains("controllers")) {
    for (const auto& c : j.at("controllers")) {
      cfg.controllers.push_back(detail::parse_controller(c, cfg, omega_ref));
    }
    if (cfg.controllers.empty()) {
      throw ParseError(path + ": controllers list is empty");
    }
  } else {
    cfg.applied_defaults.push_back("controller defaulted (fixed zero pitch)");
    cfg.controllers.push_back(ControllerConfig{});
  }

  if (j.contains("actuator")) {
    const json& a = j.at("actuator");
    detail::check_keys(a, {"beta_min_deg", "beta_max_deg", "rate_max_deg_s"},
                       "actuator");
    cfg.limits.beta_min = detail::deg2rad(
        detail::value_or_default(a, "beta_min_deg", 0.0, "actuator", cfg));
    cfg.limits.beta_max = detail::deg2rad(
        detail::value_or_default(a, "beta_max_deg", 90.0, "actuator", cfg));
    cfg.limits.rate_max = detail::deg2rad(
        detail::value_or_default(a, "rate_max_deg_s", 8.0, "actuator", cfg));
  } else {
    cfg.applied_defaults.push_back("actuator defaulted (0..90 deg, 8 deg/s)");
  }
  cfg.limits.validate();

  if (j.contains("output")) {
    const json& o = j.at("output");
    detail::check_keys(o, {"trim_s"}, "output");
    cfg.trim_s = detail::value_or_default(o, "trim_s", kDefaultTrimSeconds,
                                          "output", cfg);
  }
  return cfg;
}

// Canonical JSON form with every default materialized; load_config of the
// dump reproduces the same configuration.
inline nlohmann::json to_json(const RunConfig& cfg) {
  using nlohmann::json;
  const double r2d = 180.0 / M_PI;
  json j;
  j["params"] = cfg.params_path;
  json sc;
  sc["duration_s"] = cfg.duration;
  sc["dt_s"] = cfg.dt;
  sc["seed"] = cfg.seed;
  sc["wind"] = {{"mode", cfg.wind.mode},
                {"mean_speed_mps", cfg.wind.mean_speed},
                {"turbulence_intensity", cfg.wind.turbulence_intensity},
                {"cutoff_hz", cfg.wind.cutoff_hz},
                {"path", cfg.wind.path}};
  sc["wave"] = {{"significant_height_m", cfg.wave.H_s},
                {"peak_period_s", cfg.wave.T_p},
                {"direction_deg", cfg.wave.direction * r2d},
                {"phase_deg", cfg.wave.phase * r2d},
                {"water_depth_m", cfg.wave.water_depth}};
  sc["initial"] = {{"mode", cfg.initial.mode},
                   {"surge_offset_m", cfg.initial.surge_offset},
                   {"pitch_offset_deg", cfg.initial.pitch_offset * r2d},
                   {"rotor_speed_rpm", cfg.initial.rotor_speed * 30.0 / M_PI},
                   {"beta_deg", cfg.initial.beta * r2d}};
  j["scenario"] = sc;
  json ctrls = json::array();
  for (const auto& c : cfg.controllers) {
    json e;
    e["type"] = c.type;
    if (c.type == "none") {
      e["beta_deg"] = c.fixed_beta * r2d;
    } else if (c.type == "gspi") {
      e["kp"] = c.gspi.kp;
      e["ki"] = c.gspi.ki;
      e["beta_k_deg"] = c.gspi.beta_k * r2d;
    } else {
      e["k"] = c.rise.k;
      e["c"] = c.rise.c;
      e["k_c"] = c.rise.k_c;
      e["n_basis"] = c.rise.n_basis;
      e["l_w"] = c.rise.l_w;
      e["k_w"] = c.rise.k_w;
      e["xi_filter_cutoff_hz"] = c.rise.xi_filter_cutoff_hz;
      e["center_seed"] = c.rise.center_seed;
    }
    ctrls.push_back(e);
  }
  j["controllers"] = ctrls;
  j["actuator"] = {{"beta_min_deg", cfg.limits.beta_min * r2d},
                   {"beta_max_deg", cfg.limits.beta_max * r2d},
                   {"rate_max_deg_s", cfg.limits.rate_max * r2d}};
  j["output"] = {{"trim_s", cfg.trim_s}};
  return j;
}

// ---------------------------------------------------------------------------
// Run orchestration

inline WindSource build_wind(const RunConfig& cfg) {
  if (cfg.wind.mode == "constant") {
    return WindSource::constant(cfg.wind.mean_speed);
  }
  if (cfg.wind.mode == "file") return WindSource::from_file(cfg.wind.path);
  return WindSource::spectral(cfg.wind.mean_speed,
                              cfg.wind.turbulence_intensity, cfg.seed,
                              cfg.duration, 0.05, cfg.wind.cutoff_hz);
}

inline std::unique_ptr<PitchController> build_controller(
    const ControllerConfig& c, const ActuatorLimits& lim) {
  if (c.type == "none") {
    return std::make_unique<FixedPitchController>(c.fixed_beta);
  }
  if (c.type == "gspi") return std::make_unique<GspiController>(c.gspi, lim);
  return std::make_unique<RiseController>(c.rise, lim);
}

inline PlantModel build_plant(const RunConfig& cfg) {
  ParameterSet params = load_parameters(cfg.params_path);
  RotorAeroTable table = params.aero_table_file.empty()
                             ? RotorAeroTable::surrogate()
                             : RotorAeroTable::from_file(params.aero_table_file);
  return PlantModel(std::move(params), std::move(table), cfg.wave,
                    build_wind(cfg));
}

inline Scenario build_scenario(const RunConfig& cfg, const PlantModel& plant) {
  Scenario sc;
  sc.duration = cfg.duration;
  sc.dt = cfg.dt;
  sc.seed = cfg.seed;
  sc.initial_beta = cfg.initial.beta;
  if (cfg.initial.mode == "equilibrium") {
    EquilibriumOptions opt;
    opt.beta = cfg.initial.beta;
    opt.omega_r = 0.0;  // calm-water balance; rotor speed applied afterwards
    sc.initial = solve_equilibrium(plant, opt).state;
  }
  sc.initial.r_p.x() += cfg.initial.surge_offset;
  sc.initial.theta.y += cfg.initial.pitch_offset;
  sc.initial.omega_r = cfg.initial.rotor_speed;
  return sc;
}

struct RunResult {
  std::string controller;
  Trajectory trajectory;
  std::string trajectory_path;
};

inline void write_manifest(const std::string& dir, const RunConfig& cfg,
                           const std::vector<RunResult>& runs) {
  nlohmann::json m;
  m["config_hash"] = cfg.config_hash;
  m["seed"] = cfg.seed;
  m["params"] = cfg.params_path;
  m["applied_defaults"] = cfg.applied_defaults;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& r : runs) files.push_back(r.trajectory_path);
  m["trajectories"] = files;
  std::ofstream out(dir + "/manifest.json");
  out << m.dump(2) << "\n";
}

// Executes every configured controller on the shared scenario/seed. Scenarios
// are dispatched to a small worker pool; outputs are deterministic regardless
// of worker count.
inline std::vector<RunResult> run_batch(const RunConfig& cfg,
                                        const std::string& out_dir,
                                        int jobs = 1) {
  std::filesystem::create_directories(out_dir);
  const PlantModel plant = build_plant(cfg);
  const Scenario scenario = build_scenario(cfg, plant);

  std::vector<RunResult> results(cfg.controllers.size());
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  const int workers = std::max(1, std::min<int>(jobs, cfg.controllers.size()));
  auto work = [&] {
    for (size_t i = next.fetch_add(1); i < cfg.controllers.size();
         i = next.fetch_add(1)) {
      auto controller = build_controller(cfg.controllers[i], cfg.limits);
      Trajectory traj = simulate(plant, *controller, scenario);
      traj.scenario_id = cfg.config_hash;
      results[i].controller = controller->name();
      results[i].trajectory = std::move(traj);
      results[i].trajectory_path =
          out_dir + "/trajectory_" + controller->name() + ".tsv";
      write_trajectory(results[i].trajectory_path, results[i].trajectory);
    }
  };
  if (workers == 1) {
    work();
  } else {
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  write_manifest(out_dir, cfg, results);
  return results;
}

}  // namespace fwt
