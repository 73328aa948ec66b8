#pragma once

// Trajectory file I/O. Delimited text, one row per sample, documented column
// order fixed by trajectory_channels(); header comments carry the config
// hash, seed, controller and reference speed so runs stay identifiable.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fwt/dynamics.hpp"
#include "fwt/errors.hpp"

namespace fwt {

inline uint64_t fnv1a_hash(const std::string& data) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot write trajectory: " + path);
  out << "# fwtsim trajectory\n";
  out << "# config_hash=" << traj.scenario_id << " seed=" << traj.seed
      << " controller=" << traj.controller << " dt=" << format_double(traj.dt)
      << " omega_ref=" << format_double(traj.omega_ref) << "\n";
  out << "# columns:";
  for (const auto& def : trajectory_channels()) out << ' ' << def.name;
  out << "\n";
  std::string line;
  for (const auto& step : traj.steps) {
    line.clear();
    bool first = true;
    for (const auto& def : trajectory_channels()) {
      if (!first) line += '\t';
      line += format_double(def.get(step));
      first = false;
    }
    line += '\n';
    out << line;
  }
}

namespace detail {

// Mirror of trajectory_channels() for reconstruction on load.
inline void set_channel(TrajectoryStep& s, const std::string& name, double v) {
  if (name == "t") s.t = v;
  else if (name == "r_x") s.x.r_p.x() = v;
  else if (name == "r_y") s.x.r_p.y() = v;
  else if (name == "r_z") s.x.r_p.z() = v;
  else if (name == "theta_x") s.x.theta.x = v;
  else if (name == "theta_y") s.x.theta.y = v;
  else if (name == "theta_z") s.x.theta.z = v;
  else if (name == "v_x") s.x.v_p.x() = v;
  else if (name == "v_y") s.x.v_p.y() = v;
  else if (name == "v_z") s.x.v_p.z() = v;
  else if (name == "omega_x") s.x.omega_p.x() = v;
  else if (name == "omega_y") s.x.omega_p.y() = v;
  else if (name == "omega_z") s.x.omega_p.z() = v;
  else if (name == "omega_r") s.x.omega_r = v;
  else if (name == "beta") s.ctrl.beta_start = v;
  else if (name == "tau_g") s.loads.tau_g = v;
  else if (name == "xi") s.ctrl.xi = v;
  else if (name == "xi_bar") s.ctrl.xi_bar = v;
  else if (name == "gamma") s.ctrl.gamma = v;
  else if (name == "w_hat_norm") s.ctrl.w_hat_norm = v;
  else if (name == "beta_dot_raw") s.ctrl.beta_dot_raw = v;
  else if (name == "beta_dot") s.ctrl.beta_rate = v;
  else if (name == "buoy_fx") s.loads.buoy.force.x() = v;
  else if (name == "buoy_fy") s.loads.buoy.force.y() = v;
  else if (name == "buoy_fz") s.loads.buoy.force.z() = v;
  else if (name == "buoy_mx") s.loads.buoy.moment.x() = v;
  else if (name == "buoy_my") s.loads.buoy.moment.y() = v;
  else if (name == "buoy_mz") s.loads.buoy.moment.z() = v;
  else if (name == "hydro_fx") s.loads.hydro.force.x() = v;
  else if (name == "hydro_fy") s.loads.hydro.force.y() = v;
  else if (name == "hydro_fz") s.loads.hydro.force.z() = v;
  else if (name == "hydro_mx") s.loads.hydro.moment.x() = v;
  else if (name == "hydro_my") s.loads.hydro.moment.y() = v;
  else if (name == "hydro_mz") s.loads.hydro.moment.z() = v;
  else if (name == "aero_fx") s.loads.aero.force.x() = v;
  else if (name == "aero_fy") s.loads.aero.force.y() = v;
  else if (name == "aero_fz") s.loads.aero.force.z() = v;
  else if (name == "aero_mx") s.loads.aero.moment.x() = v;
  else if (name == "aero_my") s.loads.aero.moment.y() = v;
  else if (name == "aero_mz") s.loads.aero.moment.z() = v;
  else if (name == "moor_fx") s.loads.moor.force.x() = v;
  else if (name == "moor_fy") s.loads.moor.force.y() = v;
  else if (name == "moor_fz") s.loads.moor.force.z() = v;
  else if (name == "moor_mx") s.loads.moor.moment.x() = v;
  else if (name == "moor_my") s.loads.moor.moment.y() = v;
  else if (name == "moor_mz") s.loads.moor.moment.z() = v;
  else if (name == "ff1") s.loads.fairlead_tension[0] = v;
  else if (name == "ff2") s.loads.fairlead_tension[1] = v;
  else if (name == "ff3") s.loads.fairlead_tension[2] = v;
  else if (name == "af1") s.loads.anchor_tension[0] = v;
  else if (name == "af2") s.loads.anchor_tension[1] = v;
  else if (name == "af3") s.loads.anchor_tension[2] = v;
  else if (name == "wind_speed") s.loads.wind_speed = v;
  else if (name == "eta") s.loads.eta0 = v;
  else throw ParseError("trajectory column unknown: " + name);
}

inline std::map<std::string, std::string> parse_meta(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream ss(line.substr(1));  // strip '#'
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

}  // namespace detail

inline Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open trajectory: " + path);
  Trajectory traj;
  std::vector<std::string> columns;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("config_hash=") != std::string::npos) {
        const auto kv = detail::parse_meta(line);
        if (kv.count("config_hash")) traj.scenario_id = kv.at("config_hash");
        if (kv.count("seed")) traj.seed = std::stoull(kv.at("seed"));
        if (kv.count("controller")) traj.controller = kv.at("controller");
        if (kv.count("dt")) traj.dt = std::stod(kv.at("dt"));
        if (kv.count("omega_ref")) traj.omega_ref = std::stod(kv.at("omega_ref"));
      } else if (line.rfind("# columns:", 0) == 0) {
        std::istringstream ss(line.substr(10));
        std::string name;
        while (ss >> name) columns.push_back(name);
      }
      continue;
    }
    if (columns.empty()) throw ParseError(path + ": missing column header");
    TrajectoryStep step;
    std::istringstream ss(line);
    for (const auto& col : columns) {
      double v;
      if (!(ss >> v)) throw ParseError(path + ": short row");
      detail::set_channel(step, col, v);
    }
    traj.steps.push_back(step);
  }
  if (traj.steps.empty()) throw ParseError(path + ": no samples");
  return traj;
}

}  // namespace fwt
