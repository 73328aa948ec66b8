#pragma once

// Report assembly over recorded trajectories: Table-1 style statistics for a
// single run and the normalized RMS / DEL comparison across controllers.

#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fwt/analysis.hpp"
#include "fwt/dynamics.hpp"

namespace fwt {

inline constexpr double kDefaultTrimSeconds = 100.0;

// Channel values with the leading transient removed.
inline std::vector<double> trimmed_channel(const Trajectory& traj,
                                           const std::string& name,
                                           double trim_s) {
  const std::vector<double> full = traj.channel(name);
  const size_t skip =
      std::min(full.size(), static_cast<size_t>(trim_s / traj.dt + 0.5));
  return std::vector<double>(full.begin() + skip, full.end());
}

struct StatsRow {
  std::string label;
  double value;
};

// AV/RMS rows for surge, pitch and rotor speed in reporting units
// (m, deg, rpm).
inline std::vector<StatsRow> openloop_statistics(const Trajectory& traj,
                                                 double trim_s) {
  const double rad2deg = 180.0 / M_PI;
  const double rad2rpm = 30.0 / M_PI;
  const auto rx = trimmed_channel(traj, "r_x", trim_s);
  const auto ty = trimmed_channel(traj, "theta_y", trim_s);
  const auto wr = trimmed_channel(traj, "omega_r", trim_s);
  auto scale = [](std::vector<double> v, double s) {
    for (double& x : v) x *= s;
    return v;
  };
  const auto ty_deg = scale(ty, rad2deg);
  const auto wr_rpm = scale(wr, rad2rpm);
  return {
      {"AV(r_x) [m]", av(rx)},      {"RMS(r_x) [m]", rms(rx)},
      {"AV(theta_y) [deg]", av(ty_deg)}, {"RMS(theta_y) [deg]", rms(ty_deg)},
      {"AV(Omega_r) [rpm]", av(wr_rpm)}, {"RMS(Omega_r) [rpm]", rms(wr_rpm)},
  };
}

inline std::string format_statistics(const std::vector<StatsRow>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    os << std::left << std::setw(22) << r.label << std::right << std::setw(12)
       << std::fixed << std::setprecision(4) << r.value << '\n';
  }
  return os.str();
}

// Normalized RMS over the Fig.-6 channels and normalized DELs over the
// tower-base proxy and mooring tension channels, baseline column = 1.0.
// All trajectories must share scenario and seed.
inline CompareReport compare_report(
    const std::map<std::string, Trajectory>& runs, const std::string& baseline,
    double trim_s = kDefaultTrimSeconds, double woehler_steel = 4.0,
    double reference_hz = 1.0) {
  if (!runs.count(baseline)) {
    throw ScenarioMismatch("baseline controller \"" + baseline +
                           "\" not among the runs");
  }
  const Trajectory& base = runs.at(baseline);
  for (const auto& [name, t] : runs) {
    if (t.seed != base.seed || t.dt != base.dt ||
        t.steps.size() != base.steps.size() ||
        t.scenario_id != base.scenario_id) {
      throw ScenarioMismatch("trajectory \"" + name +
                             "\" does not share the baseline scenario/seed");
    }
  }

  CompareReport rep;
  rep.baseline = baseline;
  const std::vector<std::string> rms_channels = {"delta_omega_r", "omega_x",
                                                 "omega_y", "omega_z"};
  for (const auto& ch : rms_channels) {
    ReportRow row{ch, "nrms", {}};
    const auto base_series = trimmed_channel(base, ch, trim_s);
    for (const auto& [name, t] : runs) {
      row.value[name] = normalized_rms(trimmed_channel(t, ch, trim_s),
                                       base_series);
    }
    rep.rows.push_back(row);
  }

  const std::vector<std::string> del_channels = {"tb_proxy", "ff1", "ff2",
                                                 "ff3",      "af1", "af2",
                                                 "af3"};
  DelConfig cfg;
  cfg.woehler_exponent = woehler_steel;
  const double duration = base.dt * static_cast<double>(base.steps.size() - 1);
  cfg.n_ref = reference_hz * std::max(1.0, duration - trim_s);
  for (const auto& ch : del_channels) {
    ReportRow row{ch, "ndel", {}};
    const double base_del = del_compute(trimmed_channel(base, ch, trim_s), cfg);
    for (const auto& [name, t] : runs) {
      const double d = del_compute(trimmed_channel(t, ch, trim_s), cfg);
      row.value[name] = base_del > 0 ? d / base_del : (d > 0 ? 1e300 : 1.0);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

inline std::string format_report(const CompareReport& rep) {
  std::ostringstream os;
  std::vector<std::string> ctrls;
  if (!rep.rows.empty()) {
    for (const auto& [name, _] : rep.rows.front().value) ctrls.push_back(name);
  }
  os << std::left << std::setw(16) << "channel" << std::setw(8) << "kind";
  for (const auto& c : ctrls) os << std::right << std::setw(10) << c;
  os << '\n';
  for (const auto& r : rep.rows) {
    os << std::left << std::setw(16) << r.channel << std::setw(8) << r.kind;
    for (const auto& c : ctrls) {
      os << std::right << std::setw(10) << std::fixed << std::setprecision(4)
         << r.value.at(c);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace fwt
