#pragma once

// Post-processing: statistics, normalized comparisons, four-point rainflow
// cycle counting and damage-equivalent loads. Pure functions over immutable
// uniformly sampled series.

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fwt/errors.hpp"

namespace fwt {

struct ChannelSeries {
  std::string name;
  std::string unit;
  std::vector<double> values;
  double dt{0};
};

inline double av(const std::vector<double>& v) {
  if (v.empty()) throw EmptySeries("av: empty series");
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double rms(const std::vector<double>& v) {
  if (v.empty()) throw EmptySeries("rms: empty series");
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

inline double normalized_rms(const std::vector<double>& series,
                             const std::vector<double>& baseline) {
  const double b = rms(baseline);
  if (b == 0.0) throw ZeroBaseline("normalized_rms: baseline RMS is zero");
  return rms(series) / b;
}

struct RainflowCycle {
  double range;
  double count;  // 1.0 full, 0.5 residual half
};

namespace detail {

inline std::vector<double> turning_points(const std::vector<double>& v) {
  std::vector<double> tp;
  for (double x : v) {
    if (!tp.empty() && x == tp.back()) continue;
    if (tp.size() >= 2) {
      const double a = tp[tp.size() - 2], b = tp.back();
      if ((b - a > 0) == (x - b > 0)) {
        tp.back() = x;  // same slope, extend
        continue;
      }
    }
    tp.push_back(x);
  }
  return tp;
}

}  // namespace detail

// Four-point rainflow on the turning-point sequence; the residual is counted
// as half cycles. A constant series yields no cycles.
inline std::vector<RainflowCycle> rainflow_count(
    const std::vector<double>& series) {
  if (series.empty()) throw EmptySeries("rainflow_count: empty series");
  const std::vector<double> tp = detail::turning_points(series);
  std::vector<RainflowCycle> cycles;
  std::vector<double> stack;
  for (double point : tp) {
    stack.push_back(point);
    while (stack.size() >= 4) {
      const size_t n = stack.size();
      const double r_inner = std::abs(stack[n - 2] - stack[n - 3]);
      const double r_left = std::abs(stack[n - 3] - stack[n - 4]);
      const double r_right = std::abs(stack[n - 1] - stack[n - 2]);
      if (r_inner <= r_left && r_inner <= r_right) {
        cycles.push_back({r_inner, 1.0});
        stack.erase(stack.end() - 3, stack.end() - 1);
      } else {
        break;
      }
    }
  }
  for (size_t i = 0; i + 1 < stack.size(); ++i) {
    cycles.push_back({std::abs(stack[i + 1] - stack[i]), 0.5});
  }
  return cycles;
}

struct DelConfig {
  double woehler_exponent{4.0};
  double n_ref{600.0};           // reference cycle count
  double reference_hz{1.0};      // used when n_ref is derived from duration

  void validate() const {
    if (!(woehler_exponent >= 1.0) || !(n_ref > 0.0)) {
      throw InvalidParameters("del: need m >= 1 and N_ref > 0");
    }
  }
};

// DEL = (sum n_i R_i^m / N_ref)^(1/m) over rainflow ranges.
inline double del_compute(const std::vector<double>& series,
                          const DelConfig& cfg) {
  cfg.validate();
  const auto cycles = rainflow_count(series);
  double acc = 0;
  for (const auto& c : cycles) {
    acc += c.count * std::pow(c.range, cfg.woehler_exponent);
  }
  return std::pow(acc / cfg.n_ref, 1.0 / cfg.woehler_exponent);
}

// ---------------------------------------------------------------------------
// Comparison report (normalized RMS and DEL ratios against a baseline)

struct ReportRow {
  std::string channel;
  std::string kind;  // "nrms" or "ndel"
  std::map<std::string, double> value;  // controller -> normalized value
};

struct CompareReport {
  std::string baseline;
  std::vector<ReportRow> rows;

  std::string to_delimited() const {
    std::ostringstream os;
    os << "channel\tkind";
    std::vector<std::string> ctrls;
    if (!rows.empty()) {
      for (const auto& [name, _] : rows.front().value) ctrls.push_back(name);
    }
    for (const auto& c : ctrls) os << '\t' << c;
    os << '\n';
    for (const auto& r : rows) {
      os << r.channel << '\t' << r.kind;
      for (const auto& c : ctrls) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", r.value.at(c));
        os << '\t' << buf;
      }
      os << '\n';
    }
    return os.str();
  }
};

}  // namespace fwt
