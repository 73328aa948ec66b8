#pragma once

// Rotor thrust/torque from Cp/Ct performance surfaces indexed by tip-speed
// ratio and blade pitch. A smooth analytic surrogate surface ships as the
// default; measured tables load from a delimited text file.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fwt/errors.hpp"
#include "fwt/frames.hpp"
#include "fwt/hydro.hpp"
#include "fwt/params.hpp"
#include "fwt/state.hpp"

namespace fwt {

// Exponential-family surrogate coefficients:
//   C(lambda, beta) = max(0, s1 (s2/lambda - s3 beta_deg - s4) e^(-s5/lambda))
// The beta dependence is linear, so dC/dbeta < 0 wherever C > 0.
struct SurrogateCoeffs {
  double s1, s2, s3, s4, s5;
};
inline constexpr SurrogateCoeffs kDefaultCp{18.09, 27.763, 0.0721, 5.0, 17.24};
inline constexpr SurrogateCoeffs kDefaultCt{20.27, 27.763, 0.06925, 5.0, 17.24};

inline double surrogate_eval(const SurrogateCoeffs& c, double lambda,
                             double beta_rad) {
  if (lambda <= 0.0) return 0.0;
  const double beta_deg = beta_rad * 180.0 / M_PI;
  const double v = c.s1 * (c.s2 / lambda - c.s3 * beta_deg - c.s4) *
                   std::exp(-c.s5 / lambda);
  return std::max(0.0, v);
}

// Rectangular Cp/Ct grids over ascending (lambda, beta) breakpoints with
// bilinear interpolation; out-of-grid queries clamp to the boundary.
class RotorAeroTable {
 public:
  RotorAeroTable() = default;

  RotorAeroTable(std::vector<double> lambda_grid, std::vector<double> beta_grid,
                 std::vector<std::vector<double>> cp,
                 std::vector<std::vector<double>> ct)
      : lambda_(std::move(lambda_grid)), beta_(std::move(beta_grid)),
        cp_(std::move(cp)), ct_(std::move(ct)) {
    validate();
  }

  static RotorAeroTable surrogate(const SurrogateCoeffs& cp = kDefaultCp,
                                  const SurrogateCoeffs& ct = kDefaultCt) {
    std::vector<double> lg, bg;
    for (double l = 0.5; l <= 12.0 + 1e-9; l += 0.125) lg.push_back(l);
    for (double b = 0.0; b <= 45.0 + 1e-9; b += 0.5) {
      bg.push_back(b * M_PI / 180.0);
    }
    std::vector<std::vector<double>> cpv(lg.size()), ctv(lg.size());
    for (size_t i = 0; i < lg.size(); ++i) {
      cpv[i].resize(bg.size());
      ctv[i].resize(bg.size());
      for (size_t j = 0; j < bg.size(); ++j) {
        cpv[i][j] = surrogate_eval(cp, lg[i], bg[j]);
        ctv[i][j] = surrogate_eval(ct, lg[i], bg[j]);
      }
    }
    return RotorAeroTable(std::move(lg), std::move(bg), std::move(cpv),
                          std::move(ctv));
  }

  // File layout: optional '#' comments, a "CP" line, then one row of beta
  // breakpoints in degrees, then one row per lambda breakpoint (lambda value
  // first), then a "CT" line with the same layout.
  static RotorAeroTable from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open aero table: " + path);
    std::vector<double> lg, bg;
    std::vector<std::vector<double>> cpv, ctv;
    std::string line;
    int block = 0;  // 0: none, 1: cp, 2: ct
    bool beta_row_read = false;
    std::vector<double> lg2;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss(line);
      std::string word;
      ss >> word;
      if (word == "CP") { block = 1; beta_row_read = false; continue; }
      if (word == "CT") { block = 2; beta_row_read = false; continue; }
      if (block == 0) throw ParseError(path + ": data before CP/CT marker");
      std::istringstream row(line);
      std::vector<double> vals;
      double v;
      while (row >> v) vals.push_back(v);
      if (!beta_row_read) {
        std::vector<double> betas;
        for (double b : vals) betas.push_back(b * M_PI / 180.0);
        if (block == 1) bg = betas;
        else if (betas.size() != bg.size()) {
          throw ParseError(path + ": CT beta row differs from CP");
        }
        beta_row_read = true;
        continue;
      }
      if (vals.size() != bg.size() + 1) {
        throw ParseError(path + ": row width does not match beta breakpoints");
      }
      (block == 1 ? lg : lg2).push_back(vals[0]);
      (block == 1 ? cpv : ctv)
          .push_back(std::vector<double>(vals.begin() + 1, vals.end()));
    }
    if (lg2 != lg) throw ParseError(path + ": CT lambda grid differs from CP");
    return RotorAeroTable(std::move(lg), std::move(bg), std::move(cpv),
                          std::move(ctv));
  }

  struct Coeffs {
    double cp, ct;
  };

  Coeffs lookup(double lambda, double beta_rad) const {
    return Coeffs{interp(cp_, lambda, beta_rad),
                  interp(ct_, lambda, beta_rad)};
  }

  const std::vector<double>& lambda_grid() const { return lambda_; }
  const std::vector<double>& beta_grid() const { return beta_; }

 private:
  void validate() const {
    auto ascending = [](const std::vector<double>& g) {
      for (size_t i = 1; i < g.size(); ++i) {
        if (!(g[i] > g[i - 1])) return false;
      }
      return g.size() >= 2;
    };
    if (!ascending(lambda_) || !ascending(beta_)) {
      throw InvalidParameters("aero table: breakpoints must be ascending");
    }
    if (cp_.size() != lambda_.size() || ct_.size() != lambda_.size()) {
      throw InvalidParameters("aero table: grid rows do not match lambda");
    }
    for (size_t i = 0; i < lambda_.size(); ++i) {
      if (cp_[i].size() != beta_.size() || ct_[i].size() != beta_.size()) {
        throw InvalidParameters("aero table: grid cols do not match beta");
      }
      for (size_t j = 0; j < beta_.size(); ++j) {
        if (!std::isfinite(cp_[i][j]) || !std::isfinite(ct_[i][j]) ||
            cp_[i][j] < 0.0 || cp_[i][j] > 0.593 || ct_[i][j] < 0.0) {
          throw InvalidParameters(
              "aero table: Cp must lie in [0, 0.593] and Ct must be >= 0");
        }
      }
    }
  }

  double interp(const std::vector<std::vector<double>>& grid, double lambda,
                double beta) const {
    const auto [il, wl] = bracket(lambda_, lambda);
    const auto [ib, wb] = bracket(beta_, beta);
    const double v00 = grid[il][ib], v01 = grid[il][ib + 1];
    const double v10 = grid[il + 1][ib], v11 = grid[il + 1][ib + 1];
    return (1 - wl) * ((1 - wb) * v00 + wb * v01) +
           wl * ((1 - wb) * v10 + wb * v11);
  }

  static std::pair<size_t, double> bracket(const std::vector<double>& g,
                                           double x) {
    if (x <= g.front()) return {0, 0.0};
    if (x >= g.back()) return {g.size() - 2, 1.0};
    const auto it = std::upper_bound(g.begin(), g.end(), x);
    const size_t i = static_cast<size_t>(it - g.begin()) - 1;
    return {i, (x - g[i]) / (g[i + 1] - g[i])};
  }

  std::vector<double> lambda_, beta_;
  std::vector<std::vector<double>> cp_, ct_;
};

// Axial inflow seen by the rotor: wind minus hub velocity projected on the
// shaft axis (body e1), negative inflow clamped to zero.
inline double relative_axial_wind(const StateVector& s, const Vec3& v_wind_i,
                                  const Vec3& r_hub) {
  const Mat3 R = rotation_matrix(s.theta);
  const Vec3 v_hub = s.v_p + s.omega_p.cross(r_hub);
  const Vec3 u_w = R.transpose() * v_wind_i - v_hub;
  return std::max(0.0, u_w.x());
}

struct AeroLoads {
  double F_a{0};      // axial thrust (N)
  double tau_a{0};    // shaft torque (N m)
  double U{0};        // axial inflow (m/s)
  double lambda{0};   // tip speed ratio
  double cp{0}, ct{0};
  LoadWrench wrench;  // thrust + shaft torque + hub-offset moment
};

inline constexpr double kMinAxialInflow = 0.1;  // m/s; below this, zero loads

inline AeroLoads aero_loads(const RotorSpec& spec, const RotorAeroTable& table,
                            const StateVector& s, const Vec3& v_wind_i,
                            double beta) {
  AeroLoads out;
  out.wrench.source = LoadSource::aero;
  const double U = relative_axial_wind(s, v_wind_i, spec.r_hub);
  out.U = U;
  if (U < kMinAxialInflow) return out;

  const double lambda = s.omega_r * spec.R_r / U;
  const auto [cp, ct] = table.lookup(lambda, beta);
  const double qA = 0.5 * spec.rho_a * M_PI * spec.R_r * spec.R_r * U * U;
  out.lambda = lambda;
  out.cp = cp;
  out.ct = ct;
  out.F_a = qA * ct;
  out.tau_a = lambda > 1e-9 ? qA * spec.R_r * cp / lambda : 0.0;
  out.wrench.force = out.F_a * Vec3::UnitX();
  out.wrench.moment = out.tau_a * Vec3::UnitX() +
                      spec.r_hub.cross(out.wrench.force);
  return out;
}

// Region-III generator torque at the rotor side: constant rated value with a
// startup guard below cut-in speed.
inline double generator_torque(const RotorSpec& spec, double omega_r) {
  return omega_r >= spec.omega_cut_in ? spec.tau_g_rated : 0.0;
}

}  // namespace fwt
