#pragma once

// Physical parameter set: masses, inertias, member geometry, hydrodynamic
// coefficients, mooring matrices, rotor properties. Loaded from a JSON file
// (comments allowed) with strict unknown-key rejection.

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "fwt/errors.hpp"
#include "fwt/frames.hpp"

namespace fwt {

struct BodyProperties {
  double m_p{0}, m_t{0}, m_nc{0}, m_r{0};  // kg
  Vec3 I_p{Vec3::Zero()};                  // principal inertias, kg m^2
  Vec3 I_t{Vec3::Zero()};
  Vec3 I_nc{Vec3::Zero()};
  Vec3 I_r{Vec3::Zero()};
  double H_t{0};    // tower CM height above platform CM (m)
  double H_r{0};    // hub / nacelle CM height above platform CM (m)
  double h_nc{0};   // nacelle CM fore offset (m)
  double h_r{0};    // rotor CM overhang, along -x (m)
  double g{9.81};   // m/s^2

  void validate() const {
    auto pos = [](double v, const char* name) {
      if (!(v > 0.0)) {
        throw InvalidParameters(std::string("body: ") + name +
                                " must be > 0");
      }
    };
    pos(m_p, "platform mass");
    pos(m_t, "tower mass");
    pos(m_nc, "nacelle mass");
    pos(m_r, "rotor mass");
    for (const Vec3* I : {&I_p, &I_t, &I_nc, &I_r}) {
      if (!(I->minCoeff() > 0.0)) {
        throw InvalidParameters("body: inertia entries must be > 0");
      }
    }
    if (!(H_r > H_t)) {
      throw InvalidParameters("body: hub height must exceed tower CM height");
    }
    pos(g, "gravity");
  }
};

enum class CylinderRole { main_column, upper_column, base_column };

inline const char* to_string(CylinderRole r) {
  switch (r) {
    case CylinderRole::main_column: return "main-column";
    case CylinderRole::upper_column: return "upper-column";
    default: return "base-column";
  }
}

struct CylinderSpec {
  Vec3 r_b{Vec3::Zero()};  // base-center position, body frame (m)
  double L_0{0};           // initial submerged length (m)
  double length{0};        // actual column length (m); wetted-length clamp
  double d{0};             // diameter (m)
  double C_d{0}, C_a{0};   // transverse drag / added-mass coefficients
  double C_dz{0}, C_az{0}; // heave drag / added-mass (base columns)
  CylinderRole role{CylinderRole::main_column};

  double area() const { return M_PI * d * d / 4.0; }
  bool floating() const { return role != CylinderRole::base_column; }
};

struct MooringLine {
  Vec3 fairlead_b{Vec3::Zero()};  // body frame (m)
  Vec3 anchor_i{Vec3::Zero()};    // inertial frame (m)
  double pretension_n{0};
  double axial_stiffness_npm{0};  // effective stiffness of the chord stretch
  double rest_chord_m{0};         // filled in at load time (undisplaced pose)
};

struct MooringConfig {
  Mat6 stiffness{Mat6::Zero()};   // about the undisplaced pose
  Mat6 damping{Mat6::Zero()};
  Vec6 pretension{Vec6::Zero()};  // wrench at q = 0, inertial axes
  std::vector<MooringLine> lines; // 3 lines, per-line tension reporting

  void validate() const {
    if ((stiffness - stiffness.transpose()).cwiseAbs().maxCoeff() >
        1e-6 * (1.0 + stiffness.cwiseAbs().maxCoeff())) {
      throw InvalidParameters("mooring: stiffness matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat6> es(stiffness);
    if (es.eigenvalues().minCoeff() <
        -1e-8 * (1.0 + stiffness.cwiseAbs().maxCoeff())) {
      throw InvalidParameters(
          "mooring: stiffness matrix must be positive semidefinite");
    }
    if (lines.size() != 3) {
      throw InvalidParameters("mooring: exactly 3 lines expected");
    }
  }
};

struct HydroConfig {
  double rho_w{1025.0};       // kg/m^3
  int quadrature_points{32};  // strips per member

  void validate() const {
    if (!(rho_w > 0.0)) {
      throw InvalidParameters("hydro: water density must be > 0");
    }
    if (quadrature_points < 8) {
      throw InvalidParameters("hydro: quadrature_points must be >= 8");
    }
  }
};

struct RotorSpec {
  double R_r{63.0};            // rotor radius (m)
  double rho_a{1.225};         // air density (kg/m^3)
  double omega_rated{1.267109036947883};  // rad/s (12.1 rpm)
  double tau_g_rated{4.1803743e6};        // rotor-side rated torque (N m)
  double rated_power{5.297e6};            // W
  double omega_cut_in{0.12671090369};     // startup guard (rad/s)
  Vec3 r_hub{Vec3::Zero()};    // hub position, body frame (m)

  void validate() const {
    if (!(R_r > 0 && rho_a > 0 && omega_rated > 0 && tau_g_rated > 0)) {
      throw InvalidParameters("rotor: all properties must be > 0");
    }
    const double p = tau_g_rated * omega_rated;
    if (std::abs(p - rated_power) > 1e-3 * rated_power) {
      throw InvalidParameters(
          "rotor: rated torque x rated speed deviates from rated power by "
          "more than 0.1%");
    }
  }
};

struct ParameterSet {
  BodyProperties body;
  std::vector<CylinderSpec> cylinders;
  HydroConfig hydro;
  MooringConfig mooring;
  RotorSpec rotor;
  double z_swl{0};          // still-water line above body origin (m)
  double rho_a{1.225};
  std::string aero_table_file;  // empty: built-in surrogate surface

  void validate() const {
    body.validate();
    hydro.validate();
    mooring.validate();
    rotor.validate();
    if (cylinders.size() != 7) {
      throw InvalidParameters("exactly 7 cylinders expected (1 main, 3 upper, "
                              "3 base)");
    }
    int idx = 0;
    for (const auto& c : cylinders) {
      ++idx;
      if (!(c.d > 0 && c.L_0 > 0 && c.length > 0)) {
        throw InvalidParameters("cylinder " + std::to_string(idx) +
                                ": diameter and lengths must be > 0");
      }
      if (c.C_d < 0 || c.C_a < 0 || c.C_dz < 0 || c.C_az < 0) {
        throw InvalidParameters("cylinder " + std::to_string(idx) +
                                ": coefficients must be >= 0");
      }
      const CylinderRole want =
          idx == 1 ? CylinderRole::main_column
                   : (idx <= 4 ? CylinderRole::upper_column
                               : CylinderRole::base_column);
      if (c.role != want) {
        throw InvalidParameters(
            "cylinder " + std::to_string(idx) + ": expected role " +
            to_string(want) + ", got " + to_string(c.role));
      }
      if (c.floating()) {
        // The waterline height is implied by each floating member's geometry;
        // all members must agree with the declared value.
        const double implied = c.L_0 + c.r_b.z();
        if (std::abs(implied - z_swl) > 1e-6 * (1.0 + std::abs(z_swl))) {
          throw InvalidParameters(
              "cylinder " + std::to_string(idx) +
              ": submerged_length + base z = " + std::to_string(implied) +
              " disagrees with waterline_above_origin_m");
        }
      }
    }
  }
};

// ---------------------------------------------------------------------------
// JSON loading

namespace detail {

inline void check_keys(const nlohmann::json& j,
                       const std::set<std::string>& allowed,
                       const std::string& context) {
  if (!j.is_object()) {
    throw ParseError(context + ": expected an object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw UnknownKey(context + ": unknown key \"" + it.key() + "\"");
    }
  }
}

inline const nlohmann::json& require(const nlohmann::json& j,
                                     const std::string& key,
                                     const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(context + ": missing required key \"" + key + "\"");
  }
  return *it;
}

inline Vec3 to_vec3(const nlohmann::json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(context + ": expected an array of 3 numbers");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline Mat6 to_mat6(const nlohmann::json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 6) {
    throw ParseError(context + ": expected a 6x6 array");
  }
  Mat6 m;
  for (int r = 0; r < 6; ++r) {
    if (!j[r].is_array() || j[r].size() != 6) {
      throw ParseError(context + ": expected a 6x6 array");
    }
    for (int c = 0; c < 6; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

inline nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw MissingFile("cannot open file: " + path);
  }
  try {
    return nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/true,
                                 /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace detail

inline ParameterSet load_parameters(const std::string& path) {
  using nlohmann::json;
  const json j = detail::parse_json_file(path);
  detail::check_keys(j,
                     {"description", "gravity_mps2", "water_density_kgpm3",
                      "air_density_kgpm3", "waterline_above_origin_m", "body",
                      "cylinders", "hydro", "mooring", "rotor_aero"},
                     path);

  ParameterSet p;
  p.body.g = detail::require(j, "gravity_mps2", path).get<double>();
  p.hydro.rho_w = detail::require(j, "water_density_kgpm3", path).get<double>();
  p.rho_a = detail::require(j, "air_density_kgpm3", path).get<double>();
  p.rotor.rho_a = p.rho_a;
  p.z_swl = detail::require(j, "waterline_above_origin_m", path).get<double>();

  {
    const json& b = detail::require(j, "body", path);
    detail::check_keys(b, {"platform", "tower", "nacelle", "rotor"},
                       path + ":body");
    auto piece = [&](const char* name, const std::set<std::string>& extra)
        -> const json& {
      const json& s = detail::require(b, name, path + ":body");
      std::set<std::string> keys = {"mass_kg", "inertia_kgm2"};
      keys.insert(extra.begin(), extra.end());
      detail::check_keys(s, keys, path + ":body:" + name);
      return s;
    };
    const json& pl = piece("platform", {});
    const json& tw = piece("tower", {"cm_height_m"});
    const json& nc = piece("nacelle", {"fore_offset_m"});
    const json& ro = piece("rotor", {"hub_height_m", "overhang_m"});
    p.body.m_p = pl["mass_kg"].get<double>();
    p.body.I_p = detail::to_vec3(pl["inertia_kgm2"], "platform inertia");
    p.body.m_t = tw["mass_kg"].get<double>();
    p.body.I_t = detail::to_vec3(tw["inertia_kgm2"], "tower inertia");
    p.body.H_t = detail::require(tw, "cm_height_m", "tower").get<double>();
    p.body.m_nc = nc["mass_kg"].get<double>();
    p.body.I_nc = detail::to_vec3(nc["inertia_kgm2"], "nacelle inertia");
    p.body.h_nc = detail::require(nc, "fore_offset_m", "nacelle").get<double>();
    p.body.m_r = ro["mass_kg"].get<double>();
    p.body.I_r = detail::to_vec3(ro["inertia_kgm2"], "rotor inertia");
    p.body.H_r = detail::require(ro, "hub_height_m", "rotor").get<double>();
    p.body.h_r = detail::require(ro, "overhang_m", "rotor").get<double>();
  }

  {
    const json& cyls = detail::require(j, "cylinders", path);
    if (!cyls.is_array()) throw ParseError(path + ": cylinders must be a list");
    for (const json& c : cyls) {
      detail::check_keys(c,
                         {"role", "base_m", "diameter_m", "submerged_length_m",
                          "length_m", "cd", "ca", "cdz", "caz"},
                         path + ":cylinders");
      CylinderSpec s;
      const std::string role = c["role"].get<std::string>();
      if (role == "main-column") s.role = CylinderRole::main_column;
      else if (role == "upper-column") s.role = CylinderRole::upper_column;
      else if (role == "base-column") s.role = CylinderRole::base_column;
      else throw ParseError(path + ": unknown cylinder role \"" + role + "\"");
      s.r_b = detail::to_vec3(c["base_m"], "cylinder base");
      s.d = c["diameter_m"].get<double>();
      s.L_0 = c["submerged_length_m"].get<double>();
      s.length = c["length_m"].get<double>();
      s.C_d = c["cd"].get<double>();
      s.C_a = c["ca"].get<double>();
      s.C_dz = c.value("cdz", 0.0);
      s.C_az = c.value("caz", 0.0);
      p.cylinders.push_back(s);
    }
  }

  {
    const json& h = detail::require(j, "hydro", path);
    detail::check_keys(h, {"quadrature_points"}, path + ":hydro");
    p.hydro.quadrature_points = h.value("quadrature_points", 32);
  }

  {
    const json& m = detail::require(j, "mooring", path);
    detail::check_keys(m, {"stiffness", "damping", "pretension", "lines"},
                       path + ":mooring");
    p.mooring.stiffness = detail::to_mat6(m["stiffness"], "mooring stiffness");
    p.mooring.damping = detail::to_mat6(m["damping"], "mooring damping");
    const json& pre = m["pretension"];
    if (!pre.is_array() || pre.size() != 6) {
      throw ParseError(path + ": mooring pretension must have 6 entries");
    }
    for (int i = 0; i < 6; ++i) p.mooring.pretension(i) = pre[i].get<double>();
    for (const json& l : m["lines"]) {
      detail::check_keys(
          l, {"fairlead_m", "anchor_m", "pretension_n", "axial_stiffness_npm"},
          path + ":mooring:lines");
      MooringLine line;
      line.fairlead_b = detail::to_vec3(l["fairlead_m"], "fairlead");
      line.anchor_i = detail::to_vec3(l["anchor_m"], "anchor");
      line.pretension_n = l["pretension_n"].get<double>();
      line.axial_stiffness_npm = l["axial_stiffness_npm"].get<double>();
      line.rest_chord_m = (line.anchor_i - line.fairlead_b).norm();
      p.mooring.lines.push_back(line);
    }
  }

  {
    const json& r = detail::require(j, "rotor_aero", path);
    detail::check_keys(r,
                       {"radius_m", "rated_speed_rpm", "rated_power_w",
                        "rated_torque_nm", "cut_in_speed_rpm", "table_file"},
                       path + ":rotor_aero");
    p.rotor.R_r = r["radius_m"].get<double>();
    p.rotor.omega_rated = r["rated_speed_rpm"].get<double>() * M_PI / 30.0;
    p.rotor.rated_power = r["rated_power_w"].get<double>();
    p.rotor.tau_g_rated = r["rated_torque_nm"].get<double>();
    p.rotor.omega_cut_in = r.value("cut_in_speed_rpm", 1.21) * M_PI / 30.0;
    p.rotor.r_hub = Vec3(-p.body.h_r, 0.0, p.body.H_r);
    p.aero_table_file = r.value("table_file", std::string());
  }

  p.validate();
  return p;
}

}  // namespace fwt
