#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptomech/basin.hpp"
#include "ptomech/pipeline.hpp"
#include "ptomech/sweep.hpp"

namespace ptomech {

/// Floats are printed with 17 significant digits ('.' decimal, no locale) so
/// CSV/JSON output round-trips bit-exactly.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// ---- parameters ------------------------------------------------------------

inline nlohmann::json params_to_json(const SystemParams& p) {
  return {{"omega_m", p.omega_m}, {"gamma", p.gamma},   {"kappa", p.kappa},
          {"gamma_m", p.gamma_m}, {"g", p.g},           {"J", p.J},
          {"delta", p.delta},     {"chi", p.chi},       {"theta", p.theta},
          {"alpha_in", p.alpha_in}, {"n_th", p.n_th},   {"n_a", p.n_a}};
}

/// Flat JSON object with the SystemParams field names; unknown keys rejected.
/// A file that sets omega_m without delta keeps delta on its blue-sideband
/// default delta = omega_m.
inline SystemParams params_from_json(const nlohmann::json& j, SystemParams base = {}) {
  if (!j.is_object()) throw DomainError("params", "parameter file must be a JSON object");
  bool saw_omega_m = false, saw_delta = false;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number())
      throw DomainError(key, "parameter values must be numbers");
    const double v = value.get<double>();
    if (key == "omega_m") { base.omega_m = v; saw_omega_m = true; }
    else if (key == "gamma") base.gamma = v;
    else if (key == "kappa") base.kappa = v;
    else if (key == "gamma_m") base.gamma_m = v;
    else if (key == "g") base.g = v;
    else if (key == "J") base.J = v;
    else if (key == "delta") { base.delta = v; saw_delta = true; }
    else if (key == "chi") base.chi = v;
    else if (key == "theta") base.theta = v;
    else if (key == "alpha_in") base.alpha_in = v;
    else if (key == "n_th") base.n_th = v;
    else if (key == "n_a") base.n_a = v;
    else throw DomainError(key, "unknown parameter key");
  }
  if (saw_omega_m && !saw_delta) base.delta = base.omega_m;
  return base;
}

inline SystemParams params_from_json_file(const std::string& path, SystemParams base = {}) {
  std::ifstream in(path);
  if (!in) throw DomainError("params", "cannot open parameter file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("params", std::string("parameter file parse error: ") + e.what());
  }
  return params_from_json(j, base);
}

// ---- steady-state branches ---------------------------------------------------

inline nlohmann::json branch_to_json(const SteadyStateBranch& br) {
  return {{"alpha1_re", br.alpha1_s.real()}, {"alpha1_im", br.alpha1_s.imag()},
          {"alpha2_re", br.alpha2_s.real()}, {"alpha2_im", br.alpha2_s.imag()},
          {"beta_re", br.beta_s.real()},     {"beta_im", br.beta_s.imag()},
          {"n2", br.n2},                     {"delta_tilde", br.delta_tilde},
          {"g1", br.g1},                     {"g2", br.g2}};
}

inline SteadyStateBranch branch_from_json(const nlohmann::json& j) {
  SteadyStateBranch br;
  br.alpha1_s = Complex(j.at("alpha1_re").get<double>(), j.at("alpha1_im").get<double>());
  br.alpha2_s = Complex(j.at("alpha2_re").get<double>(), j.at("alpha2_im").get<double>());
  br.beta_s = Complex(j.at("beta_re").get<double>(), j.at("beta_im").get<double>());
  br.n2 = j.at("n2").get<double>();
  br.delta_tilde = j.at("delta_tilde").get<double>();
  br.g1 = j.at("g1").get<double>();
  br.g2 = j.at("g2").get<double>();
  return br;
}

// ---- sweep records -------------------------------------------------------------

inline std::string sweep_csv_header(const SweepSpec& spec) {
  std::string h;
  for (const auto& ax : spec.axes) {
    h += to_string(ax.param);
    h += ',';
  }
  bool first = true;
  for (const auto& name : sweep_field_names()) {
    if (!spec.wants(name.c_str())) continue;
    if (!first) h += ',';
    h += name;
    first = false;
  }
  return h;
}

inline std::string sweep_record_csv(const SweepSpec& spec, const SweepRecord& r) {
  std::string line;
  for (double v : r.axis_values) {
    line += format_double(v);
    line += ',';
  }
  const bool solved = r.error.empty() || r.stable >= 0;
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  auto field_value = [&](const std::string& name) -> std::string {
    if (name == "branch_index") return solved ? std::to_string(r.branch_index) : "";
    if (name == "branch_count") return solved ? std::to_string(r.branch_count) : "";
    if (name == "n2") return solved ? format_double(r.n2) : "";
    if (name == "delta_tilde") return solved ? format_double(r.delta_tilde) : "";
    if (name == "g1") return solved ? format_double(r.g1) : "";
    if (name == "g2") return solved ? format_double(r.g2) : "";
    if (name == "stable") return r.stable >= 0 ? std::to_string(r.stable) : "";
    if (name == "max_re_lambda") return solved ? format_double(r.max_re_lambda) : "";
    if (name == "en_mech_cav1") return opt(r.en_mech_cav1);
    if (name == "en_mech_cav2") return opt(r.en_mech_cav2);
    if (name == "en_cav1_cav2") return opt(r.en_cav1_cav2);
    if (name == "min_symplectic") return opt(r.min_symplectic);
    return csv_field(r.error);
  };
  bool first = true;
  for (const auto& name : sweep_field_names()) {
    if (!spec.wants(name.c_str())) continue;
    if (!first) line += ',';
    line += field_value(name);
    first = false;
  }
  return line;
}

inline std::string sweep_to_csv(const SweepSpec& spec, const std::vector<SweepRecord>& records) {
  std::string out = sweep_csv_header(spec);
  out += '\n';
  for (const auto& r : records) {
    out += sweep_record_csv(spec, r);
    out += '\n';
  }
  return out;
}

inline nlohmann::json sweep_record_json(const SweepSpec& spec, const SweepRecord& r) {
  nlohmann::json j;
  for (size_t a = 0; a < r.axis_values.size(); ++a)
    j[to_string(spec.axes[a].param)] = r.axis_values[a];
  const bool solved = r.error.empty() || r.stable >= 0;
  if (solved) {
    if (spec.wants("branch_index")) j["branch_index"] = r.branch_index;
    if (spec.wants("branch_count")) j["branch_count"] = r.branch_count;
    if (spec.wants("n2")) j["n2"] = r.n2;
    if (spec.wants("delta_tilde")) j["delta_tilde"] = r.delta_tilde;
    if (spec.wants("g1")) j["g1"] = r.g1;
    if (spec.wants("g2")) j["g2"] = r.g2;
    if (r.stable >= 0 && spec.wants("stable")) j["stable"] = r.stable == 1;
    if (spec.wants("max_re_lambda")) j["max_re_lambda"] = r.max_re_lambda;
  }
  if (r.en_mech_cav1 && spec.wants("en_mech_cav1")) j["en_mech_cav1"] = *r.en_mech_cav1;
  if (r.en_mech_cav2 && spec.wants("en_mech_cav2")) j["en_mech_cav2"] = *r.en_mech_cav2;
  if (r.en_cav1_cav2 && spec.wants("en_cav1_cav2")) j["en_cav1_cav2"] = *r.en_cav1_cav2;
  if (r.min_symplectic && spec.wants("min_symplectic")) j["min_symplectic"] = *r.min_symplectic;
  if (!r.error.empty() && spec.wants("error")) j["error"] = r.error;
  return j;
}

inline nlohmann::json sweep_to_json(const SweepSpec& spec, const std::vector<SweepRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(sweep_record_json(spec, r));
  return arr;
}

// ---- stability maps ---------------------------------------------------------------

inline std::string basin_to_csv(const StabilityMap& map) {
  std::string out = "x,y,branch_count,stable,max_re_lambda\n";
  for (const auto& c : map.cells) {
    out += format_double(c.x);
    out += ',';
    out += format_double(c.y);
    out += ',';
    out += std::to_string(c.branch_count);
    out += ',';
    if (c.stable >= 0) out += std::to_string(c.stable);
    out += ',';
    if (c.stable >= 0) out += format_double(c.max_re_lambda);
    out += '\n';
  }
  return out;
}

inline nlohmann::json basin_metadata(const StabilityMap& map) {
  auto axis_json = [](const AxisSpec& a) {
    return nlohmann::json{{"param", to_string(a.param)},
                          {"min", a.min},
                          {"max", a.max},
                          {"steps", a.steps},
                          {"scale", a.scale == AxisScale::Log ? "log" : "linear"}};
  };
  nlohmann::json ep{{"axis", map.ep.axis}};
  if (map.ep.axis != "line") ep["value"] = map.ep.value;
  else ep["equation"] = "J = (gamma + kappa)/4";
  return nlohmann::json{{"x_axis", axis_json(map.x_axis)},
                        {"y_axis", axis_json(map.y_axis)},
                        {"ordering", "row-major, y outer, x inner"},
                        {"ep_contour", ep},
                        {"unstable_fraction", map.unstable_fraction()}};
}

}  // namespace ptomech
