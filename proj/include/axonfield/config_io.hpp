// Copyright 2026 The Axonfield Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS-IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AXONFIELD_CONFIG_IO_HPP
#define AXONFIELD_CONFIG_IO_HPP

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "axonfield/params.hpp"

namespace axonfield {

// The configuration file is plain `key = value` lines with dotted section
// prefixes, '#' comments, and blank lines. Key names carry their unit, e.g.
//   geometry.axon_radius_nm = 500
//   hh.g_Na_mScm2           = 100
// The full key table lives in the README.

namespace detail {

inline std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::map<std::string, std::string> parse_kv_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config file not found or unreadable: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key or value");
    if (kv.count(key))
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key " + key);
    kv[key] = val;
  }
  return kv;
}

inline double to_number(const std::string& key, const std::string& val) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(val, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: " + val);
  }
  if (pos != val.size()) throw ConfigError(key + ": trailing junk: " + val);
  return x;
}

inline bool to_bool(const std::string& key, const std::string& val) {
  if (val == "true" || val == "1" || val == "yes") return true;
  if (val == "false" || val == "0" || val == "no") return false;
  throw ConfigError(key + ": expected a boolean, got: " + val);
}

class KeyReader {
 public:
  explicit KeyReader(std::map<std::string, std::string> kv)
      : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  // Fetches, converts, and marks the key as consumed.
  bool number(const std::string& key, double scale, double& out) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return false;
    out = to_number(key, it->second) * scale;
    kv_.erase(it);
    return true;
  }
  bool boolean(const std::string& key, bool& out) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return false;
    out = to_bool(key, it->second);
    kv_.erase(it);
    return true;
  }
  bool string(const std::string& key, std::string& out) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return false;
    out = it->second;
    kv_.erase(it);
    return true;
  }

  void reject_leftovers() const {
    if (!kv_.empty())
      throw ConfigError("unknown config key: " + kv_.begin()->first);
  }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace detail

// Unit scale factors applied on load.
inline constexpr double kMilli = 1e-3;
inline constexpr double kMicro = 1e-6;
inline constexpr double kNano = 1e-9;
inline constexpr double kMSPerCm2 = 10.0;    // mS/cm^2 -> S/m^2
inline constexpr double kUFPerCm2 = 0.01;    // uF/cm^2 -> F/m^2
inline constexpr double kMMolPerL = 1.0;     // mmol/L == mol/m^3
inline constexpr double kMVPerM = 1e-3;      // mV/m -> V/m

/// Build a ModelConfig from a key-value file. Unspecified keys take the
/// defaults of default_config(). Throws ConfigError on missing file,
/// malformed syntax, unknown keys, or invariant violations.
inline ModelConfig load_config(const std::string& path) {
  detail::KeyReader r(detail::parse_kv_file(path));
  ModelConfig cfg = default_config();

  r.number("constants.e", 1.0, cfg.constants.e);
  r.number("constants.k_b", 1.0, cfg.constants.k_b);
  r.number("constants.N_A", 1.0, cfg.constants.N_A);
  r.number("constants.F", 1.0, cfg.constants.F);
  r.number("constants.R_gas", 1.0, cfg.constants.R_gas);
  r.number("constants.mu0", 1.0, cfg.constants.mu0);
  r.number("constants.eps0", 1.0, cfg.constants.eps0);

  for (auto& s : cfg.electrolyte.species) {
    const std::string p = "species." + s.name + ".";
    double z;
    if (r.number(p + "valence", 1.0, z)) s.valence = static_cast<int>(z);
    r.number(p + "diffusion_m2s", 1.0, s.diffusion);
    r.number(p + "conc_internal_mmolL", kMMolPerL, s.conc_internal);
    r.number(p + "conc_external_mmolL", kMMolPerL, s.conc_external);
  }
  r.number("electrolyte.temperature_K", 1.0, cfg.electrolyte.temperature);
  r.number("electrolyte.eps_r_water_CVm", 1.0, cfg.electrolyte.eps_r_water);

  r.number("geometry.axon_radius_nm", kNano, cfg.geometry.axon_radius);
  r.number("geometry.axial_length_mm", kMilli, cfg.geometry.axial_length);
  r.number("geometry.outer_radius_um", kMicro, cfg.geometry.outer_radius);
  r.number("geometry.debye_band_nm", kNano, cfg.geometry.debye_band);

  r.number("hh.g_Na_mScm2", kMSPerCm2, cfg.hh.g_Na);
  r.number("hh.g_NaL_mScm2", kMSPerCm2, cfg.hh.g_NaL);
  r.number("hh.g_K_mScm2", kMSPerCm2, cfg.hh.g_K);
  r.number("hh.g_KL_mScm2", kMSPerCm2, cfg.hh.g_KL);
  r.number("hh.phi", 1.0, cfg.hh.phi);
  r.number("hh.C_m_uFcm2", kUFPerCm2, cfg.hh.C_m);
  r.number("hh.V_rest_mV", kMilli, cfg.hh.V_rest);
  bool v_na_overridden = r.number("hh.V_Na_mV", kMilli, cfg.hh.V_Na);
  bool v_k_overridden = r.number("hh.V_K_mV", kMilli, cfg.hh.V_K);
  r.number("hh.stim_amplitude_Apm2", 1.0, cfg.hh.stimulus.amplitude);
  r.number("hh.stim_onset_ms", kMilli, cfg.hh.stimulus.onset);
  r.number("hh.stim_duration_ms", kMilli, cfg.hh.stimulus.duration);
  r.number("hh.velocity_mps", 1.0, cfg.hh.velocity);
  r.boolean("hh.balance_rest", cfg.hh.balance_rest);
  r.number("hh.t_end_ms", kMilli, cfg.hh.t_end);
  r.number("hh.dt_us", kMicro, cfg.hh.dt);

  r.number("bc.gamma", 1.0, cfg.bc.gamma);
  r.number("bc.eta", 1.0, cfg.bc.eta);
  std::string mode;
  if (r.string("bc.q_i0_mode", mode)) {
    if (mode == "calibrated")
      cfg.bc.q_i0_mode = QInternalMode::kCalibrated;
    else if (mode == "formula")
      cfg.bc.q_i0_mode = QInternalMode::kFormula;
    else
      throw ConfigError(
          "bc.q_i0_mode: expected calibrated or formula (or set bc.q_i0_Cpm)");
  }
  if (r.number("bc.q_i0_Cpm", 1.0, cfg.bc.q_i0))
    cfg.bc.q_i0_mode = QInternalMode::kValue;
  r.number("bc.resting_Er_mVpm", kMVPerM, cfg.bc.resting_Er);
  r.number("bc.sigma_i0_Spm", 1.0, cfg.bc.sigma_i0);

  r.number("solver.dr_fine_nm", kNano, cfg.solver.dr_fine);
  r.number("solver.grade_factor", 1.0, cfg.solver.grade_factor);
  r.number("solver.dr_max_nm", kNano, cfg.solver.dr_max);
  r.number("solver.dxi_um", kMicro, cfg.solver.dxi);
  r.number("solver.dxi_full_um", kMicro, cfg.solver.dxi_full);
  r.number("solver.window_um", kMicro, cfg.solver.window);
  r.number("solver.ci_window_um", kMicro, cfg.solver.ci_window);
  r.number("solver.tol", 1.0, cfg.solver.tol);
  double n;
  if (r.number("solver.max_sweeps", 1.0, n))
    cfg.solver.max_sweeps = static_cast<int>(n);
  if (r.number("solver.max_nodes", 1.0, n))
    cfg.solver.max_nodes = static_cast<std::size_t>(n);
  r.boolean("solver.newton_fallback", cfg.solver.newton_fallback);

  if (r.number("wave.samples", 1.0, n))
    cfg.wave.samples = static_cast<std::size_t>(n);
  r.number("wave.span_mm", kMilli, cfg.wave.span);

  r.number("pillar.diameter_nm", kNano, cfg.pillar.diameter);
  r.number("pillar.height_um", kMicro, cfg.pillar.height);
  std::string contact;
  if (r.string("pillar.contact", contact)) {
    if (contact == "on-top")
      cfg.pillar.contact = ContactMode::kOnTop;
    else if (contact == "on-side")
      cfg.pillar.contact = ContactMode::kOnSide;
    else
      throw ConfigError("pillar.contact: expected on-top or on-side");
  }
  r.number("pillar.nv_depth_nm", kNano, cfg.pillar.nv_depth);
  r.number("pillar.nv_depth_side_nm", kNano, cfg.pillar.nv_depth_side);
  r.number("pillar.eps_diamond", 1.0, cfg.pillar.eps_diamond);
  r.number("pillar.E_m_mVpm", kMVPerM, cfg.pillar.E_m);
  r.boolean("pillar.E_m_from_model", cfg.pillar.E_m_from_model);
  r.number("pillar.grid_nm", kNano, cfg.pillar.grid);
  r.number("pillar.b_at_nv_T", 1.0, cfg.pillar.b_at_nv);

  r.number("sensor.e_threshold_mVpm", kMVPerM, cfg.sensor.e_threshold);
  r.number("sensor.b_threshold_T", 1.0, cfg.sensor.b_threshold);
  r.number("sensor.integration_time_ms", kMilli, cfg.sensor.integration_time);
  r.number("sensor.collection_gain", 1.0, cfg.sensor.collection_gain);
  r.number("sensor.sensitivity_exponent", 1.0,
           cfg.sensor.sensitivity_exponent);

  r.reject_leftovers();
  finalize_config(cfg, v_na_overridden, v_k_overridden);
  return cfg;
}

/// Resolve the config path: explicit argument, else AXONFIELD_CONFIG, else
/// empty (meaning: built-in defaults).
inline std::string resolve_config_path(const std::string& cli_arg) {
  if (!cli_arg.empty()) return cli_arg;
  const char* env = std::getenv("AXONFIELD_CONFIG");
  return env ? std::string(env) : std::string();
}

}  // namespace axonfield

#endif  // AXONFIELD_CONFIG_IO_HPP
