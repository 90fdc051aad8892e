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

#ifndef AXONFIELD_REPORT_HPP
#define AXONFIELD_REPORT_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "axonfield/params.hpp"

namespace axonfield {

/// FNV-1a 64-bit content hash, hex encoded.
inline std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot hash missing file: " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    std::streamsize got = in.gcount();
    for (std::streamsize k = 0; k < got; ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 1099511628211ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(h));
  return hex;
}

inline nlohmann::json config_snapshot(const ModelConfig& cfg) {
  nlohmann::json j;
  j["constants"] = {{"e", cfg.constants.e},
                    {"k_b", cfg.constants.k_b},
                    {"N_A", cfg.constants.N_A},
                    {"F", cfg.constants.F},
                    {"R_gas", cfg.constants.R_gas},
                    {"mu0", cfg.constants.mu0},
                    {"eps0", cfg.constants.eps0}};
  for (const auto& s : cfg.electrolyte.species)
    j["species"][s.name] = {{"valence", s.valence},
                            {"diffusion_m2s", s.diffusion},
                            {"conc_internal_molm3", s.conc_internal},
                            {"conc_external_molm3", s.conc_external}};
  j["electrolyte"] = {{"temperature_K", cfg.electrolyte.temperature},
                      {"eps_r_water_CVm", cfg.electrolyte.eps_r_water},
                      {"c_b_pos_molm3", cfg.electrolyte.lumped_pos.conc_bulk},
                      {"c_b_neg_molm3", cfg.electrolyte.lumped_neg.conc_bulk},
                      {"D_pos_m2s", cfg.electrolyte.lumped_pos.diffusion},
                      {"D_neg_m2s", cfg.electrolyte.lumped_neg.diffusion}};
  j["geometry"] = {{"axon_radius_m", cfg.geometry.axon_radius},
                   {"axial_length_m", cfg.geometry.axial_length},
                   {"outer_radius_m", cfg.geometry.outer_radius},
                   {"debye_band_m", cfg.geometry.debye_band}};
  j["hh"] = {{"g_Na_Spm2", cfg.hh.g_Na},
             {"g_NaL_Spm2", cfg.hh.g_NaL},
             {"g_K_Spm2", cfg.hh.g_K},
             {"g_KL_Spm2", cfg.hh.g_KL},
             {"phi", cfg.hh.phi},
             {"C_m_Fpm2", cfg.hh.C_m},
             {"V_rest_V", cfg.hh.V_rest},
             {"V_Na_V", cfg.hh.V_Na},
             {"V_K_V", cfg.hh.V_K},
             {"stim_amplitude_Apm2", cfg.hh.stimulus.amplitude},
             {"stim_onset_s", cfg.hh.stimulus.onset},
             {"stim_duration_s", cfg.hh.stimulus.duration},
             {"velocity_mps", cfg.hh.velocity},
             {"balance_rest", cfg.hh.balance_rest},
             {"t_end_s", cfg.hh.t_end},
             {"dt_s", cfg.hh.dt}};
  j["bc"] = {{"gamma", cfg.bc.gamma},
             {"eta", cfg.bc.eta},
             {"q_i0_Cpm", cfg.bc.q_i0},
             {"resting_Er_Vpm", cfg.bc.resting_Er},
             {"sigma_i0_Spm", cfg.bc.sigma_i0}};
  j["solver"] = {{"dr_fine_m", cfg.solver.dr_fine},
                 {"grade_factor", cfg.solver.grade_factor},
                 {"dr_max_m", cfg.solver.dr_max},
                 {"dxi_m", cfg.solver.dxi},
                 {"dxi_full_m", cfg.solver.dxi_full},
                 {"window_m", cfg.solver.window},
                 {"ci_window_m", cfg.solver.ci_window},
                 {"tol", cfg.solver.tol},
                 {"max_sweeps", cfg.solver.max_sweeps}};
  j["wave"] = {{"samples", cfg.wave.samples}, {"span_m", cfg.wave.span}};
  j["pillar"] = {{"diameter_m", cfg.pillar.diameter},
                 {"height_m", cfg.pillar.height},
                 {"contact", cfg.pillar.contact == ContactMode::kOnTop
                                 ? "on-top"
                                 : "on-side"},
                 {"nv_depth_m", cfg.pillar.nv_depth},
                 {"nv_depth_side_m", cfg.pillar.nv_depth_side},
                 {"eps_diamond", cfg.pillar.eps_diamond},
                 {"E_m_Vpm", cfg.pillar.E_m},
                 {"E_m_from_model", cfg.pillar.E_m_from_model},
                 {"grid_m", cfg.pillar.grid},
                 {"b_at_nv_T", cfg.pillar.b_at_nv}};
  j["sensor"] = {{"e_threshold_Vpm", cfg.sensor.e_threshold},
                 {"b_threshold_T", cfg.sensor.b_threshold},
                 {"integration_time_s", cfg.sensor.integration_time},
                 {"collection_gain", cfg.sensor.collection_gain},
                 {"sensitivity_exponent", cfg.sensor.sensitivity_exponent}};
  return j;
}

/// Schema check run before every write; throws on violations.
inline void validate_run_report(const nlohmann::json& j) {
  auto need = [&](const char* key, bool ok) {
    if (!ok)
      throw NumericalError(std::string("run report schema: bad field ") + key);
  };
  need("schema_version", j.contains("schema_version") &&
                             j["schema_version"].is_number_integer());
  need("subcommand", j.contains("subcommand") && j["subcommand"].is_string());
  need("config", j.contains("config") && j["config"].is_object());
  need("timings_s", j.contains("timings_s") && j["timings_s"].is_object());
  need("artifacts", j.contains("artifacts") && j["artifacts"].is_array());
  for (const auto& a : j["artifacts"]) {
    need("artifacts[].path", a.contains("path") && a["path"].is_string());
    need("artifacts[].fnv1a64",
         a.contains("fnv1a64") && a["fnv1a64"].is_string());
    need("artifacts[].bytes",
         a.contains("bytes") && a["bytes"].is_number_integer());
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    need("solver.residual_history", s.contains("residual_history") &&
                                        s["residual_history"].is_array());
    need("solver.iterations",
         s.contains("iterations") && s["iterations"].is_number_integer());
    need("solver.converged",
         s.contains("converged") && s["converged"].is_boolean());
  }
}

}  // namespace axonfield

#endif  // AXONFIELD_REPORT_HPP
