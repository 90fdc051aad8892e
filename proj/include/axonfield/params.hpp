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

#ifndef AXONFIELD_PARAMS_HPP
#define AXONFIELD_PARAMS_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "axonfield/constants.hpp"

namespace axonfield {

// All quantities are SI unless the name says otherwise. The config file
// accepts the customary electrophysiology units (mmol/L, mS/cm^2, uF/cm^2,
// mV, nm, um); conversion happens at load time (config_io.hpp).

struct IonSpecies {
  std::string name;
  int valence = 0;          // signed z_i
  double diffusion = 0.0;   // D_i, m^2/s
  double conc_internal = 0.0;  // mol/m^3
  double conc_external = 0.0;  // mol/m^3

  void validate() const {
    if (!(diffusion > 0.0))
      throw ConfigError("species." + name + ".diffusion: must be > 0");
    if (conc_internal < 0.0 || conc_external < 0.0)
      throw ConfigError("species." + name + ": concentrations must be >= 0");
    if (valence == 0)
      throw ConfigError("species." + name + ".valence: must be nonzero");
  }
};

/// One of the two charge carriers the solver actually transports. The bulk
/// concentration is the sum over the constituent species, the diffusion
/// coefficient their arithmetic mean.
struct LumpedSpecies {
  double conc_bulk = 0.0;  // external bulk, mol/m^3
  double diffusion = 0.0;  // averaged, m^2/s
};

struct ElectrolyteModel {
  std::vector<IonSpecies> species;  // Na+, K+, Cl-, OA-
  double temperature = 310.0;       // K
  double eps_r_water = 80.0 * 8.854e-12;  // absolute permittivity, C/(V m)
  LumpedSpecies lumped_pos, lumped_neg;

  void refresh_lumped() {
    lumped_pos = LumpedSpecies{};
    lumped_neg = LumpedSpecies{};
    int n_pos = 0, n_neg = 0;
    for (const auto& s : species) {
      if (s.valence > 0) {
        lumped_pos.conc_bulk += s.conc_external;
        lumped_pos.diffusion += s.diffusion;
        ++n_pos;
      } else {
        lumped_neg.conc_bulk += s.conc_external;
        lumped_neg.diffusion += s.diffusion;
        ++n_neg;
      }
    }
    if (n_pos > 0) lumped_pos.diffusion /= n_pos;
    if (n_neg > 0) lumped_neg.diffusion /= n_neg;
  }

  void validate() const {
    if (!(temperature > 0.0))
      throw ConfigError("electrolyte.temperature: must be > 0");
    if (!(eps_r_water > 0.0))
      throw ConfigError("electrolyte.eps_r_water: must be > 0");
    double net = 0.0, gross = 0.0;
    for (const auto& s : species) {
      s.validate();
      if (std::abs(s.valence) != 1)
        throw ConfigError("species." + s.name +
                          ".valence: model is monovalent, |z| must be 1");
      net += s.valence * s.conc_external;
      gross += std::abs(s.valence) * s.conc_external;
    }
    if (gross > 0.0 && std::abs(net) > 1e-9 * gross)
      throw ConfigError(
          "species.*.conc_external: external bulk must be charge neutral "
          "(sum z_i*c_e,i = 0 to relative 1e-9)");
  }
};

struct GeometryParams {
  double axon_radius = 500e-9;   // R, m
  double axial_length = 2e-3;    // L, m
  double outer_radius = 1.5e-6;  // exterior domain radius, m
  double debye_band = 10e-9;     // fine-mesh band width, m

  void validate() const {
    if (!(debye_band > 0.0))
      throw ConfigError("geometry.debye_band: must be > 0");
    if (!(debye_band < axon_radius))
      throw ConfigError("geometry.debye_band: must be < axon_radius");
    if (!(axon_radius < outer_radius))
      throw ConfigError("geometry.axon_radius: must be < outer_radius");
    if (!(axial_length > 0.0))
      throw ConfigError("geometry.axial_length: must be > 0");
  }
};

struct Stimulus {
  double amplitude = 0.5;  // depolarizing current density, A/m^2
  double onset = 1e-3;     // s
  double duration = 1e-3;  // s
};

struct HHParams {
  double g_Na = 1000.0;   // S/m^2
  double g_NaL = 0.175;   // S/m^2
  double g_K = 400.0;     // S/m^2
  double g_KL = 0.5;      // S/m^2
  double phi = 3.0;       // gating rate scale
  double C_m = 0.01;      // F/m^2
  double V_rest = -68e-3; // V
  double V_Na = 0.0;      // V, filled from the Nernst relation at load
  double V_K = 0.0;       // V
  Stimulus stimulus;
  double velocity = 0.6;  // conduction speed v, m/s
  // Fold a constant holding current into I_int so that (V_rest, x_inf(V_rest))
  // is an exact fixed point of the ODE system. The Na/K channel set alone
  // leaves a small net inward current at rest (no pump term), which would
  // otherwise make the hold drift by ~1 mV/ms.
  bool balance_rest = true;
  // The afterhyperpolarization relaxes with a ~13 ms time constant; the
  // horizon must cover it so the traveling-wave tails settle to rest.
  double t_end = 120e-3;  // s, default integration horizon
  double dt = 0.5e-6;     // s, default step

  void validate() const {
    if (g_Na < 0 || g_NaL < 0 || g_K < 0 || g_KL < 0)
      throw ConfigError("hh.g_*: conductances must be >= 0");
    if (!(C_m > 0)) throw ConfigError("hh.C_m: must be > 0");
    if (!(velocity > 0)) throw ConfigError("hh.velocity: must be > 0");
    if (!(phi > 0)) throw ConfigError("hh.phi: must be > 0");
    if (!(dt > 0) || dt > 1e-6)
      throw ConfigError("hh.dt: must satisfy 0 < dt <= 1 us");
    if (stimulus.duration < 0 || stimulus.onset < 0)
      throw ConfigError("hh.stim_*: onset and duration must be >= 0");
    if (t_end < stimulus.onset + stimulus.duration + 20e-3)
      throw ConfigError("hh.t_end: must cover the stimulus plus >= 20 ms");
  }
};

/// How bc.q_i0 is determined when not given as an explicit number.
enum class QInternalMode {
  kCalibrated,  // chosen so the resting membrane dV/dr hits bc.resting_Er
  kFormula,     // capacitive membrane charge + net internal bulk charge
  kValue,       // explicit bc.q_i0 from the config
};

struct MembraneBCParams {
  double gamma = 1.0;  // radial-uniformity deviation factor
  double eta = 1.0;    // quasi-Ohm's-law deviation factor
  QInternalMode q_i0_mode = QInternalMode::kCalibrated;
  double q_i0 = 0.0;       // resting internal charge per unit length, C/m
  double resting_Er = -1.4e5;  // calibration target E_r at rest, V/m
  double sigma_i0 = 0.0;   // internal conductivity, S/m (0 = derive)

  void validate() const {
    if (!(gamma > 0)) throw ConfigError("bc.gamma: must be > 0");
    if (!(eta > 0)) throw ConfigError("bc.eta: must be > 0");
    if (!(sigma_i0 > 0)) throw ConfigError("bc.sigma_i0: must be > 0");
  }
};

struct SolverParams {
  double dr_fine = 0.1e-9;    // radial spacing inside the Debye band, m
  double grade_factor = 1.25; // geometric growth outside the band
  double dr_max = 50e-9;      // spacing cap, m
  double dxi = 0.8e-6;        // axial spacing on the reduced window, m
  double dxi_full = 2e-6;     // axial spacing on the full window, m
  double window = 2e-3;       // axial window width, m (--ci shrinks this)
  double ci_window = 200e-6;  // reduced window, m
  double tol = 1e-8;          // relative nonlinear residual
  int max_sweeps = 500;
  std::size_t max_nodes = 500000;
  bool newton_fallback = true;

  void validate() const {
    if (!(dr_fine > 0) || dr_fine > 0.2e-9 * (1.0 + 1e-9))
      throw ConfigError("solver.dr_fine: must satisfy 0 < dr_fine <= 0.2 nm");
    if (!(grade_factor > 1.0) || grade_factor > 1.3 * (1.0 + 1e-9))
      throw ConfigError("solver.grade_factor: must be in (1, 1.3]");
    if (!(dxi > 0)) throw ConfigError("solver.dxi: must be > 0");
    if (!(window > 0)) throw ConfigError("solver.window: must be > 0");
    if (!(tol > 0)) throw ConfigError("solver.tol: must be > 0");
    if (max_sweeps < 1) throw ConfigError("solver.max_sweeps: must be >= 1");
  }
};

struct WaveParams {
  std::size_t samples = 4096;
  double span = 2e-3;  // m, widened automatically until the tails are flat
};

enum class ContactMode { kOnTop, kOnSide };

struct PillarGeometry {
  double diameter = 200e-9;     // m
  double height = 1e-6;         // m
  ContactMode contact = ContactMode::kOnTop;
  double nv_depth = 5e-9;       // m, along the evaluation line (on-top)
  double nv_depth_side = 100e-9;  // m, on-side evaluation distance
  double eps_diamond = 6.0;     // relative permittivity
  double E_m = 4.54e7;          // membrane field inside diamond, V/m
  bool E_m_from_model = false;  // recompute E_m from the membrane BC formula
  double grid = 2e-9;           // on-side grid spacing near the patch, m
  double b_at_nv = 0.95e-9;     // magnetic field at the NV, T (standalone runs)

  double contact_area() const {
    double a = 0.5 * diameter;
    return std::numbers::pi * a * a;  // same value for both contact modes
  }
  double side_patch_side() const { return std::sqrt(contact_area()); }

  void validate() const {
    if (!(diameter > 0)) throw ConfigError("pillar.diameter: must be > 0");
    if (!(height > 0)) throw ConfigError("pillar.height: must be > 0");
    if (!(nv_depth > 0)) throw ConfigError("pillar.nv_depth: must be > 0");
    if (!(nv_depth_side > 0))
      throw ConfigError("pillar.nv_depth_side: must be > 0");
    if (!(eps_diamond > 0)) throw ConfigError("pillar.eps_diamond: must be > 0");
    if (!(grid > 0)) throw ConfigError("pillar.grid: must be > 0");
  }
};

struct SensorSpec {
  double e_threshold = 2.8e6;     // minimum detectable E at reference time, V/m
  double b_threshold = 1.26e-6;   // T
  double integration_time = 1e-3; // s
  double collection_gain = 5.0;   // photon-collection enhancement
  double sensitivity_exponent = 0.5;

  void validate() const {
    if (!(e_threshold > 0) || !(b_threshold > 0))
      throw ConfigError("sensor.*_threshold: must be > 0");
    if (collection_gain < 1.0)
      throw ConfigError("sensor.collection_gain: must be >= 1");
    if (!(integration_time > 0))
      throw ConfigError("sensor.integration_time: must be > 0");
  }
};

struct ModelConfig {
  PhysicalConstants constants;
  ElectrolyteModel electrolyte;
  GeometryParams geometry;
  HHParams hh;
  MembraneBCParams bc;
  SolverParams solver;
  WaveParams wave;
  PillarGeometry pillar;
  SensorSpec sensor;
};

/// Equilibrium transmembrane voltage of one species:
/// (R_gas*T)/(z*F) * ln(c_external / c_internal).
inline double nernst_potential(const IonSpecies& s, double temperature,
                               const PhysicalConstants& k = {}) {
  if (s.valence == 0)
    throw ConfigError("nernst_potential: zero valence for species " + s.name);
  if (!(s.conc_internal > 0.0) || !(s.conc_external > 0.0))
    throw ConfigError("nernst_potential: non-positive concentration for " +
                      s.name);
  return k.R_gas * temperature / (s.valence * k.F) *
         std::log(s.conc_external / s.conc_internal);
}

/// Einstein-relation mobility |z| e D / (k_b T), m^2/(V s).
inline double mobility(const IonSpecies& s, double temperature,
                       const PhysicalConstants& k = {}) {
  if (!(temperature > 0.0))
    throw ConfigError("mobility: temperature must be > 0");
  return std::abs(s.valence) * k.e * s.diffusion / (k.k_b * temperature);
}

/// Resting internal charge per unit length: capacitively stored membrane
/// charge plus the net internal bulk ionic charge.
///   q_i0 = 2 pi R C_m V_rest + pi R^2 F sum_i z_i c_int,i
inline double resting_internal_charge(const ModelConfig& cfg) {
  const double R = cfg.geometry.axon_radius;
  double bulk = 0.0;
  for (const auto& s : cfg.electrolyte.species)
    bulk += s.valence * s.conc_internal;
  return 2.0 * std::numbers::pi * R * cfg.hh.C_m * cfg.hh.V_rest +
         std::numbers::pi * R * R * cfg.constants.F * bulk;
}

/// Total internal conductivity sigma_i0 = F^2/(R_gas T) sum z_i^2 D_i c_int,i.
inline double internal_conductivity(const ModelConfig& cfg) {
  const auto& k = cfg.constants;
  double sum = 0.0;
  for (const auto& s : cfg.electrolyte.species)
    sum += double(s.valence) * s.valence * s.diffusion * s.conc_internal;
  return k.F * k.F / (k.R_gas * cfg.electrolyte.temperature) * sum;
}

/// q_i0 that reproduces the target resting membrane field through the
/// leading boundary-condition term dV/dr = -q_i0 / (2 pi R eps_r).
inline double calibrated_internal_charge(const ModelConfig& cfg) {
  const double dVdr_target = -cfg.bc.resting_Er;
  return -2.0 * std::numbers::pi * cfg.geometry.axon_radius *
         cfg.electrolyte.eps_r_water * dVdr_target;
}

/// Resolve derived members (lumped carriers, Nernst potentials, sigma_i0,
/// q_i0) and check every invariant. Explicit config overrides win.
inline void finalize_config(ModelConfig& cfg, bool v_na_overridden = false,
                            bool v_k_overridden = false) {
  cfg.constants.validate();
  cfg.electrolyte.refresh_lumped();
  cfg.electrolyte.validate();
  cfg.geometry.validate();

  const IonSpecies* na = nullptr;
  const IonSpecies* kk = nullptr;
  for (const auto& s : cfg.electrolyte.species) {
    if (s.name == "Na") na = &s;
    if (s.name == "K") kk = &s;
  }
  if (!v_na_overridden) {
    if (!na) throw ConfigError("species.Na: required to derive hh.V_Na");
    cfg.hh.V_Na = nernst_potential(*na, cfg.electrolyte.temperature,
                                   cfg.constants);
  }
  if (!v_k_overridden) {
    if (!kk) throw ConfigError("species.K: required to derive hh.V_K");
    cfg.hh.V_K = nernst_potential(*kk, cfg.electrolyte.temperature,
                                  cfg.constants);
  }
  cfg.hh.validate();

  if (cfg.bc.sigma_i0 <= 0.0) cfg.bc.sigma_i0 = internal_conductivity(cfg);
  switch (cfg.bc.q_i0_mode) {
    case QInternalMode::kCalibrated:
      cfg.bc.q_i0 = calibrated_internal_charge(cfg);
      break;
    case QInternalMode::kFormula:
      cfg.bc.q_i0 = resting_internal_charge(cfg);
      break;
    case QInternalMode::kValue:
      break;
  }
  cfg.bc.validate();
  cfg.solver.validate();
  cfg.pillar.validate();
  cfg.sensor.validate();
}

/// The stock four-species model and its geometry/channel parameters.
inline ModelConfig default_config() {
  ModelConfig cfg;
  cfg.electrolyte.species = {
      {"Na", +1, 1.334e-9, 12.0, 145.0},
      {"K", +1, 1.957e-9, 155.0, 4.0},
      {"Cl", -1, 2.032e-9, 4.2, 123.0},
      {"OA", -1, 2.00e-9, 162.802, 26.0},
  };
  finalize_config(cfg);
  return cfg;
}

}  // namespace axonfield

#endif  // AXONFIELD_PARAMS_HPP
