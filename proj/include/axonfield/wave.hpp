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

#ifndef AXONFIELD_WAVE_HPP
#define AXONFIELD_WAVE_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "axonfield/hh.hpp"
#include "axonfield/params.hpp"

namespace axonfield {

/// A completed action potential expressed in the co-moving coordinate
/// xi = z - v t, sampled on a uniform ascending grid with the voltage peak
/// at xi = 0 and resting tails at both ends.
struct MembraneWave {
  double velocity = 0.0;       // m/s
  double V_rest = 0.0;         // V
  std::vector<double> xi;      // m, ascending
  std::vector<double> V;       // V
  std::vector<GatingState> gating;
  std::vector<double> I_r;     // A/m^2
  std::vector<double> dIr_dxi; // A/m^3
  std::vector<double> E_m;     // dV/dr at r = R, V/m
  std::vector<double> B_m;     // T
  std::vector<double> flux_pos;  // mol/(m^2 s), positive = into the exterior
  std::vector<double> flux_neg;  // identically zero

  /// Linear interpolation with constant extension beyond the grid.
  double interp(const std::vector<double>& f, double x) const {
    if (x <= xi.front()) return f.front();
    if (x >= xi.back()) return f.back();
    auto it = std::upper_bound(xi.begin(), xi.end(), x);
    std::size_t j = static_cast<std::size_t>(it - xi.begin());
    double w = (x - xi[j - 1]) / (xi[j] - xi[j - 1]);
    return (1.0 - w) * f[j - 1] + w * f[j];
  }
};

/// Map a time series onto the traveling frame: xi_j = -v (t_j - t_peak),
/// resampled onto a uniform grid spanning [-span/2, span/2]. The span is
/// widened (up to the sampled data extent) until both voltage tails sit
/// within 0.5 mV of rest.
///
/// i_r_ref is subtracted from the ionic current before resampling. The
/// traveling-frame relation dV/dxi = I_r/(v C) forces I_r -> 0 in the
/// resting tails, so a rest-balanced integration passes its holding
/// current here.
inline MembraneWave to_traveling_wave(const HHTimeSeries& series, double v,
                                      double v_rest,
                                      std::size_t n_samples = 4096,
                                      double span = 2e-3,
                                      double i_r_ref = 0.0) {
  if (!(v > 0.0)) throw ConfigError("to_traveling_wave: velocity must be > 0");
  if (series.V.size() < 4 || n_samples < 4)
    throw ConfigError("to_traveling_wave: not enough samples");

  const std::size_t n_t = series.V.size();
  double v_max = -1e300;
  for (double x : series.V) v_max = std::max(v_max, x);
  if (v_max < -0.02)
    throw NumericalError(
        "to_traveling_wave: no action potential found (V never exceeds "
        "-20 mV)");
  // Global maximum; a tied plateau resolves to its central sample so the
  // alignment lands at the smallest |xi|.
  std::vector<std::size_t> peaks;
  for (std::size_t k = 0; k < n_t; ++k)
    if (series.V[k] == v_max) peaks.push_back(k);
  const std::size_t p = peaks[peaks.size() / 2];
  const double t_peak = series.t[p];

  // xi(t) = -v (t - t_peak): descending in t. Tail flatness, widening the
  // window as needed.
  const double xi_hi_data = v * t_peak;                      // at t = 0
  const double xi_lo_data = -v * (series.t.back() - t_peak); // at t_end
  auto value_at = [&](double x) {
    double t = t_peak - x / v;
    if (t <= 0.0) return series.V.front();
    if (t >= series.t.back()) return series.V.back();
    double u = t / series.dt;
    std::size_t j = std::min(static_cast<std::size_t>(u), n_t - 2);
    double w = u - j;
    return (1.0 - w) * series.V[j] + w * series.V[j + 1];
  };
  const double flat = 0.5e-3;
  const double span_req = span;
  const double span_cap = 2.0 * std::max(xi_hi_data, -xi_lo_data);
  while ((std::abs(value_at(-0.5 * span) - v_rest) >= flat ||
          std::abs(value_at(0.5 * span) - v_rest) >= flat) &&
         span < span_cap)
    span = std::min(1.5 * span, span_cap);
  if (std::abs(value_at(-0.5 * span) - v_rest) >= flat ||
      std::abs(value_at(0.5 * span) - v_rest) >= flat)
    throw NumericalError(
        "to_traveling_wave: voltage tails have not settled to rest; "
        "integrate longer or check the stimulus");
  // Widening the span keeps the requested sample density so the AP core
  // stays resolved.
  if (span > span_req) {
    double density = span_req / static_cast<double>(n_samples - 1);
    n_samples = std::min<std::size_t>(
        static_cast<std::size_t>(std::ceil(span / density)) + 1, 1u << 21);
  }

  MembraneWave w;
  w.velocity = v;
  w.V_rest = v_rest;
  w.xi.resize(n_samples);
  w.V.resize(n_samples);
  w.gating.resize(n_samples);
  w.I_r.resize(n_samples);
  w.dIr_dxi.assign(n_samples, 0.0);
  const double dxi = span / (n_samples - 1);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double x = -0.5 * span + i * dxi;
    w.xi[i] = x;
    double t = t_peak - x / v;
    if (t <= 0.0) t = 0.0;
    if (t >= series.t.back()) t = series.t.back();
    double u = t / series.dt;
    std::size_t j = std::min(static_cast<std::size_t>(u), n_t - 2);
    double f = u - j;
    w.V[i] = (1.0 - f) * series.V[j] + f * series.V[j + 1];
    w.I_r[i] = (1.0 - f) * series.I_r[j] + f * series.I_r[j + 1] - i_r_ref;
    w.gating[i] = {
        (1.0 - f) * series.gating[j].m + f * series.gating[j + 1].m,
        (1.0 - f) * series.gating[j].h + f * series.gating[j + 1].h,
        (1.0 - f) * series.gating[j].n + f * series.gating[j + 1].n};
  }
  for (std::size_t i = 1; i + 1 < n_samples; ++i)
    w.dIr_dxi[i] = (w.I_r[i + 1] - w.I_r[i - 1]) / (2.0 * dxi);
  w.dIr_dxi[0] = (w.I_r[1] - w.I_r[0]) / dxi;
  w.dIr_dxi[n_samples - 1] = (w.I_r[n_samples - 1] - w.I_r[n_samples - 2]) / dxi;
  return w;
}

/// Membrane Neumann profile for the potential,
///   dV/dr|_R = -q_i0/(2 pi R eps)
///            + [eta pi R^2 sigma_i0 v^-2 C^-1 I_r
///               + 2 pi R C (V_rest - V)] / (2 pi R eps)
///            - (gamma R / (2 C v)) dI_r/dxi.
inline std::vector<double> membrane_E_profile(const MembraneWave& w,
                                              const MembraneBCParams& bc,
                                              const HHParams& p,
                                              const GeometryParams& geom,
                                              double eps_abs) {
  const double R = geom.axon_radius;
  const double two_pi_R_eps = 2.0 * std::numbers::pi * R * eps_abs;
  const double c_rest = -bc.q_i0 / two_pi_R_eps;
  const double c_ir = bc.eta * std::numbers::pi * R * R * bc.sigma_i0 /
                      (p.velocity * p.velocity * p.C_m * two_pi_R_eps);
  const double c_v = p.C_m / eps_abs;
  const double c_dir = bc.gamma * R / (2.0 * p.C_m * p.velocity);
  std::vector<double> e(w.xi.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    e[i] = c_rest + c_ir * w.I_r[i] + c_v * (p.V_rest - w.V[i]) -
           c_dir * w.dIr_dxi[i];
  return e;
}

/// Membrane magnetic field B|_R = -(mu0/2) eta R sigma_i0 I_r / (C v).
inline std::vector<double> membrane_B_profile(const MembraneWave& w,
                                              const MembraneBCParams& bc,
                                              const HHParams& p,
                                              const GeometryParams& geom,
                                              double mu0) {
  const double c_b = -0.5 * mu0 * bc.eta * geom.axon_radius * bc.sigma_i0 /
                     (p.C_m * p.velocity);
  std::vector<double> b(w.xi.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = c_b * w.I_r[i];
  return b;
}

/// Positive-carrier molar flux through the membrane, I_r/F; the negative
/// carrier does not cross the membrane.
inline std::vector<double> membrane_flux_profile(const MembraneWave& w,
                                                 double faraday) {
  std::vector<double> f(w.xi.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = w.I_r[i] / faraday;
  return f;
}

/// Full pipeline from a time series to a boundary-ready wave.
inline MembraneWave build_membrane_wave(const ModelConfig& cfg,
                                        const HHTimeSeries& series) {
  const double i_r_ref =
      cfg.hh.balance_rest
          ? ionic_current(cfg.hh.V_rest, steady_gating(cfg.hh.V_rest * 1e3),
                          cfg.hh)
                .I_ion
          : 0.0;
  MembraneWave w = to_traveling_wave(series, cfg.hh.velocity, cfg.hh.V_rest,
                                     cfg.wave.samples, cfg.wave.span, i_r_ref);
  w.E_m = membrane_E_profile(w, cfg.bc, cfg.hh, cfg.geometry,
                             cfg.electrolyte.eps_r_water);
  w.B_m = membrane_B_profile(w, cfg.bc, cfg.hh, cfg.geometry,
                             cfg.constants.mu0);
  w.flux_pos = membrane_flux_profile(w, cfg.constants.F);
  w.flux_neg.assign(w.xi.size(), 0.0);
  return w;
}

/// A synthetic resting wave (V = V_rest, I_r = 0 everywhere), used for
/// equilibrium studies.
inline MembraneWave resting_wave(const ModelConfig& cfg,
                                 std::size_t n_samples = 64) {
  MembraneWave w;
  w.velocity = cfg.hh.velocity;
  w.V_rest = cfg.hh.V_rest;
  w.xi.resize(n_samples);
  const double span = cfg.wave.span;
  for (std::size_t i = 0; i < n_samples; ++i)
    w.xi[i] = -0.5 * span + span * i / (n_samples - 1);
  w.V.assign(n_samples, cfg.hh.V_rest);
  w.gating.assign(n_samples, steady_gating(cfg.hh.V_rest * 1e3));
  w.I_r.assign(n_samples, 0.0);
  w.dIr_dxi.assign(n_samples, 0.0);
  w.E_m = membrane_E_profile(w, cfg.bc, cfg.hh, cfg.geometry,
                             cfg.electrolyte.eps_r_water);
  w.B_m = membrane_B_profile(w, cfg.bc, cfg.hh, cfg.geometry,
                             cfg.constants.mu0);
  w.flux_pos = membrane_flux_profile(w, cfg.constants.F);
  w.flux_neg.assign(n_samples, 0.0);
  return w;
}

}  // namespace axonfield

#endif  // AXONFIELD_WAVE_HPP
