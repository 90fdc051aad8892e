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

#ifndef AXONFIELD_HH_HPP
#define AXONFIELD_HH_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "axonfield/params.hpp"

namespace axonfield {

struct GatingState {
  double m = 0.0, h = 0.0, n = 0.0;
};

/// Voltage-dependent channel rates, 1/ms, with V in mV.
struct RateConstants {
  double alpha_m, beta_m, alpha_h, beta_h, alpha_n, beta_n;
};

namespace detail {
// y / (1 - exp(-y)), stable across the removable singularity at y = 0.
inline double expm1_ratio(double y) {
  if (std::abs(y) < 1e-7) return 1.0 + 0.5 * y + y * y / 12.0;
  return y / -std::expm1(-y);
}
}  // namespace detail

/// The six rate expressions fitted for a mammalian axon at 37 C. The
/// removable singularities at V = -30 (alpha_m) and V = -34 (alpha_n) are
/// evaluated by series expansion.
inline RateConstants rate_constants(double v_mV) {
  RateConstants r;
  r.alpha_m = detail::expm1_ratio((v_mV + 30.0) / 10.0);
  r.beta_m = 4.0 * std::exp(-(v_mV + 55.0) / 18.0);
  r.alpha_n = 0.1 * detail::expm1_ratio((v_mV + 34.0) / 10.0);
  r.beta_n = 0.125 * std::exp(-(v_mV + 44.0) / 80.0);
  r.alpha_h = 0.07 * std::exp(-(v_mV + 44.0) / 20.0);
  r.beta_h = 1.0 / (1.0 + std::exp(-(v_mV + 14.0) / 10.0));
  return r;
}

/// Steady-state gating x_inf = alpha_x / (alpha_x + beta_x).
inline GatingState steady_gating(double v_mV) {
  RateConstants r = rate_constants(v_mV);
  return {r.alpha_m / (r.alpha_m + r.beta_m),
          r.alpha_h / (r.alpha_h + r.beta_h),
          r.alpha_n / (r.alpha_n + r.beta_n)};
}

struct IonicCurrents {
  double I_Na = 0.0, I_K = 0.0, I_ion = 0.0;  // A/m^2, outward positive
};

inline IonicCurrents ionic_current(double v, const GatingState& g,
                                   const HHParams& p) {
  IonicCurrents c;
  c.I_Na = (p.g_Na * g.m * g.m * g.m * g.h + p.g_NaL) * (v - p.V_Na);
  c.I_K = (p.g_K * g.n * g.n * g.n * g.n + p.g_KL) * (v - p.V_K);
  c.I_ion = c.I_Na + c.I_K;
  return c;
}

struct HHTimeSeries {
  double dt = 0.0;            // s, uniform
  std::vector<double> t;      // s
  std::vector<double> V;      // V
  std::vector<GatingState> gating;
  std::vector<double> I_r;    // total radial ionic current, A/m^2
  std::vector<double> I_Na, I_K;
};

/// Fixed-step classical Runge-Kutta integration of the four-variable
/// membrane system, initialized at (V_rest, steady_gating(V_rest)).
/// I_r(t) = I_Na(t) + I_K(t). Throws NumericalError with the failure time
/// if the state stops being finite.
inline HHTimeSeries integrate_hh(const HHParams& p, double t_end, double dt) {
  if (!(dt > 0.0) || dt > 1e-6)
    throw ConfigError("integrate_hh: dt must satisfy 0 < dt <= 1 us");
  if (t_end < p.stimulus.onset + p.stimulus.duration + 20e-3)
    throw ConfigError("integrate_hh: t_end must cover the stimulus plus 20 ms");

  const double i_rest =
      p.balance_rest
          ? ionic_current(p.V_rest, steady_gating(p.V_rest * 1e3), p).I_ion
          : 0.0;
  auto stim = [&p](double t) {
    return (t >= p.stimulus.onset && t < p.stimulus.onset + p.stimulus.duration)
               ? p.stimulus.amplitude
               : 0.0;
  };
  struct State {
    double v, m, h, n;
  };
  // The rectangular stimulus is sampled once per step at the midpoint and
  // held constant across the stages; with pulse edges aligned to step
  // boundaries this keeps the full order of the scheme.
  auto deriv = [&](double stim_now, const State& s) -> State {
    RateConstants r = rate_constants(s.v * 1e3);
    IonicCurrents c = ionic_current(s.v, {s.m, s.h, s.n}, p);
    const double per_s = p.phi * 1e3;  // rates are per ms
    return {(stim_now - (c.I_ion - i_rest)) / p.C_m,
            per_s * (r.alpha_m * (1.0 - s.m) - r.beta_m * s.m),
            per_s * (r.alpha_h * (1.0 - s.h) - r.beta_h * s.h),
            per_s * (r.alpha_n * (1.0 - s.n) - r.beta_n * s.n)};
  };

  const std::size_t steps = static_cast<std::size_t>(std::llround(t_end / dt));
  HHTimeSeries out;
  out.dt = dt;
  out.t.reserve(steps + 1);
  out.V.reserve(steps + 1);
  out.gating.reserve(steps + 1);
  out.I_r.reserve(steps + 1);
  out.I_Na.reserve(steps + 1);
  out.I_K.reserve(steps + 1);

  GatingState g0 = steady_gating(p.V_rest * 1e3);
  State s{p.V_rest, g0.m, g0.h, g0.n};
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = k * dt;
    IonicCurrents c = ionic_current(s.v, {s.m, s.h, s.n}, p);
    if (!std::isfinite(s.v) || !std::isfinite(s.m) || !std::isfinite(s.h) ||
        !std::isfinite(s.n))
      throw NumericalError("integrate_hh: non-finite state at t = " +
                           std::to_string(t) + " s");
    out.t.push_back(t);
    out.V.push_back(s.v);
    out.gating.push_back({s.m, s.h, s.n});
    out.I_r.push_back(c.I_ion);
    out.I_Na.push_back(c.I_Na);
    out.I_K.push_back(c.I_K);
    if (k == steps) break;

    const double stim_now = stim(t + 0.5 * dt);
    State k1 = deriv(stim_now, s);
    State s2{s.v + 0.5 * dt * k1.v, s.m + 0.5 * dt * k1.m,
             s.h + 0.5 * dt * k1.h, s.n + 0.5 * dt * k1.n};
    State k2 = deriv(stim_now, s2);
    State s3{s.v + 0.5 * dt * k2.v, s.m + 0.5 * dt * k2.m,
             s.h + 0.5 * dt * k2.h, s.n + 0.5 * dt * k2.n};
    State k3 = deriv(stim_now, s3);
    State s4{s.v + dt * k3.v, s.m + dt * k3.m, s.h + dt * k3.h,
             s.n + dt * k3.n};
    State k4 = deriv(stim_now, s4);
    s.v += dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    s.m += dt / 6.0 * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m);
    s.h += dt / 6.0 * (k1.h + 2.0 * k2.h + 2.0 * k3.h + k4.h);
    s.n += dt / 6.0 * (k1.n + 2.0 * k2.n + 2.0 * k3.n + k4.n);
  }
  return out;
}

}  // namespace axonfield

#endif  // AXONFIELD_HH_HPP
