#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "axonfield/config_io.hpp"
#include "axonfield/wave.hpp"

using namespace axonfield;

namespace {

// A synthetic completed AP: Gaussian bump from rest to +32 mV at 10 ms.
HHTimeSeries gaussian_series(double v_rest) {
  HHTimeSeries s;
  s.dt = 1e-6;
  const double t_end = 20e-3;
  const std::size_t n = static_cast<std::size_t>(t_end / s.dt) + 1;
  for (std::size_t k = 0; k < n; ++k) {
    double t = k * s.dt;
    double bump = std::exp(-0.5 * std::pow((t - 10e-3) / 1e-3, 2));
    s.t.push_back(t);
    s.V.push_back(v_rest + 0.1 * bump);
    s.I_r.push_back(-3.0 * bump);
    s.I_Na.push_back(-3.0 * bump);
    s.I_K.push_back(0.0);
    s.gating.push_back({0.1, 0.9, 0.1});
  }
  return s;
}

MembraneWave flat_wave(const ModelConfig& cfg, std::size_t n = 33) {
  return resting_wave(cfg, n);
}

}  // namespace

TEST_CASE("time features map onto xi with the conduction speed") {
  const double v_rest = -68e-3;
  auto s = gaussian_series(v_rest);
  MembraneWave w = to_traveling_wave(s, 1.0, v_rest, 4096, 30e-3);

  // Peak sits at xi = 0.
  std::size_t pk = 0;
  for (std::size_t i = 0; i < w.V.size(); ++i)
    if (w.V[i] > w.V[pk]) pk = i;
  CHECK(std::abs(w.xi[pk]) <= (w.xi[1] - w.xi[0]));

  // 1 ms Gaussian sigma in time -> 1 mm in xi at v = 1 m/s: measure FWHM.
  double half = v_rest + 0.05;
  double lo = 0, hi = 0;
  for (std::size_t i = 1; i < w.V.size(); ++i) {
    if (w.V[i - 1] < half && w.V[i] >= half) lo = w.xi[i];
    if (w.V[i - 1] >= half && w.V[i] < half) hi = w.xi[i];
  }
  const double fwhm = hi - lo;
  CHECK(fwhm == Approx(2.3548e-3).epsilon(0.01));  // 2 sqrt(2 ln 2) sigma
}

TEST_CASE("doubling the speed rescales xi and preserves values") {
  const double v_rest = -68e-3;
  auto s = gaussian_series(v_rest);
  MembraneWave w1 = to_traveling_wave(s, 1.0, v_rest, 2048, 30e-3);
  MembraneWave w2 = to_traveling_wave(s, 2.0, v_rest, 2048, 60e-3);
  for (double x : {-4e-3, -1e-3, 0.0, 0.5e-3, 3e-3}) {
    CHECK(w2.interp(w2.V, 2.0 * x) == Approx(w1.interp(w1.V, x)).margin(1e-6));
    CHECK(w2.interp(w2.I_r, 2.0 * x) ==
          Approx(w1.interp(w1.I_r, x)).margin(1e-4));
  }
}

TEST_CASE("a series without an AP is rejected") {
  HHTimeSeries s;
  s.dt = 1e-6;
  for (std::size_t k = 0; k < 1000; ++k) {
    s.t.push_back(k * s.dt);
    s.V.push_back(-68e-3);
    s.I_r.push_back(0.0);
    s.I_Na.push_back(0.0);
    s.I_K.push_back(0.0);
    s.gating.push_back({});
  }
  CHECK_THROWS_AS(to_traveling_wave(s, 1.0, -68e-3), NumericalError);
}

TEST_CASE("round trip to time reproduces the series", "[slow]") {
  ModelConfig cfg = default_config();
  auto s = integrate_hh(cfg.hh, cfg.hh.t_end, cfg.hh.dt);
  MembraneWave w = build_membrane_wave(cfg, s);

  std::size_t pk = 0;
  for (std::size_t k = 0; k < s.V.size(); ++k)
    if (s.V[k] > s.V[pk]) pk = k;
  const double t_peak = s.t[pk];
  const double v = cfg.hh.velocity;

  double worst = 0.0;
  for (std::size_t k = 0; k < s.V.size(); k += 97) {
    double x = -v * (s.t[k] - t_peak);
    if (x <= w.xi.front() || x >= w.xi.back()) continue;
    worst = std::max(worst, std::abs(w.interp(w.V, x) - s.V[k]));
  }
  CHECK(worst < 0.1e-3);
}

TEST_CASE("resting membrane profiles") {
  ModelConfig cfg = default_config();
  MembraneWave w = flat_wave(cfg);

  SECTION("potential gradient reduces to the charge term") {
    const double expected =
        -cfg.bc.q_i0 / (2.0 * std::numbers::pi * cfg.geometry.axon_radius *
                        cfg.electrolyte.eps_r_water);
    for (double e : w.E_m) CHECK(e == Approx(expected).epsilon(1e-12));
    // which is the calibrated resting field
    for (double e : w.E_m) CHECK(-e == Approx(cfg.bc.resting_Er).epsilon(1e-9));
  }
  SECTION("no current, no magnetic field, no flux") {
    for (double b : w.B_m) CHECK(b == 0.0);
    for (double f : w.flux_pos) CHECK(f == 0.0);
    for (double f : w.flux_neg) CHECK(f == 0.0);
  }
}

TEST_CASE("membrane E profile is linear in gamma and q_i0") {
  ModelConfig cfg = default_config();
  MembraneWave w = flat_wave(cfg);
  // Put structure into I_r so the gamma term is active.
  for (std::size_t i = 0; i < w.xi.size(); ++i) {
    double x = w.xi[i] / 1e-3;
    w.I_r[i] = 5.0 * std::exp(-x * x);
    w.dIr_dxi[i] = -2.0 * x / 1e-3 * 5.0 * std::exp(-x * x);
  }

  auto profile = [&](double gamma, double q) {
    MembraneBCParams bc = cfg.bc;
    bc.gamma = gamma;
    bc.q_i0 = q;
    return membrane_E_profile(w, bc, cfg.hh, cfg.geometry,
                              cfg.electrolyte.eps_r_water);
  };
  auto e0 = profile(0.0, cfg.bc.q_i0);
  auto e1 = profile(1.0, cfg.bc.q_i0);
  auto e2 = profile(2.0, cfg.bc.q_i0);
  for (std::size_t i = 0; i < w.xi.size(); ++i)
    CHECK(e2[i] - e1[i] == Approx(e1[i] - e0[i]).margin(1e-9));

  auto q1 = profile(1.0, 1e-10);
  auto q2 = profile(1.0, 2e-10);
  auto q3 = profile(1.0, 3e-10);
  for (std::size_t i = 0; i < w.xi.size(); ++i)
    CHECK(q3[i] - q2[i] == Approx(q2[i] - q1[i]).margin(1e-9));
}

TEST_CASE("membrane B profile is opposite in sign to I_r") {
  ModelConfig cfg = default_config();
  MembraneWave w = flat_wave(cfg);
  for (std::size_t i = 0; i < w.xi.size(); ++i)
    w.I_r[i] = (i % 2 == 0) ? 3.0 : -4.0;
  auto b = membrane_B_profile(w, cfg.bc, cfg.hh, cfg.geometry,
                              cfg.constants.mu0);
  for (std::size_t i = 0; i < w.xi.size(); ++i) {
    CHECK(b[i] * w.I_r[i] < 0.0);
  }
}

TEST_CASE("membrane flux integrates to the transferred charge over F") {
  ModelConfig cfg = default_config();
  MembraneWave w = flat_wave(cfg, 257);
  for (std::size_t i = 0; i < w.xi.size(); ++i) {
    double x = w.xi[i] / 0.2e-3;
    w.I_r[i] = 2.0 * std::exp(-x * x);
  }
  auto flux = membrane_flux_profile(w, cfg.constants.F);

  // Independent trapezoid quadrature of I_r / F.
  double q_over_f = 0.0, flux_int = 0.0;
  for (std::size_t i = 1; i < w.xi.size(); ++i) {
    double dx = w.xi[i] - w.xi[i - 1];
    q_over_f += 0.5 * dx * (w.I_r[i] + w.I_r[i - 1]) / cfg.constants.F;
    flux_int += 0.5 * dx * (flux[i] + flux[i - 1]);
  }
  CHECK(flux_int == Approx(q_over_f).epsilon(1e-12));
}

TEST_CASE("full pipeline wave satisfies its tail invariants", "[slow]") {
  ModelConfig cfg = default_config();
  auto s = integrate_hh(cfg.hh, cfg.hh.t_end, cfg.hh.dt);
  MembraneWave w = build_membrane_wave(cfg, s);

  CHECK(std::abs(w.V.front() - cfg.hh.V_rest) < 0.5e-3);
  CHECK(std::abs(w.V.back() - cfg.hh.V_rest) < 0.5e-3);
  for (double f : w.flux_neg) CHECK(f == 0.0);

  double b_peak = 0.0;
  for (double b : w.B_m) b_peak = std::max(b_peak, std::abs(b));
  CHECK(std::abs(w.B_m.front()) < 1e-3 * b_peak);
  CHECK(std::abs(w.B_m.back()) < 1e-3 * b_peak);
}
