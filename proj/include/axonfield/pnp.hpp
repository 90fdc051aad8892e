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

#ifndef AXONFIELD_PNP_HPP
#define AXONFIELD_PNP_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "axonfield/band_matrix.hpp"
#include "axonfield/mesh.hpp"
#include "axonfield/params.hpp"
#include "axonfield/wave.hpp"

namespace axonfield {

// Steady traveling-frame Poisson-Nernst-Planck on the exterior of the axon:
//   eps lap(V) = -F (c+ - c-)
//   div(f_s - v c_s xi_hat) = 0,   f_s = -D_s grad(c_s) -+ mu_s c_s grad(V)
// with the membrane Neumann data dV/dr = E_m(xi), imposed positive-carrier
// influx flux_pos(xi), zero negative-carrier flux, Dirichlet far field, and
// zero-gradient axial ends. Finite volumes on the vertex-centered dual mesh
// with exponentially fitted (Scharfetter-Gummel) face fluxes.

/// Bernoulli function x / (e^x - 1), stable over the full double range.
inline double bernoulli(double x) {
  double ax = std::abs(x);
  if (ax < 1e-10) return 1.0 - 0.5 * x + x * x / 12.0;
  if (x > 45.0) return x * std::exp(-x);
  if (x < -45.0) return -x;
  return x / std::expm1(x);
}

/// d/dx of bernoulli(x).
inline double bernoulli_prime(double x) {
  double ax = std::abs(x);
  if (ax < 1e-7) return -0.5 + x / 6.0;
  if (x > 45.0) return (1.0 - x) * std::exp(-x);
  if (x < -45.0) return -1.0;
  double em = std::expm1(x);
  return (em - x * (em + 1.0)) / (em * em);
}

struct TransportCoeffs {
  double D_pos = 0.0, D_neg = 0.0;   // m^2/s
  double c_b_pos = 0.0, c_b_neg = 0.0;  // far-field bulk, mol/m^3
  double eps = 0.0;                  // absolute permittivity, C/(V m)
  double V_T = 0.0;                  // thermal voltage, V
  double faraday = 0.0;              // C/mol
  double v = 0.0;                    // frame speed, m/s

  static TransportCoeffs from(const ModelConfig& cfg) {
    TransportCoeffs t;
    t.D_pos = cfg.electrolyte.lumped_pos.diffusion;
    t.D_neg = cfg.electrolyte.lumped_neg.diffusion;
    t.c_b_pos = cfg.electrolyte.lumped_pos.conc_bulk;
    t.c_b_neg = cfg.electrolyte.lumped_neg.conc_bulk;
    t.eps = cfg.electrolyte.eps_r_water;
    t.V_T = cfg.constants.k_b * cfg.electrolyte.temperature / cfg.constants.e;
    t.faraday = cfg.constants.F;
    t.v = cfg.hh.velocity;
    return t;
  }
};

/// Membrane boundary data sampled on the mesh's xi columns.
struct BoundaryProfiles {
  std::vector<double> dVdr_R;    // V/m
  std::vector<double> flux_pos;  // mol/(m^2 s), positive into the domain
};

/// Manufactured-solution hooks: volumetric sources and all-Dirichlet
/// boundary data, only used by verification studies.
struct MmsOverride {
  const std::vector<double>* src_V = nullptr;    // C/m^3 equivalent
  const std::vector<double>* src_cp = nullptr;   // mol/(m^3 s)
  const std::vector<double>* src_cm = nullptr;
  const std::vector<double>* bc_V = nullptr;     // full nodal fields
  const std::vector<double>* bc_cp = nullptr;
  const std::vector<double>* bc_cm = nullptr;
  bool dirichlet_all = false;
};

struct PnpOptions {
  double tol = 1e-8;
  int max_sweeps = 500;
  bool newton_fallback = true;
};

struct PnpDiagnostics {
  std::vector<double> residual_history;
  int sweeps = 0;
  bool converged = false;
  bool used_newton = false;
  std::size_t worst_i = 0, worst_j = 0;
  std::string worst_field;
  double min_concentration = 0.0;
};

struct FieldSolution {
  AxisymmetricMesh mesh;
  TransportCoeffs coeffs;
  BoundaryProfiles profiles;
  std::vector<double> V, c_pos, c_neg;  // nodal, index = j*nr + i
  double residual_norm = 0.0;
  int iterations = 0;
  PnpDiagnostics diag;
};

namespace pnpdetail {

struct Workspace {
  const AxisymmetricMesh& mesh;
  const TransportCoeffs& co;
  const BoundaryProfiles& bp;
  const MmsOverride* mms;
  std::size_t nr, nxi, n;

  Workspace(const AxisymmetricMesh& m, const TransportCoeffs& c,
            const BoundaryProfiles& b, const MmsOverride* o)
      : mesh(m), co(c), bp(b), mms(o), nr(m.nr()), nxi(m.nxi()),
        n(m.nodes()) {}

  bool dirichlet_V(std::size_t i, std::size_t j) const {
    if (mms && mms->dirichlet_all)
      return i == 0 || i == nr - 1 || j == 0 || j == nxi - 1;
    return i == nr - 1;
  }
  bool dirichlet_c(std::size_t i, std::size_t j) const {
    return dirichlet_V(i, j);
  }
  double bc_V_value(std::size_t idx) const {
    return (mms && mms->bc_V) ? (*mms->bc_V)[idx] : 0.0;
  }
  double bc_c_value(bool pos, std::size_t idx) const {
    if (mms && (pos ? mms->bc_cp : mms->bc_cm))
      return (*(pos ? mms->bc_cp : mms->bc_cm))[idx];
    return pos ? co.c_b_pos : co.c_b_neg;
  }

  // Poisson residual R_V(P) = sum_faces eps dV/dn A - eps g A_mem
  //                           + [F (cp - cm) + src] vol.
  void poisson_residual(const std::vector<double>& V,
                        const std::vector<double>& cp,
                        const std::vector<double>& cm,
                        std::vector<double>& res) const {
    res.assign(n, 0.0);
    for (std::size_t j = 0; j < nxi; ++j) {
      for (std::size_t i = 0; i < nr; ++i) {
        const std::size_t p = mesh.index(i, j);
        if (dirichlet_V(i, j)) {
          res[p] = V[p] - bc_V_value(p);
          continue;
        }
        double r = 0.0;
        if (i + 1 < nr) {
          double h = mesh.r[i + 1] - mesh.r[i];
          r += co.eps * (V[mesh.index(i + 1, j)] - V[p]) / h *
               mesh.radial_face_area(i + 1, j);
        }
        if (i > 0) {
          double h = mesh.r[i] - mesh.r[i - 1];
          r += co.eps * (V[mesh.index(i - 1, j)] - V[p]) / h *
               mesh.radial_face_area(i, j);
        } else {
          r -= co.eps * bp.dVdr_R[j] * mesh.membrane_area(j);
        }
        if (j + 1 < nxi) {
          double h = mesh.xi[j + 1] - mesh.xi[j];
          r += co.eps * (V[mesh.index(i, j + 1)] - V[p]) / h *
               mesh.ring_area[i];
        }
        if (j > 0) {
          double h = mesh.xi[j] - mesh.xi[j - 1];
          r += co.eps * (V[mesh.index(i, j - 1)] - V[p]) / h *
               mesh.ring_area[i];
        }
        double rho = co.faraday * (cp[p] - cm[p]);
        if (mms && mms->src_V) rho += (*mms->src_V)[p];
        res[p] = r + rho * mesh.volume(i, j);
      }
    }
  }

  // Linearized Poisson step matrix: Laplacian plus the Boltzmann-damping
  // diagonal -F (cp + cm)/V_T vol.
  void poisson_matrix(const std::vector<double>& cp,
                      const std::vector<double>& cm, BandMatrix& mat) const {
    mat.clear();
    for (std::size_t j = 0; j < nxi; ++j) {
      for (std::size_t i = 0; i < nr; ++i) {
        const std::size_t p = mesh.index(i, j);
        if (dirichlet_V(i, j)) {
          mat.at(p, p) = 1.0;
          continue;
        }
        double diag = 0.0;
        if (i + 1 < nr) {
          double h = mesh.r[i + 1] - mesh.r[i];
          double w = co.eps / h * mesh.radial_face_area(i + 1, j);
          mat.add(p, mesh.index(i + 1, j), w);
          diag -= w;
        }
        if (i > 0) {
          double h = mesh.r[i] - mesh.r[i - 1];
          double w = co.eps / h * mesh.radial_face_area(i, j);
          mat.add(p, mesh.index(i - 1, j), w);
          diag -= w;
        }
        if (j + 1 < nxi) {
          double h = mesh.xi[j + 1] - mesh.xi[j];
          double w = co.eps / h * mesh.ring_area[i];
          mat.add(p, mesh.index(i, j + 1), w);
          diag -= w;
        }
        if (j > 0) {
          double h = mesh.xi[j] - mesh.xi[j - 1];
          double w = co.eps / h * mesh.ring_area[i];
          mat.add(p, mesh.index(i, j - 1), w);
          diag -= w;
        }
        diag -= co.faraday * (cp[p] + cm[p]) / co.V_T * mesh.volume(i, j);
        mat.add(p, p, diag);
      }
    }
  }

  // Assembles the transport system A c = b for one species given V; also
  // evaluates the residual A c - b of the current iterate if res != null.
  void transport_system(bool positive, const std::vector<double>& V,
                        const std::vector<double>& c, BandMatrix* mat,
                        std::vector<double>* rhs,
                        std::vector<double>* res) const {
    const double z = positive ? 1.0 : -1.0;
    const double D = positive ? co.D_pos : co.D_neg;
    if (mat) mat->clear();
    if (rhs) rhs->assign(n, 0.0);
    if (res) res->assign(n, 0.0);

    auto add_entry = [&](std::size_t row, std::size_t col, double w) {
      if (mat) mat->add(row, col, w);
    };
    auto add_rhs = [&](std::size_t row, double v_) {
      if (rhs) (*rhs)[row] += v_;
      if (res) (*res)[row] -= v_;
    };
    auto add_flux = [&](std::size_t row, std::size_t ca, std::size_t cb,
                        double wa, double wb) {
      // contribution wa*c[ca] + wb*c[cb] to the residual of `row`
      add_entry(row, ca, wa);
      add_entry(row, cb, wb);
      if (res) (*res)[row] += wa * c[ca] + wb * c[cb];
    };

    for (std::size_t j = 0; j < nxi; ++j) {
      for (std::size_t i = 0; i < nr; ++i) {
        const std::size_t p = mesh.index(i, j);
        if (dirichlet_c(i, j)) {
          add_entry(p, p, 1.0);
          add_rhs(p, bc_c_value(positive, p));
          if (res) (*res)[p] += c[p];
          continue;
        }
        // radial face toward i+1
        if (i + 1 < nr) {
          const std::size_t q = mesh.index(i + 1, j);
          const double h = mesh.r[i + 1] - mesh.r[i];
          const double A = mesh.radial_face_area(i + 1, j);
          const double y = -z * (V[q] - V[p]) / co.V_T;
          const double g = D / h * A;
          // outward flux from p: g (B(-y) c_p - B(y) c_q)
          add_flux(p, p, q, g * bernoulli(-y), -g * bernoulli(y));
        }
        // radial face toward i-1 (edge assembled from the upper node too so
        // every row owns its own flux balance)
        if (i > 0) {
          const std::size_t q = mesh.index(i - 1, j);
          const double h = mesh.r[i] - mesh.r[i - 1];
          const double A = mesh.radial_face_area(i, j);
          const double y = -z * (V[p] - V[q]) / co.V_T;  // edge q -> p
          const double g = D / h * A;
          // outward flux from p through this face = -(edge flux q->p)
          add_flux(p, p, q, g * bernoulli(y), -g * bernoulli(-y));
        } else {
          // membrane: imposed normal influx for the positive carrier
          const double influx = positive ? bp.flux_pos[j] : 0.0;
          add_rhs(p, influx * mesh.membrane_area(j));
        }
        // axial face toward j+1
        if (j + 1 < nxi) {
          const std::size_t q = mesh.index(i, j + 1);
          const double h = mesh.xi[j + 1] - mesh.xi[j];
          const double A = mesh.ring_area[i];
          const double y = -z * (V[q] - V[p]) / co.V_T - co.v * h / D;
          const double g = D / h * A;
          add_flux(p, p, q, g * bernoulli(-y), -g * bernoulli(y));
        } else {
          // +xi end: advective outflow -v c with zero-gradient upwind value
          add_flux(p, p, p, -co.v * mesh.ring_area[i], 0.0);
        }
        // axial face toward j-1
        if (j > 0) {
          const std::size_t q = mesh.index(i, j - 1);
          const double h = mesh.xi[j] - mesh.xi[j - 1];
          const double A = mesh.ring_area[i];
          const double y = -z * (V[p] - V[q]) / co.V_T - co.v * h / D;
          const double g = D / h * A;
          add_flux(p, p, q, g * bernoulli(y), -g * bernoulli(-y));
        } else {
          // -xi end: advective outflow +v c
          add_flux(p, p, p, co.v * mesh.ring_area[i], 0.0);
        }
        const std::vector<double>* src =
            mms ? (positive ? mms->src_cp : mms->src_cm) : nullptr;
        if (src) add_rhs(p, (*src)[p] * mesh.volume(i, j));
      }
    }
  }

  // Natural residual scales, so the convergence measure is dimensionless
  // and mesh-independent.
  void residual_scales(std::vector<double>& sV, std::vector<double>& sc) const {
    sV.assign(n, 1.0);
    sc.assign(n, 1.0);
    const double c_b = std::max(co.c_b_pos, co.c_b_neg);
    const double D = std::max(co.D_pos, co.D_neg);
    for (std::size_t j = 0; j < nxi; ++j) {
      for (std::size_t i = 0; i < nr; ++i) {
        const std::size_t p = mesh.index(i, j);
        double wsum = 0.0;
        if (i + 1 < nr)
          wsum += mesh.radial_face_area(i + 1, j) / (mesh.r[i + 1] - mesh.r[i]);
        if (i > 0)
          wsum += mesh.radial_face_area(i, j) / (mesh.r[i] - mesh.r[i - 1]);
        if (j + 1 < nxi)
          wsum += mesh.ring_area[i] / (mesh.xi[j + 1] - mesh.xi[j]);
        if (j > 0)
          wsum += mesh.ring_area[i] / (mesh.xi[j] - mesh.xi[j - 1]);
        sV[p] = co.eps * wsum * co.V_T;
        sc[p] = D * wsum * c_b + std::abs(co.v) * mesh.ring_area[i] * c_b;
        if (dirichlet_V(i, j)) sV[p] = co.V_T;
        if (dirichlet_c(i, j)) sc[p] = c_b;
      }
    }
  }
};

inline double scaled_norm(const std::vector<double>& r,
                          const std::vector<double>& s, std::size_t* argmax) {
  double sum = 0.0, worst = -1.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    double x = r[k] / s[k];
    sum += x * x;
    if (std::abs(x) > worst) {
      worst = std::abs(x);
      if (argmax) *argmax = k;
    }
  }
  return std::sqrt(sum / r.size());
}

}  // namespace pnpdetail

/// Coupled damped-Newton iteration on the stacked (V, c+, c-) system.
/// Used as the fallback when the decoupled sweep stalls.
inline bool solve_pnp_newton(pnpdetail::Workspace& ws, std::vector<double>& V,
                             std::vector<double>& cp, std::vector<double>& cm,
                             const PnpOptions& opt, PnpDiagnostics& diag);

/// Decoupled (Gummel-style) solve: a Boltzmann-damped Poisson update
/// followed by exact linear transport solves, iterated to the coupled
/// residual tolerance, with a damped-Newton fallback on stall.
inline FieldSolution solve_pnp(const AxisymmetricMesh& mesh,
                               const TransportCoeffs& coeffs,
                               const BoundaryProfiles& profiles,
                               const PnpOptions& opt,
                               const MmsOverride* mms = nullptr) {
  using namespace pnpdetail;
  if (profiles.dVdr_R.size() != mesh.nxi() ||
      profiles.flux_pos.size() != mesh.nxi())
    throw ConfigError("solve_pnp: boundary profiles do not match the mesh");

  Workspace ws(mesh, coeffs, profiles, mms);
  const std::size_t n = ws.n, nr = ws.nr;

  FieldSolution sol;
  sol.mesh = mesh;
  sol.coeffs = coeffs;
  sol.profiles = profiles;
  sol.V.assign(n, 0.0);
  sol.c_pos.assign(n, coeffs.c_b_pos);
  sol.c_neg.assign(n, coeffs.c_b_neg);

  std::vector<double> sV, sc;
  ws.residual_scales(sV, sc);

  BandMatrix mat(n, nr, nr);
  std::vector<double> resV, resP, resM, rhs;
  PnpDiagnostics& diag = sol.diag;
  diag.min_concentration = std::min(coeffs.c_b_pos, coeffs.c_b_neg);

  auto coupled_residual = [&]() {
    ws.poisson_residual(sol.V, sol.c_pos, sol.c_neg, resV);
    ws.transport_system(true, sol.V, sol.c_pos, nullptr, nullptr, &resP);
    ws.transport_system(false, sol.V, sol.c_neg, nullptr, nullptr, &resM);
    std::size_t aV = 0, aP = 0, aM = 0;
    double rv = scaled_norm(resV, sV, &aV);
    double rp = scaled_norm(resP, sc, &aP);
    double rm = scaled_norm(resM, sc, &aM);
    double worst = std::max({rv, rp, rm});
    std::size_t arg = (worst == rv) ? aV : (worst == rp ? aP : aM);
    diag.worst_field = (worst == rv) ? "V" : (worst == rp ? "c_pos" : "c_neg");
    diag.worst_i = arg % nr;
    diag.worst_j = arg / nr;
    return worst;
  };

  double res = coupled_residual();
  diag.residual_history.push_back(res);

  // Depth-one Anderson (Aitken) acceleration state: the decoupled sweep is
  // a linearly convergent fixed point; secant extrapolation along the
  // iterate increments removes a dominant slow mode when one is present.
  std::vector<double> dx_prev;
  int cooldown = 0;
  auto pack = [&](std::vector<double>& out) {
    out.resize(3 * n);
    std::copy(sol.V.begin(), sol.V.end(), out.begin());
    std::copy(sol.c_pos.begin(), sol.c_pos.end(), out.begin() + n);
    std::copy(sol.c_neg.begin(), sol.c_neg.end(), out.begin() + 2 * n);
  };
  auto unpack = [&](const std::vector<double>& in) {
    std::copy(in.begin(), in.begin() + n, sol.V.begin());
    std::copy(in.begin() + n, in.begin() + 2 * n, sol.c_pos.begin());
    std::copy(in.begin() + 2 * n, in.end(), sol.c_neg.begin());
  };

  for (int sweep = 0; sweep < opt.max_sweeps && res > opt.tol; ++sweep) {
    std::vector<double> x_before;
    pack(x_before);

    // Poisson step
    ws.poisson_residual(sol.V, sol.c_pos, sol.c_neg, resV);
    ws.poisson_matrix(sol.c_pos, sol.c_neg, mat);
    mat.factorize();
    std::vector<double> delta(n);
    for (std::size_t k = 0; k < n; ++k) delta[k] = -resV[k];
    mat.solve(delta);
    double dmax = 0.0;
    for (double d : delta) dmax = std::max(dmax, std::abs(d));
    double damp = dmax > 5.0 * coeffs.V_T ? 5.0 * coeffs.V_T / dmax : 1.0;
    for (std::size_t k = 0; k < n; ++k) sol.V[k] += damp * delta[k];

    // exact linear transport solves at the updated potential
    for (bool positive : {true, false}) {
      std::vector<double>& c = positive ? sol.c_pos : sol.c_neg;
      ws.transport_system(positive, sol.V, c, &mat, &rhs, nullptr);
      mat.factorize();
      std::vector<double> cnew = rhs;
      mat.solve(cnew);
      double cmin = 1e300;
      for (double x : cnew) cmin = std::min(cmin, x);
      diag.min_concentration = std::min(diag.min_concentration, cmin);
      if (cmin < -1e-9 * std::max(coeffs.c_b_pos, coeffs.c_b_neg))
        throw NumericalError(
            "solve_pnp: negative concentration after transport update "
            "(min = " + std::to_string(cmin) + " mol/m^3)");
      c = std::move(cnew);
    }

    res = coupled_residual();

    // secant extrapolation of the sweep fixed point
    std::vector<double> x_now;
    pack(x_now);
    std::vector<double> dx(3 * n);
    for (std::size_t k = 0; k < 3 * n; ++k) dx[k] = x_now[k] - x_before[k];
    if (!dx_prev.empty() && cooldown <= 0 && res > opt.tol) {
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < 3 * n; ++k) {
        num += dx[k] * dx_prev[k];
        den += dx_prev[k] * dx_prev[k];
      }
      double rho = den > 0.0 ? num / den : 0.0;
      if (std::getenv("AXONFIELD_PNP_TRACE"))
        std::fprintf(stderr, "    sweep %d: res %.3g rho %.4f\n", sweep, res,
                     rho);
      if (rho > 0.5 && rho < 0.995) {
        double factor = std::min(rho / (1.0 - rho), 50.0);
        // keep the extrapolated concentrations nonnegative
        for (std::size_t k = n; k < 3 * n; ++k)
          if (x_now[k] + factor * dx[k] < 0.0 && dx[k] < 0.0)
            factor = std::min(factor, -0.9 * x_now[k] / dx[k]);
        std::vector<double> x_ext(3 * n);
        for (std::size_t k = 0; k < 3 * n; ++k)
          x_ext[k] = x_now[k] + factor * dx[k];
        unpack(x_ext);
        double res_ext = coupled_residual();
        if (res_ext < res) {
          res = res_ext;
          x_now = std::move(x_ext);
        } else {
          unpack(x_now);
          res = coupled_residual();
        }
        cooldown = 2;
        dx_prev.clear();
      } else {
        dx_prev = dx;
      }
    } else {
      dx_prev = dx;
      --cooldown;
    }

    diag.residual_history.push_back(res);
    diag.sweeps = sweep + 1;

    // stall detection: < 5% reduction over the last 10 sweeps
    const auto& hist = diag.residual_history;
    if (opt.newton_fallback && hist.size() > 10 &&
        res > 0.95 * hist[hist.size() - 11]) {
      diag.used_newton = true;
      if (solve_pnp_newton(ws, sol.V, sol.c_pos, sol.c_neg, opt, diag))
        res = coupled_residual();
      break;
    }
  }

  diag.converged = res <= opt.tol;
  sol.residual_norm = res;
  sol.iterations = diag.sweeps;
  return sol;
}

/// Convenience wrapper: samples the membrane wave onto the mesh columns.
inline FieldSolution solve_pnp(const AxisymmetricMesh& mesh,
                               const ModelConfig& cfg, const MembraneWave& wave,
                               double tol) {
  if (wave.xi.front() > mesh.xi.front() || wave.xi.back() < mesh.xi.back())
    throw ConfigError("solve_pnp: wave does not cover the mesh xi extent");
  BoundaryProfiles bp;
  bp.dVdr_R.resize(mesh.nxi());
  bp.flux_pos.resize(mesh.nxi());
  for (std::size_t j = 0; j < mesh.nxi(); ++j) {
    bp.dVdr_R[j] = wave.interp(wave.E_m, mesh.xi[j]);
    bp.flux_pos[j] = wave.interp(wave.flux_pos, mesh.xi[j]);
  }
  PnpOptions opt;
  opt.tol = tol;
  opt.max_sweeps = cfg.solver.max_sweeps;
  opt.newton_fallback = cfg.solver.newton_fallback;
  return solve_pnp(mesh, TransportCoeffs::from(cfg), bp, opt);
}

inline bool solve_pnp_newton(pnpdetail::Workspace& ws, std::vector<double>& V,
                             std::vector<double>& cp, std::vector<double>& cm,
                             const PnpOptions& opt, PnpDiagnostics& diag) {
  using namespace pnpdetail;
  const std::size_t n = ws.n, nr = ws.nr, nxi = ws.nxi;
  const std::size_t N = 3 * n;
  const std::size_t bw = 3 * nr + 2;
  // Direct banded factorization of the coupled system. The full-window
  // configuration lands at ~330k unknowns / ~2.6 GB of band storage; past
  // 400k the factorization would not fit comfortably and the decoupled
  // sweep's diagnostics are the answer (a smaller axial window keeps the
  // coupled system in range).
  if (N > 400000) {
    diag.worst_field += " (coupled Newton skipped: system too large)";
    return false;
  }
  const TransportCoeffs& co = ws.co;

  std::vector<double> sV, sc;
  ws.residual_scales(sV, sc);

  auto scaled_res = [&](const std::vector<double>& v,
                        const std::vector<double>& p,
                        const std::vector<double>& m) {
    std::vector<double> rV, rP, rM;
    ws.poisson_residual(v, p, m, rV);
    ws.transport_system(true, v, p, nullptr, nullptr, &rP);
    ws.transport_system(false, v, m, nullptr, nullptr, &rM);
    double a = scaled_norm(rV, sV, nullptr);
    double b = scaled_norm(rP, sc, nullptr);
    double c = scaled_norm(rM, sc, nullptr);
    return std::max({a, b, c});
  };

  BandMatrix jac(N, bw, bw);
  std::vector<double> rhs(N);
  double res = scaled_res(V, cp, cm);

  for (int it = 0; it < 50 && res > opt.tol; ++it) {
    jac.clear();
    std::fill(rhs.begin(), rhs.end(), 0.0);
    // rows: 3*p + {0: Poisson, 1: c+, 2: c-}
    std::vector<double> rV, rP, rM;
    ws.poisson_residual(V, cp, cm, rV);
    ws.transport_system(true, V, cp, nullptr, nullptr, &rP);
    ws.transport_system(false, V, cm, nullptr, nullptr, &rM);
    for (std::size_t p = 0; p < n; ++p) {
      rhs[3 * p + 0] = -rV[p];
      rhs[3 * p + 1] = -rP[p];
      rhs[3 * p + 2] = -rM[p];
    }

    for (std::size_t j = 0; j < nxi; ++j) {
      for (std::size_t i = 0; i < nr; ++i) {
        const std::size_t p = ws.mesh.index(i, j);
        // Poisson row
        if (ws.dirichlet_V(i, j)) {
          jac.add(3 * p, 3 * p, 1.0);
        } else {
          double diag_v = 0.0;
          auto lap = [&](std::size_t q, double h, double A) {
            double w = co.eps / h * A;
            jac.add(3 * p, 3 * q, w);
            diag_v -= w;
          };
          if (i + 1 < nr)
            lap(ws.mesh.index(i + 1, j), ws.mesh.r[i + 1] - ws.mesh.r[i],
                ws.mesh.radial_face_area(i + 1, j));
          if (i > 0)
            lap(ws.mesh.index(i - 1, j), ws.mesh.r[i] - ws.mesh.r[i - 1],
                ws.mesh.radial_face_area(i, j));
          if (j + 1 < nxi)
            lap(ws.mesh.index(i, j + 1), ws.mesh.xi[j + 1] - ws.mesh.xi[j],
                ws.mesh.ring_area[i]);
          if (j > 0)
            lap(ws.mesh.index(i, j - 1), ws.mesh.xi[j] - ws.mesh.xi[j - 1],
                ws.mesh.ring_area[i]);
          jac.add(3 * p, 3 * p, diag_v);
          const double vol = ws.mesh.volume(i, j);
          jac.add(3 * p, 3 * p + 1, co.faraday * vol);
          jac.add(3 * p, 3 * p + 2, -co.faraday * vol);
        }
        // transport rows
        for (int s = 0; s < 2; ++s) {
          const bool positive = (s == 0);
          const std::size_t row = 3 * p + 1 + s;
          if (ws.dirichlet_c(i, j)) {
            jac.add(row, row, 1.0);
            continue;
          }
          const double z = positive ? 1.0 : -1.0;
          const double D = positive ? co.D_pos : co.D_neg;
          const std::vector<double>& c = positive ? cp : cm;
          auto face = [&](std::size_t q, double h, double A, bool axial,
                          bool p_is_low) {
            // edge between p and q; low -> high orientation for y
            const std::size_t lo = p_is_low ? p : q;
            const std::size_t hi = p_is_low ? q : p;
            double y = -z * (V[hi] - V[lo]) / co.V_T;
            if (axial) y -= co.v * h / D;
            const double g = D / h * A;
            // edge flux (lo->hi): g (B(-y) c_lo - B(y) c_hi)
            // outward from p: +edge if p==lo else -edge
            const double sign = p_is_low ? 1.0 : -1.0;
            jac.add(row, 3 * lo + 1 + s, sign * g * bernoulli(-y));
            jac.add(row, 3 * hi + 1 + s, -sign * g * bernoulli(y));
            // dependence on potentials through y
            const double dflux_dy =
                g * (-bernoulli_prime(-y) * c[lo] - bernoulli_prime(y) * c[hi]);
            // dy/dV_hi = -z/V_T, dy/dV_lo = +z/V_T
            jac.add(row, 3 * hi, sign * dflux_dy * (-z / co.V_T));
            jac.add(row, 3 * lo, sign * dflux_dy * (z / co.V_T));
          };
          if (i + 1 < nr)
            face(ws.mesh.index(i + 1, j), ws.mesh.r[i + 1] - ws.mesh.r[i],
                 ws.mesh.radial_face_area(i + 1, j), false, true);
          if (i > 0)
            face(ws.mesh.index(i - 1, j), ws.mesh.r[i] - ws.mesh.r[i - 1],
                 ws.mesh.radial_face_area(i, j), false, false);
          if (j + 1 < nxi)
            face(ws.mesh.index(i, j + 1), ws.mesh.xi[j + 1] - ws.mesh.xi[j],
                 ws.mesh.ring_area[i], true, true);
          else
            jac.add(row, row, -co.v * ws.mesh.ring_area[i]);
          if (j > 0)
            face(ws.mesh.index(i, j - 1), ws.mesh.xi[j] - ws.mesh.xi[j - 1],
                 ws.mesh.ring_area[i], true, false);
          else
            jac.add(row, row, co.v * ws.mesh.ring_area[i]);
        }
      }
    }

    jac.factorize();
    jac.solve(rhs);

    // backtracking line search with positivity guard
    double alpha = 1.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (int s = 0; s < 2; ++s) {
        double c0 = (s == 0 ? cp : cm)[p];
        double dc = rhs[3 * p + 1 + s];
        if (c0 + alpha * dc < 0.0 && dc < 0.0)
          alpha = std::min(alpha, -0.9 * c0 / dc);
      }
    }
    bool accepted = false;
    for (int bt = 0; bt < 10; ++bt) {
      std::vector<double> v2(V), p2(cp), m2(cm);
      for (std::size_t p = 0; p < n; ++p) {
        v2[p] += alpha * rhs[3 * p];
        p2[p] += alpha * rhs[3 * p + 1];
        m2[p] += alpha * rhs[3 * p + 2];
      }
      double res2 = scaled_res(v2, p2, m2);
      if (res2 < res) {
        V = std::move(v2);
        cp = std::move(p2);
        cm = std::move(m2);
        res = res2;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    diag.residual_history.push_back(res);
    if (!accepted) return false;
  }
  return res <= opt.tol;
}

}  // namespace axonfield

#endif  // AXONFIELD_PNP_HPP
