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

#ifndef AXONFIELD_FIELDS_HPP
#define AXONFIELD_FIELDS_HPP

#include <cmath>
#include <vector>

#include "axonfield/pnp.hpp"

namespace axonfield {

struct DerivedFields {
  std::vector<double> rho;         // C/m^3
  std::vector<double> E_r, E_xi;   // V/m
  std::vector<double> J_r, J_xi;   // A/m^2
};

namespace fieldsdetail {

// Three-point first derivative on a nonuniform grid, exact for linears and
// quadratics; one-sided second-order at the ends.
inline double d1(const std::vector<double>& x, const std::vector<double>& f,
                 std::size_t k, std::size_t stride, std::size_t count,
                 std::size_t base) {
  auto F = [&](std::size_t q) { return f[base + q * stride]; };
  auto X = [&](std::size_t q) { return x[q]; };
  if (count < 2) return 0.0;
  if (k == 0) {
    double h1 = X(1) - X(0);
    if (count == 2) return (F(1) - F(0)) / h1;
    double h2 = X(2) - X(1);
    // one-sided: f'(x0) = (-(2h1+h2) f0 + (h1+h2)^2/h2 ... use Lagrange form
    double a = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
    double b = (h1 + h2) / (h1 * h2);
    double c = -h1 / (h2 * (h1 + h2));
    return a * F(0) + b * F(1) + c * F(2);
  }
  if (k == count - 1) {
    double h1 = X(count - 1) - X(count - 2);
    if (count == 2) return (F(count - 1) - F(count - 2)) / h1;
    double h0 = X(count - 2) - X(count - 3);
    double a = h1 / (h0 * (h0 + h1));
    double b = -(h0 + h1) / (h0 * h1);
    double c = (h0 + 2.0 * h1) / (h1 * (h0 + h1));
    return a * F(count - 3) + b * F(count - 2) + c * F(count - 1);
  }
  double hm = X(k) - X(k - 1);
  double hp = X(k + 1) - X(k);
  double a = -hp / (hm * (hm + hp));
  double b = (hp - hm) / (hm * hp);
  double c = hm / (hp * (hm + hp));
  return a * F(k - 1) + b * F(k) + c * F(k + 1);
}

}  // namespace fieldsdetail

/// E = -grad V by second-order differences (one-sided at boundaries).
inline void electric_field(const FieldSolution& sol, std::vector<double>& E_r,
                           std::vector<double>& E_xi) {
  const auto& m = sol.mesh;
  const std::size_t nr = m.nr(), nxi = m.nxi();
  E_r.assign(sol.V.size(), 0.0);
  E_xi.assign(sol.V.size(), 0.0);
  for (std::size_t j = 0; j < nxi; ++j)
    for (std::size_t i = 0; i < nr; ++i)
      E_r[m.index(i, j)] =
          -fieldsdetail::d1(m.r, sol.V, i, 1, nr, m.index(0, j));
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nxi; ++j)
      E_xi[m.index(i, j)] =
          -fieldsdetail::d1(m.xi, sol.V, j, nr, nxi, i);
}

/// rho = F (c+ - c-).
inline std::vector<double> charge_density(const FieldSolution& sol) {
  std::vector<double> rho(sol.V.size());
  for (std::size_t k = 0; k < rho.size(); ++k)
    rho[k] = sol.coeffs.faraday * (sol.c_pos[k] - sol.c_neg[k]);
  return rho;
}

/// J = F (f+ - f-) from the same exponentially fitted face fluxes the
/// solver uses (migration-diffusion part; the frame-advection term is a
/// coordinate artifact and carries no charge in the lab frame since the
/// bulk is neutral). Face values are averaged onto nodes; the membrane row
/// carries the imposed influx.
inline void current_density(const FieldSolution& sol, std::vector<double>& J_r,
                            std::vector<double>& J_xi) {
  const auto& m = sol.mesh;
  const TransportCoeffs& co = sol.coeffs;
  const std::size_t nr = m.nr(), nxi = m.nxi();
  J_r.assign(sol.V.size(), 0.0);
  J_xi.assign(sol.V.size(), 0.0);

  auto face_flux = [&](bool positive, std::size_t a, std::size_t b,
                       double h) {
    const double z = positive ? 1.0 : -1.0;
    const double D = positive ? co.D_pos : co.D_neg;
    const std::vector<double>& c = positive ? sol.c_pos : sol.c_neg;
    const double y = -z * (sol.V[b] - sol.V[a]) / co.V_T;
    return D / h * (bernoulli(-y) * c[a] - bernoulli(y) * c[b]);
  };

  // radial faces: nr-1 per column
  std::vector<double> fr(nr - 1);
  for (std::size_t j = 0; j < nxi; ++j) {
    for (std::size_t i = 0; i + 1 < nr; ++i) {
      const std::size_t a = m.index(i, j), b = m.index(i + 1, j);
      const double h = m.r[i + 1] - m.r[i];
      fr[i] = co.faraday *
              (face_flux(true, a, b, h) - face_flux(false, a, b, h));
    }
    J_r[m.index(0, j)] = co.faraday * sol.profiles.flux_pos[j];
    for (std::size_t i = 1; i + 1 < nr; ++i)
      J_r[m.index(i, j)] = 0.5 * (fr[i - 1] + fr[i]);
    J_r[m.index(nr - 1, j)] = fr[nr - 2];
  }
  // axial faces: nxi-1 per row
  std::vector<double> fx(nxi - 1);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j + 1 < nxi; ++j) {
      const std::size_t a = m.index(i, j), b = m.index(i, j + 1);
      const double h = m.xi[j + 1] - m.xi[j];
      fx[j] = co.faraday *
              (face_flux(true, a, b, h) - face_flux(false, a, b, h));
    }
    J_xi[m.index(i, 0)] = fx[0];
    for (std::size_t j = 1; j + 1 < nxi; ++j)
      J_xi[m.index(i, j)] = 0.5 * (fx[j - 1] + fx[j]);
    J_xi[m.index(i, nxi - 1)] = fx[nxi - 2];
  }
}

inline DerivedFields derive_fields(const FieldSolution& sol) {
  DerivedFields d;
  d.rho = charge_density(sol);
  electric_field(sol, d.E_r, d.E_xi);
  current_density(sol, d.J_r, d.J_xi);
  return d;
}

/// Nodal values along the radial line nearest to the requested xi.
/// The AP peak sits at xi = 0 by construction, which is the conventional
/// profile location.
inline std::vector<double> radial_profile(const AxisymmetricMesh& mesh,
                                          const std::vector<double>& field,
                                          double xi) {
  if (xi < mesh.xi.front() - 1e-12 || xi > mesh.xi.back() + 1e-12)
    throw ConfigError("radial_profile: xi outside the mesh");
  std::size_t jbest = 0;
  double dbest = 1e300;
  for (std::size_t j = 0; j < mesh.nxi(); ++j) {
    double d = std::abs(mesh.xi[j] - xi);
    if (d < dbest) {
      dbest = d;
      jbest = j;
    }
  }
  std::vector<double> out(mesh.nr());
  for (std::size_t i = 0; i < mesh.nr(); ++i)
    out[i] = field[mesh.index(i, jbest)];
  return out;
}

/// Species mass balance of the converged solution: imposed membrane influx
/// plus far-field exchange must equal the net traveling-frame advective
/// outflow through the axial ends. Returns the imbalance relative to the
/// gross flux magnitude.
inline double conservation_defect(const FieldSolution& sol, bool positive) {
  const auto& m = sol.mesh;
  const TransportCoeffs& co = sol.coeffs;
  const std::size_t nr = m.nr(), nxi = m.nxi();
  const double z = positive ? 1.0 : -1.0;
  const double D = positive ? co.D_pos : co.D_neg;
  const std::vector<double>& c = positive ? sol.c_pos : sol.c_neg;

  double influx_mem = 0.0;
  if (positive)
    for (std::size_t j = 0; j < nxi; ++j)
      influx_mem += sol.profiles.flux_pos[j] * m.membrane_area(j);

  // exchange through the Dirichlet far-field row (flux on the last face)
  double influx_far = 0.0;
  for (std::size_t j = 0; j < nxi; ++j) {
    const std::size_t a = m.index(nr - 2, j), b = m.index(nr - 1, j);
    const double h = m.r[nr - 1] - m.r[nr - 2];
    const double y = -z * (sol.V[b] - sol.V[a]) / co.V_T;
    const double f = D / h * (bernoulli(-y) * c[a] - bernoulli(y) * c[b]);
    influx_far -= f * m.radial_face_area(nr - 1, j);
  }

  // advective flow -v c xi_hat through the axial ends (zero-gradient value)
  double adv_in = 0.0, adv_out = 0.0;
  for (std::size_t i = 0; i < nr - 1; ++i) {
    adv_in += co.v * c[m.index(i, nxi - 1)] * m.ring_area[i];
    adv_out += co.v * c[m.index(i, 0)] * m.ring_area[i];
  }

  const double defect = influx_mem + influx_far + adv_in - adv_out;
  const double gross = std::abs(influx_mem) + std::abs(influx_far) +
                       std::abs(adv_in) + std::abs(adv_out);
  return gross > 0.0 ? std::abs(defect) / gross : std::abs(defect);
}

}  // namespace axonfield

#endif  // AXONFIELD_FIELDS_HPP
