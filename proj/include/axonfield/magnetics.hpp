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

#ifndef AXONFIELD_MAGNETICS_HPP
#define AXONFIELD_MAGNETICS_HPP

#include <cmath>
#include <vector>

#include "axonfield/fields.hpp"
#include "axonfield/pnp.hpp"
#include "axonfield/wave.hpp"

namespace axonfield {

/// Azimuthal field on the (r, xi) mesh from the Ampere loop integral:
///   r B_phi(r, xi) = R B_m(xi) + mu0 int_R^r r' J_xi(r', xi) dr'.
struct MagneticField {
  std::vector<double> B_phi;  // nodal, same layout as FieldSolution
};

inline MagneticField magnetic_field(const AxisymmetricMesh& mesh,
                                    const std::vector<double>& J_xi,
                                    const std::vector<double>& B_m_columns,
                                    double mu0) {
  if (B_m_columns.size() != mesh.nxi() || J_xi.size() != mesh.nodes())
    throw ConfigError("magnetic_field: field/mesh size mismatch");
  MagneticField out;
  out.B_phi.assign(mesh.nodes(), 0.0);
  const double R = mesh.r.front();
  for (std::size_t j = 0; j < mesh.nxi(); ++j) {
    double moment = 0.0;  // int r' J dr', cumulative trapezoid
    out.B_phi[mesh.index(0, j)] = B_m_columns[j];
    for (std::size_t i = 1; i < mesh.nr(); ++i) {
      const double h = mesh.r[i] - mesh.r[i - 1];
      moment += 0.5 * h *
                (mesh.r[i - 1] * J_xi[mesh.index(i - 1, j)] +
                 mesh.r[i] * J_xi[mesh.index(i, j)]);
      out.B_phi[mesh.index(i, j)] =
          (R * B_m_columns[j] + mu0 * moment) / mesh.r[i];
    }
  }
  return out;
}

/// Convenience wrapper sampling the wave's membrane field onto the mesh.
inline MagneticField magnetic_field(const FieldSolution& sol,
                                    const DerivedFields& fields,
                                    const MembraneWave& wave, double mu0) {
  std::vector<double> bm(sol.mesh.nxi());
  for (std::size_t j = 0; j < sol.mesh.nxi(); ++j)
    bm[j] = wave.interp(wave.B_m, sol.mesh.xi[j]);
  return magnetic_field(sol.mesh, fields.J_xi, bm, mu0);
}

struct InverseRFit {
  double coefficient = 0.0;   // c in B = c/r, T m
  double rms_residual = 0.0;  // relative
  double r_min = 0.0, r_max = 0.0;
};

/// Least-squares c minimizing sum (B_i - c/r_i)^2 over samples within
/// [r_min, r_max]; the residual is reported relative to the RMS of B.
inline InverseRFit fit_inverse_r(const std::vector<double>& r,
                                 const std::vector<double>& B, double r_min,
                                 double r_max) {
  if (r.size() != B.size())
    throw ConfigError("fit_inverse_r: size mismatch");
  double num = 0.0, den = 0.0, bb = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < r_min || r[i] > r_max) continue;
    if (!(r[i] > 0.0)) throw ConfigError("fit_inverse_r: r must be > 0");
    num += B[i] / r[i];
    den += 1.0 / (r[i] * r[i]);
    bb += B[i] * B[i];
    ++count;
  }
  if (count == 0) throw ConfigError("fit_inverse_r: empty fit range");
  if (count < 8) throw ConfigError("fit_inverse_r: needs >= 8 samples");
  InverseRFit fit;
  fit.coefficient = num / den;
  fit.r_min = r_min;
  fit.r_max = r_max;
  double ss = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < r_min || r[i] > r_max) continue;
    double e = B[i] - fit.coefficient / r[i];
    ss += e * e;
  }
  fit.rms_residual = bb > 0.0 ? std::sqrt(ss / bb) : std::sqrt(ss / count);
  return fit;
}

}  // namespace axonfield

#endif  // AXONFIELD_MAGNETICS_HPP
