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

#ifndef AXONFIELD_MESH_HPP
#define AXONFIELD_MESH_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "axonfield/params.hpp"

namespace axonfield {

/// Structured tensor grid of the exterior domain (r, xi), vertex-centered,
/// with axisymmetric (2 pi r) weighting. Node 0 of each radial line sits
/// exactly on the membrane r = R, the last node exactly on outer_radius.
/// Control volumes are the dual boxes between face midpoints.
struct AxisymmetricMesh {
  std::vector<double> r;        // nodes, ascending from R
  std::vector<double> xi;       // nodes, ascending, uniform
  std::vector<double> r_face;   // nr+1 dual faces; r_face[0]=r[0], r_face[nr]=r[nr-1]
  std::vector<double> xi_face;  // nxi+1 dual faces
  std::vector<double> ring_area;  // per radial node: pi (rf[i+1]^2 - rf[i]^2)
  std::size_t fine_band_cells = 0;  // radial cells inside the Debye band

  std::size_t nr() const { return r.size(); }
  std::size_t nxi() const { return xi.size(); }
  std::size_t nodes() const { return r.size() * xi.size(); }
  std::size_t index(std::size_t i, std::size_t j) const {
    return j * r.size() + i;
  }
  double dxi_dual(std::size_t j) const { return xi_face[j + 1] - xi_face[j]; }
  double volume(std::size_t i, std::size_t j) const {
    return ring_area[i] * dxi_dual(j);
  }
  /// Lateral (radial-face) area at dual face i+1/2 for axial slot j.
  double radial_face_area(std::size_t iface, std::size_t j) const {
    return 2.0 * std::numbers::pi * r_face[iface] * dxi_dual(j);
  }
  double membrane_area(std::size_t j) const {
    return 2.0 * std::numbers::pi * r.front() * dxi_dual(j);
  }
  double outer_face_area(std::size_t j) const {
    return 2.0 * std::numbers::pi * r.back() * dxi_dual(j);
  }

  void finalize() {
    const std::size_t n = r.size();
    r_face.resize(n + 1);
    r_face[0] = r.front();
    r_face[n] = r.back();
    for (std::size_t i = 1; i < n; ++i) r_face[i] = 0.5 * (r[i - 1] + r[i]);
    ring_area.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      ring_area[i] = std::numbers::pi *
                     (r_face[i + 1] * r_face[i + 1] - r_face[i] * r_face[i]);
    const std::size_t m = xi.size();
    xi_face.resize(m + 1);
    xi_face[0] = xi.front();
    xi_face[m] = xi.back();
    for (std::size_t j = 1; j < m; ++j)
      xi_face[j] = 0.5 * (xi[j - 1] + xi[j]);
  }
};

struct MeshResolution {
  double dr_fine = 0.1e-9;
  double grade_factor = 1.25;
  double dr_max = 50e-9;
  double dxi = 0.8e-6;
  double window = 200e-6;       // axial extent
  std::size_t max_nodes = 500000;
  double xi_center = 0.0;       // window midpoint (AP peak sits at xi = 0)

  static MeshResolution from(const SolverParams& s, bool ci) {
    return {s.dr_fine, s.grade_factor, s.dr_max,
            ci ? s.dxi : s.dxi_full, ci ? s.ci_window : s.window,
            s.max_nodes, 0.0};
  }
};

/// Radial spacing <= dr_fine inside the Debye band, geometric growth
/// (capped at dr_max) outside it. Deterministic for fixed inputs.
inline AxisymmetricMesh build_mesh(const GeometryParams& geom,
                                   const MeshResolution& res) {
  geom.validate();
  if (!(res.dr_fine > 0.0))
    throw ConfigError("mesh: dr_fine must be > 0");
  if (!(res.grade_factor > 1.0))
    throw ConfigError("mesh: grade_factor must be > 1");

  AxisymmetricMesh mesh;
  const double R = geom.axon_radius;

  const std::size_t n_band =
      static_cast<std::size_t>(std::ceil(geom.debye_band / res.dr_fine));
  const double dr_band = geom.debye_band / n_band;
  mesh.r.push_back(R);
  for (std::size_t i = 1; i <= n_band; ++i) mesh.r.push_back(R + i * dr_band);
  mesh.fine_band_cells = n_band;

  double dr = dr_band;
  while (mesh.r.back() < geom.outer_radius) {
    dr = std::min(dr * res.grade_factor, res.dr_max);
    double next = mesh.r.back() + dr;
    if (next > geom.outer_radius - 0.25 * dr) next = geom.outer_radius;
    mesh.r.push_back(next);
    if (mesh.r.size() > res.max_nodes)
      throw ConfigError("mesh: radial node budget exceeded");
  }
  // land the last node exactly on the outer boundary
  mesh.r.back() = geom.outer_radius;

  const std::size_t n_xi_cells = std::max<std::size_t>(
      4, static_cast<std::size_t>(std::llround(res.window / res.dxi)));
  const double dxi = res.window / n_xi_cells;
  for (std::size_t j = 0; j <= n_xi_cells; ++j)
    mesh.xi.push_back(res.xi_center - 0.5 * res.window + j * dxi);

  if (mesh.nodes() > res.max_nodes)
    throw ConfigError("mesh: node budget exceeded (" +
                      std::to_string(mesh.nodes()) + " > " +
                      std::to_string(res.max_nodes) + ")");
  mesh.finalize();
  return mesh;
}

/// Uniform tensor mesh over an arbitrary box; used by the manufactured
/// solution studies.
inline AxisymmetricMesh build_uniform_mesh(double r0, double r1,
                                           std::size_t nr, double xi0,
                                           double xi1, std::size_t nxi) {
  AxisymmetricMesh mesh;
  for (std::size_t i = 0; i < nr; ++i)
    mesh.r.push_back(r0 + (r1 - r0) * i / (nr - 1));
  for (std::size_t j = 0; j < nxi; ++j)
    mesh.xi.push_back(xi0 + (xi1 - xi0) * j / (nxi - 1));
  mesh.finalize();
  return mesh;
}

struct MeshReport {
  std::size_t nr = 0, nxi = 0, nodes = 0;
  double dr_min = 0.0, dr_max = 0.0, dxi = 0.0;
  std::size_t fine_band_cells = 0;
};

inline MeshReport audit_mesh(const AxisymmetricMesh& mesh) {
  MeshReport rep;
  rep.nr = mesh.nr();
  rep.nxi = mesh.nxi();
  rep.nodes = mesh.nodes();
  rep.fine_band_cells = mesh.fine_band_cells;
  rep.dr_min = 1e300;
  for (std::size_t i = 1; i < mesh.nr(); ++i) {
    double d = mesh.r[i] - mesh.r[i - 1];
    rep.dr_min = std::min(rep.dr_min, d);
    rep.dr_max = std::max(rep.dr_max, d);
  }
  rep.dxi = mesh.xi.size() > 1 ? mesh.xi[1] - mesh.xi[0] : 0.0;
  return rep;
}

}  // namespace axonfield

#endif  // AXONFIELD_MESH_HPP
