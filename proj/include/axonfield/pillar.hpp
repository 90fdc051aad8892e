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

#ifndef AXONFIELD_PILLAR_HPP
#define AXONFIELD_PILLAR_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "axonfield/band_matrix.hpp"
#include "axonfield/params.hpp"

namespace axonfield {

// Electric field transmitted into the diamond nanopillar. On-top contact has
// a closed-form fundamental-mode solution; on-side contact is solved
// numerically on a cylindrical grid. R_mem marks the contact plane; z and
// line coordinates below are measured from it.

/// First zero of the Bessel function J0, to double precision.
inline constexpr double kBesselJ0Zero1 = 2.404825557695773;

/// Scalar potential of the on-top fundamental mode,
///   V(r, z) = (d/k) E_m J0(r k/(d/2)) exp(-(k/(d/2)) z),
/// with z the depth below the contact plane (z = 0 at the membrane).
inline double potential_on_top(double r, double z, const PillarGeometry& g,
                               double E_m) {
  const double a = 0.5 * g.diameter;
  if (r < 0.0 || r > a)
    throw ConfigError("potential_on_top: r outside the pillar");
  if (z < 0.0)
    throw ConfigError("potential_on_top: z above the contact plane");
  const double k = kBesselJ0Zero1;
  return g.diameter / k * E_m * std::cyl_bessel_j(0.0, r * k / a) *
         std::exp(-(k / a) * z);
}

/// Axial field of the on-top mode, E_z = E_m J0(r k/(d/2)) exp(-(k/(d/2)) z);
/// on the axis the decay constant is 2k/d (~4.8/d).
inline double field_on_top(double r, double z, const PillarGeometry& g,
                           double E_m) {
  const double a = 0.5 * g.diameter;
  if (r < 0.0 || r > a)
    throw ConfigError("field_on_top: r outside the pillar");
  if (z < 0.0) throw ConfigError("field_on_top: z above the contact plane");
  const double k = kBesselJ0Zero1;
  return E_m * std::cyl_bessel_j(0.0, r * k / a) * std::exp(-(k / a) * z);
}

/// Axisymmetric Laplace solve of the on-top problem with the same
/// Neumann-at-tip / Dirichlet-sidewall conditions as the closed form;
/// provides the independent route for the analytic solution. Returns the
/// on-axis E_z at the requested depths.
inline std::vector<double> on_top_axis_field_numeric(
    const PillarGeometry& g, double E_m, const std::vector<double>& depths,
    std::size_t nr = 81, std::size_t nz = 401) {
  const double a = 0.5 * g.diameter;
  const double depth_total = std::min(g.height, 5.0 * g.diameter);
  const double dr = a / (nr - 1);
  const double dz = depth_total / (nz - 1);
  const double k = kBesselJ0Zero1;

  auto ring = [&](std::size_t i) {
    double r_lo = (i == 0) ? 0.0 : (i - 0.5) * dr;
    double r_hi = (i + 1 == nr) ? a : (i + 0.5) * dr;
    return std::numbers::pi * (r_hi * r_hi - r_lo * r_lo);
  };

  const std::size_t n = nr * nz;
  BandMatrix mat(n, nr, nr);
  std::vector<double> rhs(n, 0.0);
  for (std::size_t kz = 0; kz < nz; ++kz) {
    for (std::size_t i = 0; i < nr; ++i) {
      const std::size_t p = kz * nr + i;
      if (i == nr - 1 || kz == nz - 1) {
        mat.at(p, p) = 1.0;  // sidewall and deep end grounded
        continue;
      }
      double diag = 0.0;
      const double dz_dual = (kz == 0 || kz == nz - 1) ? 0.5 * dz : dz;
      if (i + 1 < nr) {
        double A = 2.0 * std::numbers::pi * ((i + 0.5) * dr) * dz_dual;
        mat.add(p, p + 1, A / dr);
        diag -= A / dr;
      }
      if (i > 0) {
        double A = 2.0 * std::numbers::pi * ((i - 0.5) * dr) * dz_dual;
        mat.add(p, p - 1, A / dr);
        diag -= A / dr;
      }
      if (kz + 1 < nz) {
        mat.add(p, p + nr, ring(i) / dz);
        diag -= ring(i) / dz;
      }
      if (kz > 0) {
        mat.add(p, p - nr, ring(i) / dz);
        diag -= ring(i) / dz;
      } else {
        rhs[p] = -E_m * std::cyl_bessel_j(0.0, i * dr * k / a) * ring(i);
      }
      mat.add(p, p, diag);
    }
  }
  mat.factorize();
  mat.solve(rhs);  // rhs now holds V

  std::vector<double> out(depths.size());
  for (std::size_t q = 0; q < depths.size(); ++q) {
    double z = depths[q];
    if (z < 0.0 || z > depth_total - 2.0 * dz)
      throw ConfigError("on_top_axis_field_numeric: depth outside the grid");
    double u = z / dz;
    std::size_t kz = std::min(static_cast<std::size_t>(u), nz - 3);
    double w = u - kz;
    auto ez_at = [&](std::size_t kk) {
      // second-order one-sided/central derivative of V along the axis
      if (kk == 0)
        return -(-1.5 * rhs[0] + 2.0 * rhs[nr] - 0.5 * rhs[2 * nr]) / dz;
      return -(rhs[(kk + 1) * nr] - rhs[(kk - 1) * nr]) / (2.0 * dz);
    };
    out[q] = (1.0 - w) * ez_at(kz) + w * ez_at(kz + 1);
  }
  return out;
}

/// On-side solution grid: cell-centered cylindrical coordinates over the
/// half domain theta in [0, pi] (the contact patch is centered on theta=0
/// and the problem is mirror symmetric).
struct PillarSideSolution {
  double a = 0.0, height = 0.0, patch_side = 0.0;
  std::size_t nr = 0, nth = 0, nz = 0;
  double dr = 0.0, dth = 0.0;
  std::vector<double> zc, zf;  // cell centers and faces (size nz, nz+1)
  std::vector<double> V;       // ((k*nr + i)*nth + j)
  int iterations = 0;

  std::size_t idx(std::size_t i, std::size_t j, std::size_t k) const {
    return (k * nr + i) * nth + j;
  }
  double rc(std::size_t i) const { return (i + 0.5) * dr; }
  double thc(std::size_t j) const { return (j + 0.5) * dth; }

  /// Trilinear interpolation of V at (r, theta, z) inside the cylinder.
  double interp_V(double r, double th, double z) const;
  /// |E| along the evaluation line: from the patch center inward along the
  /// surface normal through the axis; t is the distance from the contact
  /// surface.
  double field_on_line(double t) const;
  /// |grad V| at a cell center by one-sided/central differences.
  double field_magnitude(std::size_t i, std::size_t j, std::size_t k) const {
    auto dd = [](double fm, double fp, double h) { return (fp - fm) / h; };
    double er, et, ez;
    if (i == 0)
      er = dd(V[idx(0, j, k)], V[idx(1, j, k)], dr);
    else if (i + 1 == nr)
      er = dd(V[idx(i - 1, j, k)], V[idx(i, j, k)], dr);
    else
      er = dd(V[idx(i - 1, j, k)], V[idx(i + 1, j, k)], 2.0 * dr);
    const double rt = rc(i) * dth;
    if (j == 0)
      et = dd(V[idx(i, 0, k)], V[idx(i, 1, k)], rt);
    else if (j + 1 == nth)
      et = dd(V[idx(i, j - 1, k)], V[idx(i, j, k)], rt);
    else
      et = dd(V[idx(i, j - 1, k)], V[idx(i, j + 1, k)], 2.0 * rt);
    if (k == 0)
      ez = dd(V[idx(i, j, 0)], V[idx(i, j, 1)], zc[1] - zc[0]);
    else if (k + 1 == nz)
      ez = dd(V[idx(i, j, k - 1)], V[idx(i, j, k)], zc[k] - zc[k - 1]);
    else
      ez = dd(V[idx(i, j, k - 1)], V[idx(i, j, k + 1)], zc[k + 1] - zc[k - 1]);
    return std::sqrt(er * er + et * et + ez * ez);
  }
};

/// Laplace solve in the pillar for on-side contact: the square contact
/// patch (area = pi (d/2)^2, side sqrt(pi) d/2) conforms to the curved
/// sidewall at the tip and carries the Neumann field E_m; every other
/// surface is grounded. Line-SOR along theta handles the strong azimuthal
/// coupling near the axis.
inline PillarSideSolution solve_on_side(const PillarGeometry& g, double E_m,
                                        double grid_spacing,
                                        std::size_t max_cells = 3000000,
                                        double tol = 1e-8,
                                        int max_sweeps = 60000) {
  PillarSideSolution s;
  s.a = 0.5 * g.diameter;
  s.height = g.height;
  s.patch_side = g.side_patch_side();
  if (s.patch_side > g.height)
    throw ConfigError("solve_on_side: pillar shorter than the contact patch");

  s.nr = std::max<std::size_t>(8, std::llround(s.a / grid_spacing));
  s.dr = s.a / s.nr;
  s.nth = std::max<std::size_t>(
      16, std::llround(std::numbers::pi * s.a / grid_spacing));
  s.dth = std::numbers::pi / s.nth;

  // z faces: uniform `grid_spacing` across the patch band plus a margin,
  // geometric coarsening to the base below.
  const double fine_from = std::max(0.0, g.height - s.patch_side - 10.0 * grid_spacing);
  s.zf.push_back(g.height);
  double z = g.height, dz = grid_spacing;
  while (z > 0.0) {
    if (z <= fine_from) dz = std::min(dz * 1.3, 20.0 * grid_spacing);
    z -= dz;
    if (z < 0.25 * dz) z = 0.0;
    s.zf.push_back(z);
  }
  std::reverse(s.zf.begin(), s.zf.end());
  s.nz = s.zf.size() - 1;
  s.zc.resize(s.nz);
  for (std::size_t k = 0; k < s.nz; ++k)
    s.zc[k] = 0.5 * (s.zf[k] + s.zf[k + 1]);

  const std::size_t ncell = s.nr * s.nth * s.nz;
  if (ncell > max_cells)
    throw ConfigError("solve_on_side: grid of " + std::to_string(ncell) +
                      " cells exceeds the budget");

  const double th_patch = s.patch_side / (2.0 * s.a);  // half arc angle
  const double z_patch = g.height - s.patch_side;

  s.V.assign(ncell, 0.0);
  std::vector<double> rhs_line(s.nth), diag(s.nth), lower(s.nth),
      upper(s.nth), scratch(s.nth), sol_line(s.nth);

  // Precomputed per-(i,k) face conductances.
  auto dz_of = [&](std::size_t k) { return s.zf[k + 1] - s.zf[k]; };

  double bnorm2 = 0.0;
  {
    // norm of the Neumann load for the relative residual
    for (std::size_t k = 0; k < s.nz; ++k)
      for (std::size_t j = 0; j < s.nth; ++j)
        if (s.thc(j) <= th_patch && s.zc[k] >= z_patch) {
          double A = s.a * s.dth * dz_of(k);
          bnorm2 += (E_m * A) * (E_m * A);
        }
    if (bnorm2 == 0.0)
      bnorm2 = 1.0;  // E_m == 0: homogeneous problem, V stays zero
  }

  const double omega = 1.88;
  double res2 = 1e300;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    for (std::size_t k = 0; k < s.nz; ++k) {
      const double dzk = dz_of(k);
      for (std::size_t i = 0; i < s.nr; ++i) {
        const double r = s.rc(i);
        const double c_th = s.dr * dzk / (r * s.dth);
        const double c_rm = (i > 0) ? (i * s.dr) * s.dth * dzk / s.dr : 0.0;
        double c_rp = 0.0, dirich = 0.0;
        if (i + 1 < s.nr) {
          c_rp = ((i + 1) * s.dr) * s.dth * dzk / s.dr;
        }
        double c_zm = 0.0, c_zp = 0.0;
        if (k > 0)
          c_zm = r * s.dr * s.dth / (s.zc[k] - s.zc[k - 1]);
        else
          dirich += r * s.dr * s.dth / (s.zc[0] - s.zf[0]);  // base grounded
        if (k + 1 < s.nz)
          c_zp = r * s.dr * s.dth / (s.zc[k + 1] - s.zc[k]);
        else
          dirich += r * s.dr * s.dth / (s.zf[s.nz] - s.zc[s.nz - 1]);  // tip cap

        for (std::size_t j = 0; j < s.nth; ++j) {
          double rhs = 0.0;
          double dir = dirich;
          if (i + 1 == s.nr) {
            // outer surface: patch Neumann or grounded sidewall
            const double A = s.a * s.dth * dzk;
            if (s.thc(j) <= th_patch && s.zc[k] >= z_patch)
              rhs += E_m * A;
            else
              dir += A / (0.5 * s.dr);
          }
          if (c_rm > 0.0) rhs += c_rm * s.V[s.idx(i - 1, j, k)];
          if (c_rp > 0.0) rhs += c_rp * s.V[s.idx(i + 1, j, k)];
          if (c_zm > 0.0) rhs += c_zm * s.V[s.idx(i, j, k - 1)];
          if (c_zp > 0.0) rhs += c_zp * s.V[s.idx(i, j, k + 1)];
          rhs_line[j] = rhs;
          lower[j] = (j > 0) ? -c_th : 0.0;
          upper[j] = (j + 1 < s.nth) ? -c_th : 0.0;
          diag[j] = c_rm + c_rp + c_zm + c_zp + dir;
          if (j > 0) diag[j] += c_th;
          if (j + 1 < s.nth) diag[j] += c_th;
        }
        // Thomas solve of the theta line
        scratch[0] = upper[0] / diag[0];
        sol_line[0] = rhs_line[0] / diag[0];
        for (std::size_t j = 1; j < s.nth; ++j) {
          double m = diag[j] - lower[j] * scratch[j - 1];
          scratch[j] = upper[j] / m;
          sol_line[j] = (rhs_line[j] - lower[j] * sol_line[j - 1]) / m;
        }
        for (std::size_t j = s.nth - 1; j-- > 0;)
          sol_line[j] -= scratch[j] * sol_line[j + 1];
        for (std::size_t j = 0; j < s.nth; ++j) {
          double& v = s.V[s.idx(i, j, k)];
          v += omega * (sol_line[j] - v);
        }
      }
    }

    if (sweep % 25 == 24) {
      // true residual of the box equations
      res2 = 0.0;
      for (std::size_t k = 0; k < s.nz; ++k) {
        const double dzk = dz_of(k);
        for (std::size_t i = 0; i < s.nr; ++i) {
          const double r = s.rc(i);
          const double c_th = s.dr * dzk / (r * s.dth);
          for (std::size_t j = 0; j < s.nth; ++j) {
            const double vp = s.V[s.idx(i, j, k)];
            double acc = 0.0;
            if (i > 0)
              acc += (i * s.dr) * s.dth * dzk / s.dr *
                     (s.V[s.idx(i - 1, j, k)] - vp);
            if (i + 1 < s.nr)
              acc += ((i + 1) * s.dr) * s.dth * dzk / s.dr *
                     (s.V[s.idx(i + 1, j, k)] - vp);
            else {
              const double A = s.a * s.dth * dzk;
              if (s.thc(j) <= th_patch && s.zc[k] >= z_patch)
                acc += E_m * A;
              else
                acc += A / (0.5 * s.dr) * (0.0 - vp);
            }
            if (j > 0) acc += c_th * (s.V[s.idx(i, j - 1, k)] - vp);
            if (j + 1 < s.nth) acc += c_th * (s.V[s.idx(i, j + 1, k)] - vp);
            if (k > 0)
              acc += r * s.dr * s.dth / (s.zc[k] - s.zc[k - 1]) *
                     (s.V[s.idx(i, j, k - 1)] - vp);
            else
              acc += r * s.dr * s.dth / (s.zc[0] - s.zf[0]) * (0.0 - vp);
            if (k + 1 < s.nz)
              acc += r * s.dr * s.dth / (s.zc[k + 1] - s.zc[k]) *
                     (s.V[s.idx(i, j, k + 1)] - vp);
            else
              acc += r * s.dr * s.dth / (s.zf[s.nz] - s.zc[s.nz - 1]) *
                     (0.0 - vp);
            res2 += acc * acc;
          }
        }
      }
      if (res2 <= tol * tol * bnorm2) break;
    }
  }
  if (res2 > tol * tol * bnorm2)
    throw NumericalError("solve_on_side: no convergence after " +
                         std::to_string(sweep) + " sweeps");
  s.iterations = sweep + 1;
  return s;
}

inline double PillarSideSolution::interp_V(double r, double th,
                                           double z) const {
  if (r < 0.0) {
    r = -r;
    th = std::numbers::pi - th;
  }
  r = std::min(r, a - 1e-15);
  th = std::clamp(th, 0.0, std::numbers::pi);
  z = std::clamp(z, zf.front(), zf.back());
  auto clampi = [](double u, std::size_t n) {
    if (u < 0.0) u = 0.0;
    std::size_t q = static_cast<std::size_t>(u);
    return std::min(q, n - 2);
  };
  double ur = r / dr - 0.5;
  double ut = th / dth - 0.5;
  std::size_t i = clampi(ur, nr), j = clampi(ut, nth);
  double wr = std::clamp(ur - i, 0.0, 1.0), wt = std::clamp(ut - j, 0.0, 1.0);
  // z cells are graded: locate by bisection on centers
  std::size_t k = 0;
  while (k + 2 < nz && zc[k + 1] < z) ++k;
  double wz = std::clamp((z - zc[k]) / (zc[k + 1] - zc[k]), 0.0, 1.0);
  double out = 0.0;
  for (int dk = 0; dk < 2; ++dk)
    for (int di = 0; di < 2; ++di)
      for (int dj = 0; dj < 2; ++dj) {
        double w = (di ? wr : 1 - wr) * (dj ? wt : 1 - wt) * (dk ? wz : 1 - wz);
        out += w * V[idx(i + di, j + dj, k + dk)];
      }
  return out;
}

inline double PillarSideSolution::field_on_line(double t) const {
  // Points (x = a - t, y = 0, z = height - patch_side/2); the x axis is the
  // patch normal. |E| = sqrt(E_x^2 + E_z^2) on the symmetry plane.
  const double z0 = height - 0.5 * patch_side;
  const double x = a - t;  // interp_V reflects negative x through the axis
  const double hr = 0.5 * dr;
  const double hz = 0.5 * (zf.back() - zc[nz - 1]);
  double ex = -(interp_V(x + hr, 0.0, z0) - interp_V(x - hr, 0.0, z0)) /
              (2.0 * hr);
  double ez = -(interp_V(x, 0.0, z0 + hz) - interp_V(x, 0.0, z0 - hz)) /
              (2.0 * hz);
  return std::hypot(ex, ez);
}

/// Field magnitude at the NV evaluation point.
inline double field_at_nv(const PillarGeometry& g, double E_m) {
  return field_on_top(0.0, g.nv_depth, g, E_m);
}
inline double field_at_nv(const PillarGeometry& g,
                          const PillarSideSolution& s) {
  return s.field_on_line(g.nv_depth_side);
}

struct DetectabilityReport {
  std::string quantity;          // "electric" or "magnetic"
  double field_at_nv = 0.0;      // SI
  double effective_threshold = 0.0;
  bool detectable = false;
  double margin = 0.0;           // field / effective threshold
};

/// Threshold scaled by the collection gain through photon shot noise
/// (gain^exponent); detectable iff margin >= 1.
inline DetectabilityReport assess_detectability(double field,
                                                const SensorSpec& spec,
                                                const std::string& quantity) {
  spec.validate();
  DetectabilityReport rep;
  rep.quantity = quantity;
  rep.field_at_nv = field;
  const double base =
      (quantity == "magnetic") ? spec.b_threshold : spec.e_threshold;
  rep.effective_threshold =
      base / std::pow(spec.collection_gain, spec.sensitivity_exponent);
  rep.margin = std::abs(field) / rep.effective_threshold;
  rep.detectable = rep.margin >= 1.0;
  return rep;
}

}  // namespace axonfield

#endif  // AXONFIELD_PILLAR_HPP
