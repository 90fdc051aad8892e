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

#ifndef AXONFIELD_GROWTH_HPP
#define AXONFIELD_GROWTH_HPP

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "axonfield/constants.hpp"

namespace axonfield {

// Neurite ordering metric: the summed length of skeleton segments aligned
// (within an angular threshold, undirected) with the rows or columns of the
// pillar grid, over the total summed length.

struct Polyline {
  std::string id;
  std::vector<std::array<double, 2>> points;  // um

  void validate() const {
    if (points.size() < 2)
      throw ConfigError("polyline " + id + ": needs at least 2 points");
    for (std::size_t k = 1; k < points.size(); ++k)
      if (points[k] == points[k - 1])
        throw ConfigError("polyline " + id + ": consecutive duplicate point");
  }
};

struct GridAxes {
  std::array<double, 2> u{1.0, 0.0};
  std::array<double, 2> v{0.0, 1.0};

  void validate() const {
    auto nrm = [](const std::array<double, 2>& a) {
      return std::hypot(a[0], a[1]);
    };
    if (std::abs(nrm(u) - 1.0) > 1e-9 || std::abs(nrm(v) - 1.0) > 1e-9 ||
        std::abs(u[0] * v[0] + u[1] * v[1]) > 1e-9)
      throw ConfigError("growth axes must be orthonormal");
  }
};

inline constexpr double kAlignmentThreshold = std::numbers::pi / 36.0;

/// Sum of Euclidean segment lengths.
inline double path_length(const Polyline& p) {
  p.validate();
  double len = 0.0;
  for (std::size_t k = 1; k < p.points.size(); ++k)
    len += std::hypot(p.points[k][0] - p.points[k - 1][0],
                      p.points[k][1] - p.points[k - 1][1]);
  return len;
}

/// Summed length of segments whose tangent lies within `threshold` of
/// +-u or +-v (undirected alignment; the boundary angle counts as aligned).
inline double ordered_length(const Polyline& p,
                             double threshold = kAlignmentThreshold,
                             const GridAxes& axes = {}) {
  p.validate();
  axes.validate();
  if (!(threshold > 0.0) || threshold >= std::numbers::pi / 4.0)
    throw ConfigError("ordered_length: threshold must be in (0, pi/4)");
  double len = 0.0;
  for (std::size_t k = 1; k < p.points.size(); ++k) {
    const double tx = p.points[k][0] - p.points[k - 1][0];
    const double ty = p.points[k][1] - p.points[k - 1][1];
    const double seg = std::hypot(tx, ty);
    const double cu = std::abs(tx * axes.u[0] + ty * axes.u[1]) / seg;
    const double cv = std::abs(tx * axes.v[0] + ty * axes.v[1]) / seg;
    const double angle = std::acos(std::min(1.0, std::max(cu, cv)));
    if (angle <= threshold) len += seg;
  }
  return len;
}

struct GrowthReport {
  double total_length = 0.0;    // T_i, um
  double ordered_length = 0.0;  // T_o, um
  double ratio = 0.0;           // T_o / T_i
  struct PerPath {
    std::string id;
    double length = 0.0, ordered = 0.0;
  };
  std::vector<PerPath> per_path;
};

inline GrowthReport growth_report(const std::vector<Polyline>& paths,
                                  double threshold = kAlignmentThreshold,
                                  const GridAxes& axes = {}) {
  if (paths.empty())
    throw ConfigError("growth_report: no paths");
  GrowthReport rep;
  for (const auto& p : paths) {
    double len = path_length(p);
    double ord = ordered_length(p, threshold, axes);
    rep.per_path.push_back({p.id, len, ord});
    rep.total_length += len;
    rep.ordered_length += ord;
  }
  if (!(rep.total_length > 0.0))
    throw ConfigError("growth_report: all paths degenerate");
  rep.ratio = rep.ordered_length / rep.total_length;
  return rep;
}

/// CSV input: header then rows of `path_id,x_um,y_um`; points of a path are
/// consecutive rows sharing the id.
inline std::vector<Polyline> read_paths_csv(std::istream& in) {
  std::vector<Polyline> paths;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (!header_seen) {
      header_seen = true;  // first nonempty row is the header
      continue;
    }
    std::istringstream row(line);
    std::string id, xs, ys, extra;
    if (!std::getline(row, id, ',') || !std::getline(row, xs, ',') ||
        !std::getline(row, ys, ','))
      throw ConfigError("paths csv line " + std::to_string(lineno) +
                        ": expected path_id,x_um,y_um");
    if (std::getline(row, extra, ','))
      throw ConfigError("paths csv line " + std::to_string(lineno) +
                        ": too many columns");
    double x, y;
    try {
      std::size_t px = 0, py = 0;
      x = std::stod(xs, &px);
      y = std::stod(ys, &py);
      while (py < ys.size() && (ys[py] == '\r' || ys[py] == ' ')) ++py;
      if (px != xs.size() || py != ys.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("paths csv line " + std::to_string(lineno) +
                        ": malformed number");
    }
    if (paths.empty() || paths.back().id != id) {
      paths.push_back(Polyline{id, {}});
    }
    paths.back().points.push_back({x, y});
  }
  if (paths.empty())
    throw ConfigError("paths csv: no data rows");
  for (const auto& p : paths) p.validate();
  return paths;
}

inline std::vector<Polyline> read_paths_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("paths csv not found: " + path);
  return read_paths_csv(in);
}

}  // namespace axonfield

#endif  // AXONFIELD_GROWTH_HPP
