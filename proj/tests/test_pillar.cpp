#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "axonfield/params.hpp"
#include "axonfield/pillar.hpp"

using namespace axonfield;

namespace {
PillarGeometry stock_pillar() {
  PillarGeometry g;
  g.diameter = 200e-9;
  g.height = 1e-6;
  g.nv_depth = 5e-9;
  g.nv_depth_side = 100e-9;
  return g;
}
constexpr double kEm = 4.54e7;  // V/m
}  // namespace

TEST_CASE("contact area is mode independent") {
  PillarGeometry g = stock_pillar();
  CHECK(g.contact_area() ==
        Approx(std::numbers::pi * 100e-9 * 100e-9).epsilon(1e-14));
  double side = g.side_patch_side();
  CHECK(side * side == Approx(g.contact_area()).epsilon(1e-14));
  CHECK(side == Approx(std::sqrt(std::numbers::pi) * 100e-9).epsilon(1e-14));
}

TEST_CASE("on-top potential anchors") {
  PillarGeometry g = stock_pillar();
  CHECK(potential_on_top(0.0, 0.0, g, kEm) ==
        Approx(g.diameter / kBesselJ0Zero1 * kEm).epsilon(1e-14));
  for (double z : {0.0, 20e-9, 100e-9})
    CHECK(std::abs(potential_on_top(0.5 * g.diameter, z, g, kEm)) < 1e-12);

  // e-fold depth (d/2)/k of about 41.6 nm
  double v0 = potential_on_top(0.0, 0.0, g, kEm);
  double zf = (0.5 * g.diameter) / kBesselJ0Zero1;
  CHECK(zf == Approx(41.58e-9).epsilon(1e-3));
  CHECK(potential_on_top(0.0, zf, g, kEm) ==
        Approx(v0 / std::numbers::e).epsilon(1e-12));

  CHECK_THROWS_AS(potential_on_top(1.2 * g.diameter, 0.0, g, kEm),
                  ConfigError);
}

TEST_CASE("on-top field anchors") {
  PillarGeometry g = stock_pillar();
  CHECK(field_on_top(0.0, 0.0, g, kEm) == Approx(kEm).epsilon(1e-14));
  // J0 at its tabulated zero is ~5e-17, so the rim field is E_m * 5e-17
  CHECK(std::abs(field_on_top(0.5 * g.diameter, 30e-9, g, kEm)) < 1e-14 * kEm);

  double e5 = field_on_top(0.0, 5e-9, g, kEm);
  CHECK(e5 == Approx(kEm * std::exp(-0.12024127788)).epsilon(1e-10));
  CHECK(e5 == Approx(4.0257e7).epsilon(1e-3));
  CHECK(e5 == Approx(3.8e7).epsilon(0.15));  // the reported value at 5 nm
}

TEST_CASE("fitted axial decay constant equals 2k/d within 1 percent") {
  PillarGeometry g = stock_pillar();
  // log-linear regression over one decay length
  const double L = g.diameter / 4.8;
  std::vector<double> z, loge;
  for (int q = 0; q <= 32; ++q) {
    z.push_back(q * L / 32.0);
    loge.push_back(std::log(field_on_top(0.0, z.back(), g, kEm)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t q = 0; q < z.size(); ++q) {
    sx += z[q];
    sy += loge[q];
    sxx += z[q] * z[q];
    sxy += z[q] * loge[q];
  }
  double n = z.size();
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(-slope == Approx(2.0 * kBesselJ0Zero1 / g.diameter).epsilon(0.01));
}

TEST_CASE("analytic on-top field matches the numeric Laplace route",
          "[slow]") {
  PillarGeometry g = stock_pillar();
  std::vector<double> depths;
  for (int q = 0; q <= 20; ++q) depths.push_back(q * g.diameter / 20.0);
  std::vector<double> numeric = on_top_axis_field_numeric(g, kEm, depths);
  for (std::size_t q = 0; q < depths.size(); ++q) {
    double analytic = field_on_top(0.0, depths[q], g, kEm);
    CHECK(numeric[q] == Approx(analytic).epsilon(0.02));
  }
}

TEST_CASE("on-side solve basics", "[slow]") {
  PillarGeometry g = stock_pillar();

  SECTION("no drive, no field") {
    PillarSideSolution s = solve_on_side(g, 0.0, 8e-9);
    for (double v : s.V) CHECK(v == 0.0);
  }

  SECTION("linearity and the on-side/on-top comparison") {
    PillarSideSolution s1 = solve_on_side(g, kEm, 5e-9);
    PillarSideSolution s2 = solve_on_side(g, 2.0 * kEm, 5e-9);
    bool exact_double = true;
    for (std::size_t q = 0; q < s1.V.size(); ++q)
      exact_double = exact_double && s2.V[q] == 2.0 * s1.V[q];
    CHECK(exact_double);

    // curvature focuses the on-side field above the on-top result at equal
    // distance from the contact
    for (double t : {20e-9, 50e-9, 100e-9}) {
      double side = s1.field_on_line(t);
      double top = field_on_top(0.0, t, g, kEm);
      CHECK(side > top);
    }
  }

  SECTION("budget guard") {
    CHECK_THROWS_AS(solve_on_side(g, kEm, 0.2e-9), ConfigError);
  }
}

TEST_CASE("field at the NV evaluation point") {
  PillarGeometry g = stock_pillar();
  CHECK(field_at_nv(g, kEm) == field_on_top(0.0, g.nv_depth, g, kEm));
  g.nv_depth = 1e-18;
  CHECK(field_at_nv(g, kEm) == Approx(kEm).epsilon(1e-9));
}

TEST_CASE("grid interpolation reproduces nodal values", "[slow]") {
  PillarGeometry g = stock_pillar();
  PillarSideSolution s = solve_on_side(g, kEm, 10e-9);
  for (std::size_t k : {s.nz / 2, s.nz - 2}) {
    for (std::size_t i : {std::size_t(1), s.nr / 2}) {
      double v = s.interp_V(s.rc(i), s.thc(3), s.zc[k]);
      CHECK(v == Approx(s.V[s.idx(i, 3, k)]).margin(1e-18));
    }
  }
}

TEST_CASE("detectability thresholds and margins") {
  SensorSpec spec;  // 2.8e6 V/m, 1.26 uT, gain 5, exponent 0.5

  SECTION("sub-nanotesla signal stays undetectable at gain 5") {
    DetectabilityReport r = assess_detectability(0.95e-9, spec, "magnetic");
    CHECK_FALSE(r.detectable);
    CHECK(r.margin == Approx(1.7e-3).epsilon(0.02));
    CHECK(r.effective_threshold ==
          Approx(1.26e-6 / std::sqrt(5.0)).epsilon(1e-12));
  }
  SECTION("tens of MV/m electric field is detectable") {
    SensorSpec raw = spec;
    raw.collection_gain = 1.0;
    DetectabilityReport r = assess_detectability(3.8e7, raw, "electric");
    CHECK(r.detectable);
    CHECK(r.margin == Approx(13.57).epsilon(0.01));
  }
  SECTION("field equal to the threshold counts as detectable") {
    SensorSpec raw = spec;
    raw.collection_gain = 1.0;
    DetectabilityReport r =
        assess_detectability(raw.e_threshold, raw, "electric");
    CHECK(r.detectable);
    CHECK(r.margin == Approx(1.0));
  }
  SECTION("monotone in the field") {
    bool was_detectable = false;
    for (double f = 1e5; f < 1e9; f *= 1.7) {
      DetectabilityReport r = assess_detectability(f, spec, "electric");
      CHECK((!was_detectable || r.detectable));
      was_detectable = r.detectable;
    }
  }
  SECTION("gain 5 maps to about 2.24x sensitivity") {
    DetectabilityReport r = assess_detectability(1.0, spec, "electric");
    CHECK(spec.e_threshold / r.effective_threshold ==
          Approx(2.2360679).epsilon(1e-6));
  }
}
