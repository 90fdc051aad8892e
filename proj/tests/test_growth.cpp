#include <catch2/catch.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "axonfield/growth.hpp"

using namespace axonfield;

namespace {

Polyline segment(double x0, double y0, double x1, double y1) {
  return Polyline{"p", {{x0, y0}, {x1, y1}}};
}

Polyline random_polyline(std::mt19937& rng, int segments) {
  std::uniform_real_distribution<double> step(-10.0, 10.0);
  Polyline p{"r", {{0.0, 0.0}}};
  for (int k = 0; k < segments; ++k) {
    double dx = step(rng), dy = step(rng);
    if (dx == 0.0 && dy == 0.0) dx = 1.0;
    p.points.push_back({p.points.back()[0] + dx, p.points.back()[1] + dy});
  }
  return p;
}

}  // namespace

TEST_CASE("path length") {
  CHECK(path_length(segment(0, 0, 10, 0)) == Approx(10.0));
  CHECK(path_length(segment(0, 0, 3, 4)) == Approx(5.0));
  Polyline square{"sq", {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}};
  CHECK(path_length(square) == Approx(4.0));

  Polyline bad{"b", {{0, 0}}};
  CHECK_THROWS_AS(path_length(bad), ConfigError);
  Polyline dup{"d", {{0, 0}, {0, 0}, {1, 0}}};
  CHECK_THROWS_AS(path_length(dup), ConfigError);
}

TEST_CASE("ordered length angle gate") {
  CHECK(ordered_length(segment(0, 0, 10, 0)) == Approx(10.0));
  CHECK(ordered_length(segment(0, 0, 5, 5)) == 0.0);

  const double rad4 = 4.0 * std::numbers::pi / 180.0;
  const double rad6 = 6.0 * std::numbers::pi / 180.0;
  CHECK(ordered_length(segment(0, 0, 10 * std::cos(rad4),
                               10 * std::sin(rad4))) == Approx(10.0));
  CHECK(ordered_length(segment(0, 0, 10 * std::cos(rad6),
                               10 * std::sin(rad6))) == 0.0);

  SECTION("negative axis direction counts as aligned") {
    CHECK(ordered_length(segment(0, 0, -10, 0)) == Approx(10.0));
    CHECK(ordered_length(segment(0, 0, 0, -7)) == Approx(7.0));
  }
  SECTION("threshold domain") {
    CHECK_THROWS_AS(ordered_length(segment(0, 0, 1, 0), 1.0), ConfigError);
    CHECK_THROWS_AS(ordered_length(segment(0, 0, 1, 0), 0.0), ConfigError);
  }
}

TEST_CASE("growth report reproduces the reference patch totals") {
  // Two paths standing in for the patch with T_i = 3014.8 um and
  // T_o = 1148.4 um: one aligned, one at 45 degrees.
  std::vector<Polyline> paths = {
      Polyline{"aligned", {{0, 0}, {1148.4, 0}}},
      Polyline{"diag",
               {{0, 0},
                {(3014.8 - 1148.4) / std::sqrt(2.0),
                 (3014.8 - 1148.4) / std::sqrt(2.0)}}},
  };
  GrowthReport rep = growth_report(paths);
  CHECK(rep.total_length == Approx(3014.8).epsilon(1e-9));
  CHECK(rep.ordered_length == Approx(1148.4).epsilon(1e-9));
  CHECK(100.0 * rep.ratio == Approx(38.1).margin(0.1));
  REQUIRE(rep.per_path.size() == 2);
  CHECK(rep.per_path[0].ordered == Approx(1148.4));
  CHECK(rep.per_path[1].ordered == 0.0);
}

TEST_CASE("growth report degenerate inputs") {
  CHECK_THROWS_AS(growth_report({}), ConfigError);
  std::vector<Polyline> fully_aligned = {segment(0, 0, 3, 0),
                                         segment(0, 0, 0, 9)};
  CHECK(growth_report(fully_aligned).ratio == Approx(1.0));
}

TEST_CASE("joint rotation of paths and axes changes nothing") {
  std::mt19937 rng(7);
  std::vector<Polyline> paths;
  for (int q = 0; q < 12; ++q) paths.push_back(random_polyline(rng, 20));
  GrowthReport base = growth_report(paths);

  const double ang = 0.37;
  GridAxes rotated{{std::cos(ang), std::sin(ang)},
                   {-std::sin(ang), std::cos(ang)}};
  std::vector<Polyline> rotated_paths = paths;
  for (auto& p : rotated_paths)
    for (auto& pt : p.points) {
      double x = pt[0] * std::cos(ang) - pt[1] * std::sin(ang);
      double y = pt[0] * std::sin(ang) + pt[1] * std::cos(ang);
      pt = {x, y};
    }
  GrowthReport rot = growth_report(rotated_paths, kAlignmentThreshold,
                                   rotated);
  CHECK(rot.total_length == Approx(base.total_length).epsilon(1e-12));
  CHECK(rot.ordered_length == Approx(base.ordered_length).epsilon(1e-12));
}

TEST_CASE("property suite on random polylines") {
  std::mt19937 rng(42);
  double worst_rel = 0.0;
  bool reversal_ok = true, monotone_ok = true;

  for (int trial = 0; trial < 1000; ++trial) {
    Polyline p = random_polyline(rng, 50);

    // brute-force per-segment oracle with an independent angle computation
    double expect = 0.0;
    for (std::size_t k = 1; k < p.points.size(); ++k) {
      double dx = p.points[k][0] - p.points[k - 1][0];
      double dy = p.points[k][1] - p.points[k - 1][1];
      double theta = std::atan2(dy, dx);  // (-pi, pi]
      double best = 1e9;
      for (double axis : {0.0, std::numbers::pi / 2.0, std::numbers::pi,
                          -std::numbers::pi / 2.0}) {
        double d = std::abs(theta - axis);
        if (d > std::numbers::pi) d = 2.0 * std::numbers::pi - d;
        best = std::min(best, d);
      }
      if (best <= kAlignmentThreshold) expect += std::hypot(dx, dy);
    }
    double got = ordered_length(p);
    double rel = std::abs(got - expect) / std::max(1e-300, std::abs(expect));
    if (expect == 0.0) rel = std::abs(got);
    worst_rel = std::max(worst_rel, rel);

    // reversal invariance (summation order flips, so allow roundoff)
    Polyline rev = p;
    std::reverse(rev.points.begin(), rev.points.end());
    auto close = [](double x, double y) {
      return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), 1.0);
    };
    reversal_ok = reversal_ok && close(ordered_length(rev), got) &&
                  close(path_length(rev), path_length(p));

    // monotone in the threshold
    double tighter = ordered_length(p, 0.5 * kAlignmentThreshold);
    double looser = ordered_length(p, 1.5 * kAlignmentThreshold);
    monotone_ok = monotone_ok && tighter <= got && got <= looser;
  }
  CHECK(worst_rel < 1e-12);
  CHECK(reversal_ok);
  CHECK(monotone_ok);
}

TEST_CASE("additivity over concatenated path lists") {
  std::mt19937 rng(3);
  std::vector<Polyline> a, b, both;
  for (int q = 0; q < 5; ++q) a.push_back(random_polyline(rng, 15));
  for (int q = 0; q < 7; ++q) b.push_back(random_polyline(rng, 15));
  both = a;
  both.insert(both.end(), b.begin(), b.end());
  GrowthReport ra = growth_report(a), rb = growth_report(b),
               rboth = growth_report(both);
  CHECK(rboth.total_length ==
        Approx(ra.total_length + rb.total_length).epsilon(1e-13));
  CHECK(rboth.ordered_length ==
        Approx(ra.ordered_length + rb.ordered_length).epsilon(1e-13));
}

TEST_CASE("paths csv ingestion") {
  SECTION("well-formed input") {
    std::istringstream in(
        "path_id,x_um,y_um\n"
        "a,0,0\n"
        "a,10,0\n"
        "b,0,0\n"
        "b,3,4\n");
    auto paths = read_paths_csv(in);
    REQUIRE(paths.size() == 2);
    CHECK(path_length(paths[0]) == Approx(10.0));
    CHECK(path_length(paths[1]) == Approx(5.0));
  }
  SECTION("empty file") {
    std::istringstream in("");
    CHECK_THROWS_AS(read_paths_csv(in), ConfigError);
  }
  SECTION("malformed row names the line") {
    std::istringstream in("path_id,x_um,y_um\na,0,0\na,oops,3\n");
    try {
      read_paths_csv(in);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
}
