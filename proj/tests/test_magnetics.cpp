#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "axonfield/magnetics.hpp"
#include "axonfield/mesh.hpp"

using namespace axonfield;

namespace {

AxisymmetricMesh simple_mesh() {
  return build_uniform_mesh(5e-7, 1.5e-6, 51, -5e-6, 5e-6, 11);
}

}  // namespace

TEST_CASE("no external current gives a pure 1/r continuation") {
  AxisymmetricMesh mesh = simple_mesh();
  std::vector<double> jxi(mesh.nodes(), 0.0);
  std::vector<double> bm(mesh.nxi());
  for (std::size_t j = 0; j < mesh.nxi(); ++j) bm[j] = 1e-9 * (j + 1);
  MagneticField b = magnetic_field(mesh, jxi, bm, 1.25663706212e-6);
  const double R = mesh.r.front();
  for (std::size_t j = 0; j < mesh.nxi(); ++j)
    for (std::size_t i = 0; i < mesh.nr(); ++i)
      CHECK(b.B_phi[mesh.index(i, j)] ==
            Approx(bm[j] * R / mesh.r[i]).epsilon(1e-13));
}

TEST_CASE("ampere consistency against an independent quadrature") {
  AxisymmetricMesh mesh = simple_mesh();
  const double mu0 = 1.25663706212e-6;
  std::vector<double> jxi(mesh.nodes());
  for (std::size_t j = 0; j < mesh.nxi(); ++j)
    for (std::size_t i = 0; i < mesh.nr(); ++i)
      jxi[mesh.index(i, j)] =
          0.1 * std::exp(-(mesh.r[i] - 5e-7) / 3e-7) *
          std::cos(mesh.xi[j] / 4e-6);
  std::vector<double> bm(mesh.nxi(), 0.8e-9);
  MagneticField b = magnetic_field(mesh, jxi, bm, mu0);

  const double R = mesh.r.front();
  for (std::size_t j = 0; j < mesh.nxi(); ++j) {
    for (std::size_t i = 1; i < mesh.nr(); ++i) {
      // enclosed external axial current, accumulated ring by ring
      double enclosed = 0.0;
      for (std::size_t q = 1; q <= i; ++q) {
        double dr = mesh.r[q] - mesh.r[q - 1];
        enclosed += 0.5 * dr *
                    (mesh.r[q - 1] * jxi[mesh.index(q - 1, j)] +
                     mesh.r[q] * jxi[mesh.index(q, j)]) *
                    2.0 * std::numbers::pi;
      }
      double lhs = mesh.r[i] * b.B_phi[mesh.index(i, j)] - R * bm[j];
      double rhs = mu0 * enclosed / (2.0 * std::numbers::pi);
      CHECK(lhs == Approx(rhs).epsilon(1e-6).margin(1e-22));
    }
  }
}

TEST_CASE("joint scaling of the sources scales the field exactly") {
  AxisymmetricMesh mesh = simple_mesh();
  const double mu0 = 1.25663706212e-6;
  std::vector<double> jxi(mesh.nodes());
  for (std::size_t k = 0; k < jxi.size(); ++k)
    jxi[k] = 0.05 * std::sin(k * 0.1);
  std::vector<double> bm(mesh.nxi(), 0.5e-9);
  MagneticField b1 = magnetic_field(mesh, jxi, bm, mu0);
  for (auto& x : jxi) x *= 2.0;
  for (auto& x : bm) x *= 2.0;
  MagneticField b2 = magnetic_field(mesh, jxi, bm, mu0);
  for (std::size_t k = 0; k < b1.B_phi.size(); ++k)
    CHECK(b2.B_phi[k] == 2.0 * b1.B_phi[k]);
}

TEST_CASE("inverse-r fit") {
  std::vector<double> r, B;
  for (int i = 0; i < 40; ++i) {
    r.push_back(5e-7 + i * 2.5e-8);
    B.push_back(7e-16 / r.back());
  }
  SECTION("exact model recovers the coefficient") {
    InverseRFit fit = fit_inverse_r(r, B, 5e-7, 1.5e-6);
    CHECK(fit.coefficient == Approx(7e-16).epsilon(1e-13));
    CHECK(fit.rms_residual < 1e-12);
  }
  SECTION("a constant field cannot be fit by 1/r") {
    std::vector<double> Bc(r.size(), 1e-9);
    InverseRFit fit = fit_inverse_r(r, Bc, 5e-7, 1.5e-6);
    CHECK(fit.rms_residual > 0.1);
  }
  SECTION("empty and thin ranges are rejected") {
    CHECK_THROWS_AS(fit_inverse_r(r, B, 2e-6, 3e-6), ConfigError);
    CHECK_THROWS_AS(fit_inverse_r(r, B, 5e-7, 5.5e-7), ConfigError);
  }
}
