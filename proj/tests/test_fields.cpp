#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "axonfield/fields.hpp"
#include "axonfield/mesh.hpp"
#include "axonfield/params.hpp"

using namespace axonfield;

namespace {

FieldSolution synthetic_solution() {
  FieldSolution sol;
  sol.mesh = build_uniform_mesh(5e-7, 1.5e-6, 21, -4e-6, 4e-6, 17);
  sol.coeffs = TransportCoeffs::from(default_config());
  const std::size_t n = sol.mesh.nodes();
  sol.V.assign(n, 0.0);
  sol.c_pos.assign(n, sol.coeffs.c_b_pos);
  sol.c_neg.assign(n, sol.coeffs.c_b_neg);
  sol.profiles.dVdr_R.assign(sol.mesh.nxi(), 0.0);
  sol.profiles.flux_pos.assign(sol.mesh.nxi(), 0.0);
  return sol;
}

}  // namespace

TEST_CASE("a linear potential produces an exact uniform field") {
  FieldSolution sol = synthetic_solution();
  const auto& m = sol.mesh;
  const double a = 250.0;  // V/m along xi
  const double b = 90.0;   // V/m along r
  for (std::size_t j = 0; j < m.nxi(); ++j)
    for (std::size_t i = 0; i < m.nr(); ++i)
      sol.V[m.index(i, j)] = a * m.xi[j] + b * m.r[i];

  std::vector<double> er, exi;
  electric_field(sol, er, exi);
  for (std::size_t k = 0; k < er.size(); ++k) {
    CHECK(exi[k] == Approx(-a).epsilon(1e-12));
    CHECK(er[k] == Approx(-b).epsilon(1e-12));
  }
}

TEST_CASE("charge density is F times the carrier imbalance") {
  FieldSolution sol = synthetic_solution();
  const auto& m = sol.mesh;
  for (std::size_t k = 0; k < sol.c_pos.size(); ++k) {
    sol.c_pos[k] = 149.0 + 0.001 * k;
    sol.c_neg[k] = 149.0;
  }
  std::vector<double> rho = charge_density(sol);
  for (std::size_t k = 0; k < rho.size(); ++k)
    CHECK(rho[k] ==
          sol.coeffs.faraday * (sol.c_pos[k] - sol.c_neg[k]));

  SECTION("balanced carriers carry no charge") {
    for (std::size_t k = 0; k < sol.c_pos.size(); ++k)
      sol.c_neg[k] = sol.c_pos[k];
    rho = charge_density(sol);
    for (double x : rho) CHECK(x == 0.0);
  }
  (void)m;
}

TEST_CASE("radial profile extraction") {
  FieldSolution sol = synthetic_solution();
  const auto& m = sol.mesh;
  std::vector<double> field(m.nodes());
  for (std::size_t j = 0; j < m.nxi(); ++j)
    for (std::size_t i = 0; i < m.nr(); ++i)
      field[m.index(i, j)] = 100.0 * j + i;

  SECTION("nearest column is selected and endpoints are nodal values") {
    std::vector<double> prof = radial_profile(m, field, m.xi[5] + 1e-9);
    REQUIRE(prof.size() == m.nr());
    CHECK(prof.front() == field[m.index(0, 5)]);
    CHECK(prof.back() == field[m.index(m.nr() - 1, 5)]);
  }
  SECTION("a constant field gives a constant profile") {
    std::vector<double> flat(m.nodes(), 7.25);
    std::vector<double> prof = radial_profile(m, flat, 0.0);
    for (double x : prof) CHECK(x == 7.25);
  }
  SECTION("xi outside the mesh is an error") {
    CHECK_THROWS_AS(radial_profile(m, field, 1.0), ConfigError);
  }
}
