#include <catch2/catch.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "axonfield/config_io.hpp"

using namespace axonfield;

namespace {

struct TempConfig {
  std::string path;
  explicit TempConfig(const std::string& body)
      : path("tmp_test_config_" + std::to_string(counter++) + ".cfg") {
    std::ofstream out(path);
    out << body;
  }
  ~TempConfig() { std::remove(path.c_str()); }
  static int counter;
};
int TempConfig::counter = 0;

}  // namespace

TEST_CASE("empty config file reproduces the defaults") {
  TempConfig f("");
  ModelConfig loaded = load_config(f.path);
  ModelConfig def = default_config();
  CHECK(loaded.geometry.axon_radius == def.geometry.axon_radius);
  CHECK(loaded.electrolyte.temperature == def.electrolyte.temperature);
  CHECK(loaded.hh.V_rest == def.hh.V_rest);
  CHECK(loaded.hh.V_Na == def.hh.V_Na);
  CHECK(loaded.bc.q_i0 == def.bc.q_i0);
}

TEST_CASE("missing config file is an error") {
  CHECK_THROWS_AS(load_config("definitely_not_here.cfg"), ConfigError);
}

TEST_CASE("identity override leaves the config unchanged") {
  TempConfig f("electrolyte.temperature_K = 310\n");
  ModelConfig loaded = load_config(f.path);
  ModelConfig def = default_config();
  CHECK(loaded.electrolyte.temperature == def.electrolyte.temperature);
  CHECK(loaded.hh.V_Na == def.hh.V_Na);
  CHECK(loaded.hh.V_K == def.hh.V_K);
  CHECK(loaded.bc.sigma_i0 == def.bc.sigma_i0);
}

TEST_CASE("degenerate geometry is rejected with the key name") {
  TempConfig f("geometry.axon_radius_nm = 0\n");
  try {
    load_config(f.path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("geometry.") != std::string::npos);
  }
}

TEST_CASE("malformed syntax reports the line number") {
  TempConfig f("# fine\nthis line has no equals\n");
  try {
    load_config(f.path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected") {
  TempConfig f("geometry.axon_radium_nm = 500\n");
  CHECK_THROWS_AS(load_config(f.path), ConfigError);
}

TEST_CASE("duplicate keys are rejected") {
  TempConfig f("bc.gamma = 1\nbc.gamma = 2\n");
  CHECK_THROWS_AS(load_config(f.path), ConfigError);
}

TEST_CASE("customary units convert to SI on load") {
  TempConfig f(
      "hh.g_Na_mScm2 = 100\n"
      "hh.C_m_uFcm2 = 1\n"
      "hh.V_rest_mV = -68\n"
      "geometry.axon_radius_nm = 500\n"
      "geometry.outer_radius_um = 1.5\n"
      "species.K.conc_internal_mmolL = 155\n");
  ModelConfig cfg = load_config(f.path);
  CHECK(cfg.hh.g_Na == Approx(1000.0));
  CHECK(cfg.hh.C_m == Approx(0.01));
  CHECK(cfg.hh.V_rest == Approx(-0.068));
  CHECK(cfg.geometry.axon_radius == Approx(5e-7));
  CHECK(cfg.geometry.outer_radius == Approx(1.5e-6));
  for (const auto& s : cfg.electrolyte.species)
    if (s.name == "K") CHECK(s.conc_internal == Approx(155.0));
}

TEST_CASE("q_i0 modes") {
  SECTION("explicit value wins") {
    TempConfig f("bc.q_i0_Cpm = -3e-10\n");
    ModelConfig cfg = load_config(f.path);
    CHECK(cfg.bc.q_i0 == Approx(-3e-10));
  }
  SECTION("formula mode uses the derived composition") {
    TempConfig f("bc.q_i0_mode = formula\n");
    ModelConfig cfg = load_config(f.path);
    CHECK(cfg.bc.q_i0 == Approx(resting_internal_charge(cfg)).epsilon(1e-14));
  }
  SECTION("bad mode is rejected") {
    TempConfig f("bc.q_i0_mode = guesswork\n");
    CHECK_THROWS_AS(load_config(f.path), ConfigError);
  }
}

TEST_CASE("external bulk neutrality is enforced on overrides") {
  TempConfig f("species.Na.conc_external_mmolL = 150\n");
  CHECK_THROWS_AS(load_config(f.path), ConfigError);
}

TEST_CASE("nernst overrides are honored") {
  TempConfig f("hh.V_Na_mV = 50\n");
  ModelConfig cfg = load_config(f.path);
  CHECK(cfg.hh.V_Na == Approx(0.050));
  CHECK(cfg.hh.V_K == Approx(default_config().hh.V_K));
}
