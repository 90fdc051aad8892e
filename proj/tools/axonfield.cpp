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

// Batch driver: hh -> pnp -> magnetics -> pillar -> detectability, plus the
// standalone growth subcommand. Exit codes: 0 ok, 2 usage/config error,
// 3 numerical failure, 4 solver non-convergence (report still written).

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "axonfield/config_io.hpp"
#include "axonfield/csv.hpp"
#include "axonfield/fields.hpp"
#include "axonfield/growth.hpp"
#include "axonfield/hh.hpp"
#include "axonfield/magnetics.hpp"
#include "axonfield/mesh.hpp"
#include "axonfield/pillar.hpp"
#include "axonfield/pnp.hpp"
#include "axonfield/report.hpp"
#include "axonfield/wave.hpp"

namespace {

using namespace axonfield;
using nlohmann::json;
namespace fs = std::filesystem;

struct Run {
  ModelConfig cfg;
  fs::path out;
  json report;
  std::vector<std::string> artifacts;
  std::map<std::string, double> timings;

  explicit Run(const ModelConfig& c, const std::string& out_dir,
               const std::string& subcommand)
      : cfg(c), out(out_dir) {
    fs::create_directories(out);
    report["schema_version"] = 1;
    report["subcommand"] = subcommand;
    report["config"] = config_snapshot(cfg);
  }

  std::string path(const std::string& name) const {
    return (out / name).string();
  }
  void record(const std::string& name) { artifacts.push_back(name); }

  void finish(int exit_code) {
    json arts = json::array();
    for (const auto& name : artifacts) {
      const std::string p = path(name);
      arts.push_back({{"path", name},
                      {"bytes", (std::int64_t)fs::file_size(p)},
                      {"fnv1a64", fnv1a64_file(p)}});
    }
    report["artifacts"] = arts;
    json t;
    for (const auto& [k, v] : timings) t[k] = v;
    report["timings_s"] = t;
    report["exit_code"] = exit_code;
    validate_run_report(report);
    std::ofstream f(path("run_report.json"), std::ios::binary);
    f << report.dump(2) << "\n";
    // manifest self-check: every artifact must still match its hash
    for (const auto& a : report["artifacts"])
      if (fnv1a64_file(path(a["path"])) != a["fnv1a64"])
        throw NumericalError("artifact changed during the run: " +
                             a["path"].get<std::string>());
  }
};

class StageTimer {
 public:
  StageTimer(Run& run, std::string name)
      : run_(run), name_(std::move(name)),
        t0_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    auto dt = std::chrono::steady_clock::now() - t0_;
    run_.timings[name_] =
        std::chrono::duration_cast<std::chrono::duration<double>>(dt).count();
  }

 private:
  Run& run_;
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
};

struct HHOutputs {
  HHTimeSeries series;
  MembraneWave wave;
};

HHOutputs stage_hh(Run& run, bool write_files) {
  StageTimer timer(run, "hh");
  HHOutputs out;
  out.series = integrate_hh(run.cfg.hh, run.cfg.hh.t_end, run.cfg.hh.dt);
  out.wave = build_membrane_wave(run.cfg, out.series);

  if (write_files) {
    {
      CsvWriter csv(run.path("hh_timeseries.csv"),
                    {"t_s", "V_V", "m", "h", "n", "INa_Apm2", "IK_Apm2"});
      for (std::size_t k = 0; k < out.series.t.size(); ++k)
        csv.row({out.series.t[k], out.series.V[k], out.series.gating[k].m,
                 out.series.gating[k].h, out.series.gating[k].n,
                 out.series.I_Na[k], out.series.I_K[k]});
      run.record("hh_timeseries.csv");
    }
    {
      CsvWriter csv(run.path("membrane_wave.csv"),
                    {"xi_m", "V_V", "Ir_Apm2", "Em_Vpm", "Bm_T",
                     "fluxpos_molpm2s"});
      for (std::size_t k = 0; k < out.wave.xi.size(); ++k)
        csv.row({out.wave.xi[k], out.wave.V[k], out.wave.I_r[k],
                 out.wave.E_m[k], out.wave.B_m[k], out.wave.flux_pos[k]});
      run.record("membrane_wave.csv");
    }
  }

  double b_peak = 0.0, e_min = 1e300, e_max = -1e300;
  for (std::size_t k = 0; k < out.wave.xi.size(); ++k) {
    b_peak = std::max(b_peak, std::abs(out.wave.B_m[k]));
    e_min = std::min(e_min, out.wave.E_m[k]);
    e_max = std::max(e_max, out.wave.E_m[k]);
  }
  run.report["hh"] = {
      {"samples", out.series.t.size()},
      {"wave_samples", out.wave.xi.size()},
      {"wave_span_m", out.wave.xi.back() - out.wave.xi.front()},
      {"peak_Bm_T", b_peak},
      // E_r = -dV/dr
      {"peak_membrane_Er_Vpm", -e_min},
      {"min_membrane_Er_Vpm", -e_max},
      {"resting_Er_Vpm", -out.wave.E_m.back()},
  };
  return out;
}

struct PnpOutcome {
  bool converged = true;
  double peak_B_T = 0.0;
};

PnpOutcome stage_pnp(Run& run, const MembraneWave& wave, bool ci,
                     bool have_profile, double profile_xi) {
  StageTimer timer(run, "pnp");
  MeshResolution res = MeshResolution::from(run.cfg.solver, ci);
  AxisymmetricMesh mesh = build_mesh(run.cfg.geometry, res);
  FieldSolution sol = solve_pnp(mesh, run.cfg, wave, run.cfg.solver.tol);
  DerivedFields der = derive_fields(sol);
  MagneticField mag = magnetic_field(sol, der, wave, run.cfg.constants.mu0);

  {
    CsvWriter csv(run.path("fields.csv"),
                  {"r_m", "xi_m", "V_V", "cpos_molm3", "cneg_molm3",
                   "rho_Cm3", "Er_Vpm", "Exi_Vpm", "Jr_Apm2", "Jxi_Apm2"});
    for (std::size_t j = 0; j < mesh.nxi(); ++j)
      for (std::size_t i = 0; i < mesh.nr(); ++i) {
        const std::size_t p = mesh.index(i, j);
        csv.row({mesh.r[i], mesh.xi[j], sol.V[p], sol.c_pos[p], sol.c_neg[p],
                 der.rho[p], der.E_r[p], der.E_xi[p], der.J_r[p],
                 der.J_xi[p]});
      }
    run.record("fields.csv");
  }
  {
    CsvWriter csv(run.path("bphi.csv"), {"r_m", "xi_m", "Bphi_T"});
    for (std::size_t j = 0; j < mesh.nxi(); ++j)
      for (std::size_t i = 0; i < mesh.nr(); ++i)
        csv.row({mesh.r[i], mesh.xi[j], mag.B_phi[mesh.index(i, j)]});
    run.record("bphi.csv");
  }

  // headline metrics
  double rho_min = 1e300, rho_max = -1e300, jxi_peak = 0.0,
         jxi_peak_outside = 0.0, b_peak = 0.0, er_mem_min = 1e300,
         er_mem_max = -1e300;
  std::size_t j_bpeak = 0;
  const double band_r =
      run.cfg.geometry.axon_radius + run.cfg.geometry.debye_band;
  for (std::size_t j = 0; j < mesh.nxi(); ++j) {
    for (std::size_t i = 0; i < mesh.nr(); ++i) {
      const std::size_t p = mesh.index(i, j);
      rho_min = std::min(rho_min, der.rho[p]);
      rho_max = std::max(rho_max, der.rho[p]);
      jxi_peak = std::max(jxi_peak, std::abs(der.J_xi[p]));
      if (mesh.r[i] >= band_r)
        jxi_peak_outside = std::max(jxi_peak_outside, std::abs(der.J_xi[p]));
      if (std::abs(mag.B_phi[p]) > b_peak) {
        b_peak = std::abs(mag.B_phi[p]);
        j_bpeak = j;
      }
    }
    er_mem_min = std::min(er_mem_min, der.E_r[mesh.index(0, j)]);
    er_mem_max = std::max(er_mem_max, der.E_r[mesh.index(0, j)]);
  }

  // 1/r fit of the B profile at the axial position of the field peak
  std::vector<double> bcol = radial_profile(mesh, mag.B_phi, mesh.xi[j_bpeak]);
  InverseRFit fit =
      fit_inverse_r(mesh.r, bcol, mesh.r.front(), mesh.r.back());

  run.report["solver"] = {
      {"residual_history", sol.diag.residual_history},
      {"iterations", sol.iterations},
      {"converged", sol.diag.converged},
      {"used_newton", sol.diag.used_newton},
      {"residual_norm", sol.residual_norm},
      {"min_concentration_molm3", sol.diag.min_concentration},
      {"worst_field", sol.diag.worst_field},
  };
  MeshReport mr = audit_mesh(mesh);
  run.report["mesh"] = {{"nr", mr.nr},
                        {"nxi", mr.nxi},
                        {"nodes", mr.nodes},
                        {"dr_min_m", mr.dr_min},
                        {"dr_max_m", mr.dr_max},
                        {"dxi_m", mr.dxi},
                        {"fine_band_cells", mr.fine_band_cells}};
  run.report["pnp"] = {
      {"membrane_Er_max_Vpm", er_mem_max},
      {"membrane_Er_min_Vpm", er_mem_min},
      {"rho_min_Cm3", rho_min},
      {"rho_max_Cm3", rho_max},
      {"peak_Jxi_Apm2", jxi_peak},
      {"peak_Jxi_outside_band_Apm2", jxi_peak_outside},
      {"peak_Bphi_T", b_peak},
      {"bfit_coefficient_Tm", fit.coefficient},
      {"bfit_rms_residual", fit.rms_residual},
      {"conservation_defect_pos", conservation_defect(sol, true)},
      {"conservation_defect_neg", conservation_defect(sol, false)},
  };
  {
    DetectabilityReport r =
        assess_detectability(b_peak, run.cfg.sensor, "magnetic");
    run.report["detectability"]["magnetic"] = {
        {"field_T", r.field_at_nv},
        {"effective_threshold_T", r.effective_threshold},
        {"detectable", r.detectable},
        {"margin", r.margin}};
  }

  if (have_profile) {
    std::vector<double> vr = radial_profile(mesh, sol.V, profile_xi);
    std::vector<double> cp = radial_profile(mesh, sol.c_pos, profile_xi);
    std::vector<double> cm = radial_profile(mesh, sol.c_neg, profile_xi);
    std::vector<double> rr = radial_profile(mesh, der.rho, profile_xi);
    std::vector<double> er = radial_profile(mesh, der.E_r, profile_xi);
    std::vector<double> ex = radial_profile(mesh, der.E_xi, profile_xi);
    std::vector<double> jr = radial_profile(mesh, der.J_r, profile_xi);
    std::vector<double> jx = radial_profile(mesh, der.J_xi, profile_xi);
    std::vector<double> bb = radial_profile(mesh, mag.B_phi, profile_xi);
    CsvWriter csv(run.path("profile.csv"),
                  {"r_m", "V_V", "cpos_molm3", "cneg_molm3", "rho_Cm3",
                   "Er_Vpm", "Exi_Vpm", "Jr_Apm2", "Jxi_Apm2", "Bphi_T"});
    for (std::size_t i = 0; i < mesh.nr(); ++i)
      csv.row({mesh.r[i], vr[i], cp[i], cm[i], rr[i], er[i], ex[i], jr[i],
               jx[i], bb[i]});
    run.record("profile.csv");
  }

  PnpOutcome out;
  out.converged = sol.diag.converged;
  out.peak_B_T = b_peak;
  return out;
}

double pillar_membrane_field(Run& run, const MembraneWave* wave) {
  if (!run.cfg.pillar.E_m_from_model) return run.cfg.pillar.E_m;
  if (!wave)
    throw ConfigError(
        "pillar.E_m_from_model requires the hh stage (use the all command)");
  // Same boundary formula with the diamond permittivity in place of water.
  std::vector<double> em = membrane_E_profile(
      *wave, run.cfg.bc, run.cfg.hh, run.cfg.geometry,
      run.cfg.pillar.eps_diamond * run.cfg.constants.eps0);
  double peak = 0.0;
  for (double e : em) peak = std::max(peak, std::abs(e));
  return peak;
}

void stage_pillar(Run& run, const MembraneWave* wave, double b_at_nv) {
  StageTimer timer(run, "pillar");
  const PillarGeometry& g = run.cfg.pillar;
  const double e_m = pillar_membrane_field(run, wave);
  run.report["pillar"] = {
      {"E_m_Vpm", e_m},
      {"contact",
       g.contact == ContactMode::kOnTop ? "on-top" : "on-side"}};

  double e_at_nv = 0.0;
  if (g.contact == ContactMode::kOnTop) {
    CsvWriter csv(run.path("pillar_ontop_profile.csv"), {"s_m", "E_Vpm"});
    const std::size_t n = 241;
    for (std::size_t q = 0; q < n; ++q) {
      double s = q * 1.2 * g.diameter / (n - 1);
      csv.row({s, field_on_top(0.0, s, g, e_m)});
    }
    run.record("pillar_ontop_profile.csv");
    e_at_nv = field_at_nv(g, e_m);
    run.report["pillar"]["nv_depth_m"] = g.nv_depth;

    // analytic potential and field on a structured (x, z) slice
    CsvWriter grid(run.path("pillar_ontop_grid.csv"),
                   {"x_m", "y_m", "z_m", "V_V", "Emag_Vpm"});
    const std::size_t nrq = 41, nzq = 101;
    for (std::size_t kz = 0; kz < nzq; ++kz)
      for (std::size_t ir = 0; ir < nrq; ++ir) {
        double r = 0.5 * g.diameter * ir / (nrq - 1);
        double z = 1.2 * g.diameter * kz / (nzq - 1);
        grid.row({r, 0.0, z, potential_on_top(r, z, g, e_m),
                  std::abs(field_on_top(r, z, g, e_m))});
      }
    run.record("pillar_ontop_grid.csv");
  } else {
    PillarSideSolution s = solve_on_side(g, e_m, g.grid);
    run.report["pillar"]["grid"] = {{"nr", s.nr},
                                    {"nth", s.nth},
                                    {"nz", s.nz},
                                    {"iterations", s.iterations}};
    {
      CsvWriter csv(run.path("pillar_onside_profile.csv"), {"s_m", "E_Vpm"});
      const std::size_t n = 201;
      for (std::size_t q = 1; q < n; ++q) {
        double t = q * 2.0 * s.a / (n - 1);
        csv.row({t, s.field_on_line(t)});
      }
      run.record("pillar_onside_profile.csv");
    }
    {
      // full grid, decimated if needed to stay under ~400k rows
      std::size_t stride = 1;
      while (s.nr * s.nth * s.nz / (stride * stride * stride) > 400000)
        ++stride;
      CsvWriter grid(run.path("pillar_onside_grid.csv"),
                     {"x_m", "y_m", "z_m", "V_V", "Emag_Vpm"});
      for (std::size_t k = 0; k < s.nz; k += stride)
        for (std::size_t i = 0; i < s.nr; i += stride)
          for (std::size_t j = 0; j < s.nth; j += stride)
            grid.row({s.rc(i) * std::cos(s.thc(j)),
                      s.rc(i) * std::sin(s.thc(j)), s.zc[k],
                      s.V[s.idx(i, j, k)], s.field_magnitude(i, j, k)});
      run.record("pillar_onside_grid.csv");
      run.report["pillar"]["grid_stride"] = stride;
    }
    e_at_nv = field_at_nv(g, s);
    run.report["pillar"]["nv_depth_m"] = g.nv_depth_side;
  }

  DetectabilityReport er =
      assess_detectability(e_at_nv, run.cfg.sensor, "electric");
  run.report["pillar"]["E_at_nv_Vpm"] = e_at_nv;
  run.report["detectability"]["electric"] = {
      {"field_Vpm", er.field_at_nv},
      {"effective_threshold_Vpm", er.effective_threshold},
      {"detectable", er.detectable},
      {"margin", er.margin}};
  DetectabilityReport br =
      assess_detectability(b_at_nv, run.cfg.sensor, "magnetic");
  run.report["detectability"]["magnetic"] = {
      {"field_T", br.field_at_nv},
      {"effective_threshold_T", br.effective_threshold},
      {"detectable", br.detectable},
      {"margin", br.margin}};
}

void stage_growth(Run& run, const std::string& input_csv) {
  StageTimer timer(run, "growth");
  std::vector<Polyline> paths = read_paths_csv(input_csv);
  GrowthReport rep = growth_report(paths);
  CsvWriter csv(run.path("growth_report.csv"),
                {"path_id", "length_um", "ordered_um"});
  for (const auto& p : rep.per_path) csv.row(p.id, {p.length, p.ordered});
  run.record("growth_report.csv");
  run.report["growth"] = {{"total_length_um", rep.total_length},
                          {"ordered_length_um", rep.ordered_length},
                          {"ratio", rep.ratio},
                          {"paths", rep.per_path.size()}};
}

bool parse_profile_arg(const std::string& arg, double& xi) {
  std::string v = arg;
  if (v.rfind("xi=", 0) == 0) v = v.substr(3);
  try {
    std::size_t pos = 0;
    xi = std::stod(v, &pos);
    return pos == v.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"axon nanoscale field simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "out", profile_arg, mode_arg,
                           growth_input;
  bool ci = false;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--out", out_dir, "output directory");

  app.add_subcommand("hh", "membrane dynamics and traveling wave");
  CLI::App* cmd_pnp =
      app.add_subcommand("pnp", "electrodiffusion fields and magnetics");
  cmd_pnp->add_flag("--ci", ci, "reduced axial window");
  cmd_pnp->add_option("--profile", profile_arg,
                      "emit a radial profile, e.g. xi=0");
  CLI::App* cmd_pillar =
      app.add_subcommand("pillar", "field inside the diamond nanopillar");
  cmd_pillar->add_option("--mode", mode_arg, "on-top or on-side");
  CLI::App* cmd_growth =
      app.add_subcommand("growth", "neurite ordering metric");
  cmd_growth->add_option("input", growth_input, "paths csv")->required();
  CLI::App* cmd_all = app.add_subcommand("all", "full pipeline");
  cmd_all->add_flag("--ci", ci, "reduced axial window");
  cmd_all->add_option("--profile", profile_arg,
                      "emit a radial profile, e.g. xi=0");
  cmd_all->add_option("--mode", mode_arg, "on-top or on-side");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    ModelConfig cfg;
    const std::string resolved = resolve_config_path(config_path);
    cfg = resolved.empty() ? default_config() : load_config(resolved);

    if (!mode_arg.empty()) {
      if (mode_arg == "on-top")
        cfg.pillar.contact = ContactMode::kOnTop;
      else if (mode_arg == "on-side")
        cfg.pillar.contact = ContactMode::kOnSide;
      else
        throw ConfigError("--mode: expected on-top or on-side");
    }
    double profile_xi = 0.0;
    bool have_profile = !profile_arg.empty();
    if (have_profile && !parse_profile_arg(profile_arg, profile_xi))
      throw ConfigError("--profile: expected xi=VALUE");

    const std::string sub = app.get_subcommands().front()->get_name();
    Run run(cfg, out_dir, sub);

    int exit_code = 0;
    if (sub == "hh") {
      stage_hh(run, true);
    } else if (sub == "pnp") {
      HHOutputs hh = stage_hh(run, false);
      PnpOutcome p = stage_pnp(run, hh.wave, ci, have_profile, profile_xi);
      if (!p.converged) exit_code = 4;
    } else if (sub == "pillar") {
      stage_pillar(run, nullptr, cfg.pillar.b_at_nv);
    } else if (sub == "growth") {
      stage_growth(run, growth_input);
    } else if (sub == "all") {
      HHOutputs hh = stage_hh(run, true);
      PnpOutcome p = stage_pnp(run, hh.wave, ci, have_profile, profile_xi);
      stage_pillar(run, &hh.wave, p.peak_B_T);
      if (!p.converged) exit_code = 4;
    }
    run.finish(exit_code);
    if (exit_code == 4)
      std::cerr << "axonfield: solver did not converge; diagnostics in "
                << run.path("run_report.json") << "\n";
    return exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "axonfield: config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "axonfield: numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "axonfield: " << e.what() << "\n";
    return 3;
  }
}
