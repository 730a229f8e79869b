#include "pmono/cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "pmono/cli/csv.hpp"
#include "pmono/coefficient_flows.hpp"
#include "pmono/monotonicity_verify.hpp"
#include "pmono/schwarzschild_model.hpp"
#include "pmono/version.hpp"
#include "pmono/warped_geometry.hpp"

namespace pmono::cli {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
// Closed-form oracles (flat exterior) are held to this relative accuracy.
constexpr double kOracleRel = 1e-8;
// Tail-fitted limit of F_p against 8 pi m on Schwarzschild members.
constexpr double kMassFunctionalRel = 1e-5;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class Fn>
void parallel_for(std::size_t n, Fn fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::ofstream open_output(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

model::ModelOptions model_options(const RunConfig& c) {
  model::ModelOptions o;
  o.R_max = c.grids.R_max;
  o.n_points = c.grids.n_points;
  o.tol = c.tol;
  return o;
}

std::vector<verify::ModelBundle> build_bundles(const RunConfig& c) {
  std::vector<verify::ModelBundle> out(c.p_list.size());
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = verify::build_bundle(c.p_list[i], model_options(c));
  });
  return out;
}

void add_check(CellResult& cell, std::string name, double value, double tolerance, bool pass,
               std::string detail = {}) {
  cell.checks.push_back({std::move(name), value, tolerance, pass, std::move(detail)});
}

void euclidean_cell(CellResult& cell, const warp::WarpProfile& w, const RunConfig& c) {
  const double p = cell.p;
  const double radius = cell.family.params.at("radius");
  cell.Cp = warp::capacity_Cp(w, p, c.tol);
  cell.adm = warp::masses(w, c.grids.s_far).adm;
  cell.margin = kNaN;
  cell.min_slope_dec = kNaN;
  cell.min_slope_grow = kNaN;
  const double closed =
      4.0 * kPi * std::pow((3.0 - p) / (p - 1.0), p - 1.0) * std::pow(radius, 3.0 - p);
  const double rel = std::abs(cell.Cp / closed - 1.0);
  add_check(cell, "euclidean_capacity", rel, kOracleRel, rel <= kOracleRel);
  add_check(cell, "euclidean_adm", std::abs(cell.adm), kOracleRel * radius,
            std::abs(cell.adm) <= kOracleRel * radius);
  cell.diagnostics["Cp_closed_form"] = closed;
  cell.diagnostics["level_set_skipped"] = 1.0;  // boundary not minimal
}

void write_curves(const verify::MetricVerification& v, const std::string& path) {
  auto out = open_output(path);
  CsvWriter csv(out, {"t", "s", "phi", "u", "W", "dWdt", "d2Wdt2", "H", "R", "hawking",
                      "Q_decaying", "Q_growing", "w_residual"});
  const auto& f = v.flow;
  const auto res = v.residual.residual.values();
  for (std::size_t i = 0; i < f.size(); ++i) {
    csv.row({f.t[i], f.s[i], f.phi[i], f.u[i], f.W[i], f.dWdt[i], f.d2Wdt2[i], f.H[i], f.R[i],
             f.hawking[i], v.q_decaying.values[i], v.q_growing.values[i], res[i]});
  }
}

void level_set_cell(CellResult& cell, const warp::WarpProfile& w, const verify::ModelBundle& b,
                    const RunConfig& c, const std::string& curve_path) {
  const double p = cell.p;
  const auto& tol = c.tol;
  warp::FlowOptions fo;
  fo.dt = c.grids.dt;
  fo.s_far = c.grids.s_far;
  fo.tol = tol;
  verify::MonotonicityOptions mo;
  mo.tol = tol;
  mo.r_window = c.r_window;

  verify::MetricVerification v;
  try {
    v = verify::verify_metric(w, b, fo, mo);
  } catch (const HypothesisError& e) {
    add_check(cell, "hypotheses", kNaN, 0.0, false, e.what());
    cell.margin = cell.min_slope_dec = cell.min_slope_grow = kNaN;
    return;
  }
  cell.Cp = v.Cp;
  cell.Kp = v.Kp;
  cell.adm = v.adm;
  cell.margin = v.penrose.penrose_margin;
  cell.min_slope_dec = v.decaying.min_forward_slope;
  cell.min_slope_grow = v.growing.min_forward_slope;
  cell.equality = v.penrose.equality_flag;

  const double a = 3.0 - p;
  const double W_scale = 4.0 * kPi * a * a;
  const double Ws0 = model::ws_boundary_data(*b.model).W0;
  add_check(cell, "hypotheses", v.R_min, 0.0, true, "R >= 0 and minimal boundary");
  add_check(cell, "penrose_inequality", v.penrose.penrose_margin, tol.accept_rel * v.adm,
            v.penrose.penrose_margin >= -tol.accept_rel * v.adm);
  add_check(cell, "monotone_Q_decaying", v.decaying.min_forward_slope, tol.slope_slack,
            v.decaying.violations.empty());
  add_check(cell, "monotone_Q_growing", v.growing.min_forward_slope, tol.slope_slack,
            v.growing.violations.empty());
  add_check(cell, "limit_Q_decaying", std::abs(v.decaying.limit_estimate), tol.accept_rel * Ws0,
            std::abs(v.decaying.limit_estimate) <= tol.accept_rel * Ws0);
  add_check(cell, "w_residual_identity", v.residual.identity_gap, tol.accept_rel * W_scale,
            v.residual.identity_gap <= tol.accept_rel * W_scale);
  add_check(cell, "w_residual_sign", v.residual.min_residual, tol.slope_slack,
            v.residual.min_residual >= -tol.slope_slack);
  add_check(cell, "horizon_W_bound", v.horizon_gap, tol.slope_slack,
            v.horizon_gap >= -tol.slope_slack);
  add_check(cell, "mass_functional_bound", v.Fp.limit - v.Fp.bound, tol.accept_rel * v.Fp.bound,
            v.Fp.limit <= v.Fp.bound * (1.0 + tol.accept_rel));
  const bool consistent = v.penrose.equality_flag == v.decaying.equality_flag &&
                          v.penrose.equality_flag == v.growing.equality_flag;
  add_check(cell, "equality_consistency", consistent ? 1.0 : 0.0, 0.0, consistent,
            "equality flags of the margin and both Q curves agree");

  const auto& params = cell.family.params;
  const bool schwarzschild =
      cell.family.tag == "schwarzschild" || (cell.family.tag == "bumped" && params.at("eps") == 0.0);
  if (schwarzschild) {
    add_check(cell, "equality_case", std::abs(v.penrose.penrose_margin), tol.accept_rel * v.adm,
              v.penrose.equality_flag, "Schwarzschild member");
    const double rel = std::abs(v.Fp.limit / v.Fp.bound - 1.0);
    add_check(cell, "mass_functional_equality", rel, kMassFunctionalRel, rel <= kMassFunctionalRel);
  } else {
    add_check(cell, "strict_case", v.penrose.penrose_margin, 0.0,
              v.penrose.penrose_margin > 0.0 && !v.penrose.equality_flag, "R >= 0, R not identically 0");
  }

  auto& d = cell.diagnostics;
  d["Q_decaying_0"] = v.Q_dec0;
  d["Q_growing_0"] = v.Q_grow0;
  d["Q_decaying_limit"] = v.decaying.limit_estimate;
  d["Q_growing_limit"] = v.growing.limit_estimate;
  d["growing_bound_with_factor"] = v.bound.bound_with_factor;
  d["growing_bound_without_factor"] = v.bound.bound_without_factor;
  d["Fp_limit"] = v.Fp.limit;
  d["8pi_adm"] = v.Fp.bound;
  d["horizon_gap"] = v.horizon_gap;
  d["w_residual_fd_gap"] = v.residual.fd_gap;
  d["Q_growing_max_deviation"] = v.growing.diagnostics.at("max_deviation");
  d["certified_t_max"] = v.growing.diagnostics.at("certified_t_max");
  d["R_phi2_min"] = v.R_min;

  if (!curve_path.empty()) write_curves(v, curve_path);
}

std::string p_tag(double p) { return "p" + format_double(p); }

json checks_json(const std::vector<Check>& checks) {
  json out = json::array();
  for (const auto& c : checks) {
    json j{{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace

bool CellResult::pass() const {
  if (status != "ok" || checks.empty()) return false;
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::vector<CellResult> run_cells(const RunConfig& c, const std::string& csv_dir) {
  const auto bundles = build_bundles(c);
  const std::size_t nf = c.families.size();
  std::vector<CellResult> cells(c.p_list.size() * nf);
  parallel_for(cells.size(), [&](std::size_t i) {
    CellResult& cell = cells[i];
    cell.p = c.p_list[i / nf];
    cell.family = c.families[i % nf];
    cell.Kp = bundles[i / nf].model->Kp;
    try {
      const auto w = make_warp(cell.family, c.grids);
      if (!w.minimal_boundary()) {
        euclidean_cell(cell, w, c);
        return;
      }
      std::ostringstream name;
      name << "cell_" << std::setw(3) << std::setfill('0') << i << '_' << p_tag(cell.p) << '_'
           << cell.family.tag << ".csv";
      if (!csv_dir.empty()) cell.curve_file = name.str();
      level_set_cell(cell, w, bundles[i / nf], c,
                     csv_dir.empty() ? std::string() : join(csv_dir, name.str()));
    } catch (const Error& e) {
      cell.status = std::string("error: ") + e.what();
    }
  });
  return cells;
}

json to_json(const CellResult& cell) {
  json diag = json::object();
  for (const auto& [k, v] : cell.diagnostics) diag[k] = v;
  json out{{"p", cell.p},
           {"family", cell.family.tag},
           {"params", cell.family.params},
           {"status", cell.status},
           {"Cp", cell.Cp},
           {"Kp", cell.Kp},
           {"adm", cell.adm},
           {"margin", cell.margin},
           {"min_slope_Qstar", cell.min_slope_dec},
           {"min_slope_Qgrow", cell.min_slope_grow},
           {"equality", cell.equality},
           {"checks", checks_json(cell.checks)},
           {"diagnostics", diag},
           {"pass", cell.pass()}};
  if (!cell.curve_file.empty()) out["curves"] = cell.curve_file;
  return out;
}

int cmd_model(const RunConfig& c, std::ostream& log) {
  std::vector<std::shared_ptr<model::ModelGeometry>> models(c.p_list.size());
  std::vector<model::CapacityCheck> caps(models.size());
  std::vector<std::string> errors(models.size());
  parallel_for(models.size(), [&](std::size_t i) {
    try {
      models[i] = std::make_shared<model::ModelGeometry>(c.p_list[i], model_options(c));
      caps[i] = model::capacity_Kp(*models[i]);
    } catch (const NumericalError& e) {
      errors[i] = e.what();
    }
  });
  int code = kExitPass;
  auto constants = open_output(join(c.outputs.csv_dir, "model_constants.csv"));
  CsvWriter table(constants,
                  {"p", "Cs", "Kp", "Kp_surface", "c_fit", "c_tilde", "Ws0", "dWs0", "version"});
  for (std::size_t i = 0; i < models.size(); ++i) {
    const double p = c.p_list[i];
    if (!errors[i].empty()) {
      log << "model " << p_tag(p) << ": FAIL " << errors[i] << '\n';
      code = kExitFail;
      continue;
    }
    const auto& m = *models[i];
    const auto bd = model::ws_boundary_data(m);
    table << p << m.flux_constant() << m.Kp << caps[i].surface_integral << m.c_fit << m.c_tilde
          << bd.W0 << bd.dW0 << kVersion;
    table.end_row();
    auto out = open_output(join(c.outputs.csv_dir, "model_" + p_tag(p) + ".csv"));
    CsvWriter csv(out, {"r", "t", "u", "du", "Ws", "dWs_dt"});
    for (double r : m.u_curve.abscissae()) {
      const auto loc = m.local(r);
      csv.row({r, m.t(r), loc.u, m.du(r), loc.Ws, loc.dWs_dt});
    }
    log << "model " << p_tag(p) << ": Kp=" << format_double(m.Kp) << " Ws0=" << format_double(bd.W0)
        << '\n';
  }
  return code;
}

int cmd_coeffs(const RunConfig& c, std::ostream& log) {
  const auto bundles = build_bundles(c);
  int code = kExitPass;
  auto summary_out = open_output(join(c.outputs.csv_dir, "coefficients.csv"));
  CsvWriter summary(summary_out, {"p", "flavor", "c1", "q", "epsilon", "residual_max", "Q0",
                                  "max_deviation", "status", "version"});
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const auto& m = *bundles[i].model;
    const double Ws0 = model::ws_boundary_data(m).W0;
    for (const auto* sol : {bundles[i].decaying.get(), bundles[i].growing.get()}) {
      const auto res = coeffs::system_residual(*sol, m);
      const auto con = coeffs::model_constancy(*sol, m);
      const double scale = sol->flavor() == coeffs::Flavor::decaying ? Ws0 : std::abs(con.Q0);
      const bool ok = res.max() <= c.tol.accept_rel && con.max_deviation <= c.tol.accept_rel * scale;
      if (!ok) code = kExitFail;
      const std::string flavor = coeffs::to_string(sol->flavor());
      summary << m.p() << flavor << sol->c1() << sol->q() << sol->epsilon_used() << res.max()
              << con.Q0 << con.max_deviation << (ok ? "pass" : "fail") << kVersion;
      summary.end_row();
      auto out = open_output(join(c.outputs.csv_dir, "coeffs_" + p_tag(m.p()) + "_" + flavor + ".csv"));
      CsvWriter csv(out, {"r", "t", "f", "g", "h"});
      for (double r : m.u_curve.abscissae()) {
        const auto v = sol->at_r(r);
        csv.row({r, m.t(r), v.f, v.g, v.h});
      }
      log << "coeffs " << p_tag(m.p()) << ' ' << flavor << ": " << (ok ? "PASS" : "FAIL")
          << " residual=" << format_double(res.max()) << '\n';
    }
  }
  return code;
}

int cmd_verify(const RunConfig& c, std::ostream& log) {
  const auto cells = run_cells(c, c.outputs.csv_dir);
  json results = json::array();
  bool all = true;
  for (const auto& cell : cells) {
    results.push_back(to_json(cell));
    all = all && cell.pass();
    log << "verify " << p_tag(cell.p) << ' ' << cell.family.tag << ' ' << cell.family.label() << ": "
        << (cell.pass() ? "PASS" : "FAIL");
    if (cell.status != "ok") log << " (" << cell.status << ')';
    for (const auto& chk : cell.checks) {
      if (!chk.pass) log << " [" << chk.name << (chk.detail.empty() ? "" : ": " + chk.detail) << ']';
    }
    log << '\n';
  }
  json report{{"version", kVersion},
              {"command", "verify"},
              {"config", to_json(c)},
              {"results", results},
              {"pass", all}};
  auto out = open_output(c.report_path());
  out << report.dump(2) << '\n';
  return all ? kExitPass : kExitFail;
}

int cmd_sweep(const RunConfig& c, std::ostream& log) {
  const auto cells = run_cells(c, std::string());
  auto out = open_output(join(c.outputs.csv_dir, "sweep.csv"));
  CsvWriter csv(out, {"p", "tag", "params", "Cp", "Kp", "adm", "margin", "min_slope_dec",
                      "min_slope_grow", "equality", "status", "version"});
  bool all = true;
  for (const auto& cell : cells) {
    const bool pass = cell.pass();
    all = all && pass;
    std::string status = pass ? "pass" : "fail";
    if (cell.status != "ok") status += ": " + cell.status.substr(7);
    csv << cell.p << cell.family.tag << cell.family.label() << cell.Cp << cell.Kp << cell.adm
        << cell.margin << cell.min_slope_dec << cell.min_slope_grow
        << (cell.equality ? "true" : "false") << status << kVersion;
    csv.end_row();
  }
  log << "sweep: " << cells.size() << " cells, " << (all ? "all pass" : "failures present") << '\n';
  return all ? kExitPass : kExitFail;
}

int cmd_suite(const RunConfig& c, std::ostream& log) {
  int code = kExitPass;
  for (auto cmd : {cmd_model, cmd_coeffs, cmd_verify, cmd_sweep}) code = std::max(code, cmd(c, log));
  return code;
}

}  // namespace pmono::cli
