// pmono: model, coefficient and verification runs driven by a JSON config.
//
//   pmono verify --config configs/default.json
//   pmono sweep --p 1.2,1.5,1.8 --out sweep_out
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmono/cli/commands.hpp"
#include "pmono/cli/run_config.hpp"
#include "pmono/version.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::vector<double> p;
  std::string out;
  double tol = 0.0;
};

pmono::cli::RunConfig resolve(const Overrides& o) {
  pmono::cli::RunConfig cfg =
      o.config_path.empty() ? pmono::cli::RunConfig{} : pmono::cli::load_config(o.config_path);
  if (!o.p.empty()) cfg.p_list = o.p;
  if (!o.out.empty()) {
    cfg.outputs.csv_dir = o.out;
    cfg.outputs.report_path.clear();
  }
  if (o.tol != 0.0) cfg.tol.accept_rel = o.tol;
  pmono::cli::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotone quantities and the p-Penrose inequality on warped metrics"};
  app.set_version_flag("--version", pmono::kVersion);
  app.require_subcommand(1);

  Overrides o;
  using Command = int (*)(const pmono::cli::RunConfig&, std::ostream&);
  const std::vector<std::pair<std::string, std::pair<std::string, Command>>> commands{
      {"model", {"Model potential, W_s and constants per p", pmono::cli::cmd_model}},
      {"coeffs", {"Coefficient triples on the model", pmono::cli::cmd_coeffs}},
      {"verify", {"Full verification per (p, family); JSON report", pmono::cli::cmd_verify}},
      {"sweep", {"One CSV row per (p, family)", pmono::cli::cmd_sweep}},
      {"suite", {"model, coeffs, verify and sweep", pmono::cli::cmd_suite}},
  };
  Command selected = nullptr;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--p", o.p, "p values, overriding the config")->delimiter(',');
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--tol", o.tol, "acceptance tolerance (relative)");
    const Command cmd = entry.second;
    sub->callback([&selected, cmd] { selected = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pmono::cli::kExitConfig;
  }

  try {
    const auto cfg = resolve(o);
    return selected(cfg, std::cout);
  } catch (const pmono::cli::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return pmono::cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pmono::cli::kExitFail;
  }
}
