#pragma once

// Subcommands of the pmono tool.  Each returns the process exit code:
// 0 when every non-diagnostic check passes, 1 when a check fails, 2 for a
// configuration error (raised as ConfigError before any work starts).

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmono/cli/run_config.hpp"

namespace pmono::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

/// One (p, family) verification cell.
struct CellResult {
  double p = 0.0;
  FamilySpec family;
  std::string status = "ok";  // "ok" or the error that stopped the pipeline
  std::string curve_file;     // per-cell CSV (empty when no flow was run)
  double Cp = 0.0, Kp = 0.0, adm = 0.0, margin = 0.0;
  double min_slope_dec = 0.0, min_slope_grow = 0.0;
  bool equality = false;
  std::vector<Check> checks;
  std::map<std::string, double> diagnostics;

  [[nodiscard]] bool pass() const;
};

/// Runs every (p, family) cell, in parallel, ordered by (p, family) as listed
/// in the config.  When csv_dir is non-empty, flow and Q curves of each cell are
/// written there.
std::vector<CellResult> run_cells(const RunConfig& config, const std::string& csv_dir);

nlohmann::json to_json(const CellResult& cell);

int cmd_model(const RunConfig& config, std::ostream& log);
int cmd_coeffs(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);
/// model, coeffs, verify and sweep in turn; the worst exit code.
int cmd_suite(const RunConfig& config, std::ostream& log);

}  // namespace pmono::cli
