#pragma once

// Run configuration: a JSON document
//
//   {
//     "p": [1.2, 1.5, 1.8],
//     "families": [
//       {"tag": "schwarzschild", "params": {"m": [1, 2, 5]}},
//       {"tag": "bumped", "params": {"m0": 1, "eps": [0.05, 0.1], "s1": 1, "s2": 4}},
//       {"tag": "euclidean", "params": {"radius": 1}}
//     ],
//     "grids": {"R_max": 1e6, "n_points": 4096, "s_max": 0, "dt": 0.01, "s_far": 1e6},
//     "tolerances": {"ode_rel": 1e-10, "quad_rel": 1e-10, "accept_rel": 1e-6,
//                    "slope_slack": 1e-8},
//     "monotonicity": {"r_window": 1e3},
//     "outputs": {"csv_dir": "pmono_out", "report_path": "pmono_out/report.json"}
//   }
//
// Every key is optional except that "p" and "families", when present, must be
// non-empty.  A parameter given as an array expands into one family per value
// (cartesian product over the arrays of one entry, in key order).

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pmono/errors.hpp"
#include "pmono/numerics.hpp"
#include "pmono/warped_geometry.hpp"

namespace pmono::cli {

class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct FamilySpec {
  std::string tag;                       // schwarzschild | bumped | euclidean
  std::map<std::string, double> params;  // complete after parsing (defaults filled)

  /// "key=value;..." in key order, values in round-trip form.
  [[nodiscard]] std::string label() const;
};

struct Grids {
  double R_max = 1e6;
  std::size_t n_points = 4096;
  double s_max = 0.0;  // 0: family default
  double dt = 0.01;
  double s_far = 1e6;
};

struct Outputs {
  std::string csv_dir = "pmono_out";
  std::string report_path;  // empty: <csv_dir>/report.json
};

struct RunConfig {
  std::vector<double> p_list{1.2, 1.5, 1.8};
  std::vector<FamilySpec> families{{"schwarzschild", {{"m", 2.0}}}};
  Grids grids;
  numerics::Tolerances tol;
  double r_window = 1e3;
  Outputs outputs;

  [[nodiscard]] std::string report_path() const;
};

/// Parses and validates; throws ConfigError with the offending key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::string& path);

/// Throws ConfigError unless every p is in (1, 2), R_max >= 1e4, the family
/// list is non-empty and the tolerances are positive.
void validate(const RunConfig& config);

/// The effective configuration, as echoed into reports.
nlohmann::json to_json(const RunConfig& config);

/// Builds the warped profile of a family (parameters already validated).
warp::WarpProfile make_warp(const FamilySpec& family, const Grids& grids);

}  // namespace pmono::cli
