#include "pmono/cli/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "pmono/cli/csv.hpp"

namespace pmono::cli {

using nlohmann::json;

namespace {

const std::map<std::string, std::map<std::string, double>>& family_defaults() {
  static const std::map<std::string, std::map<std::string, double>> defaults{
      {"schwarzschild", {{"m", 1.0}}},
      {"bumped", {{"m0", 1.0}, {"eps", 0.1}, {"s1", 1.0}, {"s2", 4.0}}},
      {"euclidean", {{"radius", 1.0}}},
  };
  return defaults;
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config: '" + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> number_list(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(number(x, key));
  } else {
    out.push_back(number(v, key));
  }
  return out;
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("config: unknown key '" + where + "." + key + "'");
  }
}

std::vector<FamilySpec> expand_family(const json& entry) {
  check_keys(entry, "families[]", {"tag", "params"});
  if (!entry.contains("tag") || !entry["tag"].is_string()) {
    throw ConfigError("config: family entry needs a string 'tag'");
  }
  const std::string tag = entry["tag"].get<std::string>();
  const auto def = family_defaults().find(tag);
  if (def == family_defaults().end()) throw ConfigError("config: unknown family tag '" + tag + "'");

  std::vector<FamilySpec> out{{tag, def->second}};
  if (!entry.contains("params")) return out;
  const json& params = entry["params"];
  if (!params.is_object()) throw ConfigError("config: '" + tag + ".params' must be an object");
  for (const auto& [key, value] : params.items()) {
    if (!def->second.count(key)) {
      throw ConfigError("config: family '" + tag + "' has no parameter '" + key + "'");
    }
    const auto values = number_list(value, tag + "." + key);
    if (values.empty()) throw ConfigError("config: '" + tag + "." + key + "' is an empty list");
    std::vector<FamilySpec> next;
    for (const auto& base : out) {
      for (double v : values) {
        FamilySpec f = base;
        f.params[key] = v;
        next.push_back(std::move(f));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

std::string FamilySpec::label() const {
  std::string out;
  for (const auto& [key, value] : params) {
    if (!out.empty()) out += ';';
    out += key + "=" + format_double(value);
  }
  return out;
}

std::string RunConfig::report_path() const {
  return outputs.report_path.empty() ? outputs.csv_dir + "/report.json" : outputs.report_path;
}

RunConfig parse_config(const json& doc) {
  check_keys(doc, "<root>", {"p", "families", "grids", "tolerances", "monotonicity", "outputs"});
  RunConfig cfg;
  if (doc.contains("p")) cfg.p_list = number_list(doc["p"], "p");
  if (doc.contains("families")) {
    if (!doc["families"].is_array()) throw ConfigError("config: 'families' must be an array");
    cfg.families.clear();
    for (const auto& entry : doc["families"]) {
      for (auto& f : expand_family(entry)) cfg.families.push_back(std::move(f));
    }
  }
  if (doc.contains("grids")) {
    const json& g = doc["grids"];
    check_keys(g, "grids", {"R_max", "n_points", "s_max", "dt", "s_far"});
    if (g.contains("R_max")) cfg.grids.R_max = number(g["R_max"], "grids.R_max");
    if (g.contains("n_points")) {
      if (!g["n_points"].is_number_integer() || g["n_points"].get<long long>() < 16) {
        throw ConfigError("config: 'grids.n_points' must be an integer >= 16");
      }
      cfg.grids.n_points = g["n_points"].get<std::size_t>();
    }
    if (g.contains("s_max")) cfg.grids.s_max = number(g["s_max"], "grids.s_max");
    if (g.contains("dt")) cfg.grids.dt = number(g["dt"], "grids.dt");
    if (g.contains("s_far")) cfg.grids.s_far = number(g["s_far"], "grids.s_far");
  }
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    check_keys(t, "tolerances", {"ode_rel", "quad_rel", "accept_rel", "slope_slack"});
    if (t.contains("ode_rel")) cfg.tol.ode_rel = number(t["ode_rel"], "tolerances.ode_rel");
    if (t.contains("quad_rel")) cfg.tol.quad_rel = number(t["quad_rel"], "tolerances.quad_rel");
    if (t.contains("accept_rel")) cfg.tol.accept_rel = number(t["accept_rel"], "tolerances.accept_rel");
    if (t.contains("slope_slack")) cfg.tol.slope_slack = number(t["slope_slack"], "tolerances.slope_slack");
  }
  if (doc.contains("monotonicity")) {
    const json& m = doc["monotonicity"];
    check_keys(m, "monotonicity", {"r_window"});
    if (m.contains("r_window")) cfg.r_window = number(m["r_window"], "monotonicity.r_window");
  }
  if (doc.contains("outputs")) {
    const json& o = doc["outputs"];
    check_keys(o, "outputs", {"csv_dir", "report_path"});
    if (o.contains("csv_dir")) cfg.outputs.csv_dir = o["csv_dir"].get<std::string>();
    if (o.contains("report_path")) cfg.outputs.report_path = o["report_path"].get<std::string>();
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

void validate(const RunConfig& c) {
  if (c.p_list.empty()) throw ConfigError("config: 'p' is empty");
  for (double p : c.p_list) {
    if (!(p > 1.0 && p < 2.0)) throw ConfigError("config: p=" + format_double(p) + " outside (1, 2)");
  }
  if (c.families.empty()) throw ConfigError("config: 'families' is empty");
  if (!(c.grids.R_max >= 1e4)) throw ConfigError("config: 'grids.R_max' must be >= 1e4");
  if (!(c.grids.dt > 0.0) || !(c.grids.s_far > 0.0) || !(c.grids.s_max >= 0.0)) {
    throw ConfigError("config: grid spacings must be positive");
  }
  if (!(c.r_window > 1.0)) throw ConfigError("config: 'monotonicity.r_window' must exceed 1");
  try {
    c.tol.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& f : c.families) {
    const auto& def = family_defaults().at(f.tag);
    for (const auto& [key, _] : def) {
      if (!f.params.count(key)) throw ConfigError("config: family '" + f.tag + "' misses '" + key + "'");
    }
    for (const auto& [key, v] : f.params) {
      if (!std::isfinite(v)) throw ConfigError("config: '" + f.tag + "." + key + "' is not finite");
    }
  }
}

json to_json(const RunConfig& c) {
  json fams = json::array();
  for (const auto& f : c.families) fams.push_back({{"tag", f.tag}, {"params", f.params}});
  return {
      {"p", c.p_list},
      {"families", fams},
      {"grids",
       {{"R_max", c.grids.R_max},
        {"n_points", c.grids.n_points},
        {"s_max", c.grids.s_max},
        {"dt", c.grids.dt},
        {"s_far", c.grids.s_far}}},
      {"tolerances",
       {{"ode_rel", c.tol.ode_rel},
        {"quad_rel", c.tol.quad_rel},
        {"accept_rel", c.tol.accept_rel},
        {"slope_slack", c.tol.slope_slack}}},
      {"monotonicity", {{"r_window", c.r_window}}},
  };
}

warp::WarpProfile make_warp(const FamilySpec& f, const Grids& grids) {
  const auto& p = f.params;
  if (f.tag == "schwarzschild") return warp::family_schwarzschild(p.at("m"), grids.s_max);
  if (f.tag == "bumped") {
    return warp::family_bumped(p.at("m0"), p.at("eps"), warp::Bump{p.at("s1"), p.at("s2")},
                               grids.s_max);
  }
  if (f.tag == "euclidean") return warp::family_euclidean(p.at("radius"));
  throw ConfigError("config: unknown family tag '" + f.tag + "'");
}

}  // namespace pmono::cli
