#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "accm/control.hpp"
#include "accm/geodesic.hpp"
#include "accm/metric.hpp"
#include "accm/simulate.hpp"
#include "accm/system.hpp"
#include "accm/verify.hpp"

namespace accm {

/// One right-hand side of a `key = value` line. Lists hold either numbers or
/// strings; `[]` is an empty list of either kind.
struct ConfigValue {
  enum class Kind { Number, Bool, String, List };
  Kind kind = Kind::Number;
  double number = 0.0;
  bool boolean = false;
  std::string string;
  std::vector<double> numbers;
  std::vector<std::string> strings;

  static ConfigValue parse(const std::string& text, const std::string& key);
};

struct ConfigEntry {
  std::string key;
  ConfigValue value;
  int line = 0;
};

/// Parses flat `section.key = value` text. `#` starts a comment outside of
/// quotes. Duplicate keys are an error.
std::vector<ConfigEntry> parse_config_text(const std::string& text,
                                           const std::string& origin = "<string>");
std::vector<ConfigEntry> read_config_file(const std::filesystem::path& path);

/// Applies a `key=value` override, replacing an existing entry or appending.
void apply_override(std::vector<ConfigEntry>& entries, const std::string& assignment);

/// Every field of a scenario as written in a config file. Empty lists mean
/// "system default" until `resolve_defaults` fills them in.
struct ScenarioConfig {
  // system
  std::string system_name = "builtin.lopez_example";
  int n = 0;
  int m = 0;
  int p_m = 0;
  int p_em = 0;
  std::vector<std::string> f, B, phi, varrho, varrho_dx1;
  std::vector<double> indicator;
  std::vector<double> theta_true_m, theta_true_em;

  // metric
  std::string metric_name = "builtin.lopez_example";
  std::vector<std::string> metric_W;
  double w_lower = 0.0;  // 0: scan on the verification grid
  double w_upper = 0.0;

  // controller
  double lambda = 0.1;
  std::vector<double> gamma_m, gamma_em;
  double kappa = 1.0;
  bool adapt_m = true;
  bool adapt_em = true;
  bool robust = false;
  bool use_deadzone = false;
  double deadzone = 0.0;
  std::string deadzone_norm = "euclidean";
  bool use_projection = false;
  std::vector<double> bounds_m_lower, bounds_m_upper, bounds_em_lower, bounds_em_upper;

  // simulation
  std::vector<double> x0, theta_m0, theta_em0;
  double horizon = 20.0;
  double dt = 1e-3;
  double control_period = 1e-2;
  double dt_log = 1e-2;
  double blowup_radius = 0.0;  // 0: 10 (1 + |x0|)

  // setpoint
  std::vector<double> x_d, u_d, x_d_dot;

  // solver
  int nodes = 9;
  int quadrature_order = 17;
  double gradient_tolerance = 1e-8;
  int max_iterations = 200;
  double warm_start_fraction = 0.1;

  // verify
  double verify_lambda = 0.1;
  std::vector<double> grid_x_lower, grid_x_upper, grid_x_count;
  std::vector<double> grid_theta_lower, grid_theta_upper, grid_theta_count;
  double eps_psd = 1e-8;
  std::vector<double> invariance_theta_m;  // p_m values per sample, concatenated

  // output
  std::string out_dir = ".";
  std::string csv = "trajectory.csv";
  std::string plot_data = "plot_data.json";
  std::string verification_report = "verification.json";
  bool svg = false;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Builds a scenario from parsed entries. Unknown keys, wrong types and
/// inconsistent dimensions throw Error(ConfigError) naming the key.
ScenarioConfig load_scenario(const std::vector<ConfigEntry>& entries);

/// Fills every empty list with its default for the selected system.
void resolve_defaults(ScenarioConfig& config);

/// Every key with its effective value; reparses to an identical config.
std::string dump_scenario(const ScenarioConfig& config);

/// Runtime objects built from a resolved config.
struct Scenario {
  ScenarioConfig config;
  SystemModel model;
  MetricField metric;
  CurveBasis basis;
  GeodesicOptions geodesic_options;
  ControllerConfig controller;
  SimulationOptions sim;
  Setpoint setpoint;
  VectorXd x0, theta_m0, theta_em0;
  VerificationGrid grid;
  std::vector<VectorXd> invariance_samples;

  ControllerContext context() const { return {model, metric, basis, geodesic_options}; }
};

Scenario build_scenario(ScenarioConfig config);

/// Reads, applies overrides, resolves and builds in one go.
Scenario load_scenario_file(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides = {});

}  // namespace accm
