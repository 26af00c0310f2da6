// accm: simulate, verify and inspect adaptive contraction-metric controllers.
//
// Exit codes: 0 ok, 1 config or solver error, 2 divergence detected (the
// partial log is still written), 3 verification failure, 4 geodesic
// optimizer diverged.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "accm/config.hpp"
#include "accm/error.hpp"
#include "accm/output.hpp"
#include "accm/simulate.hpp"
#include "accm/verify.hpp"

namespace fs = std::filesystem;
using namespace accm;

namespace {

enum Exit { kOk = 0, kError = 1, kDiverged = 2, kVerifyFailed = 3, kOptimizerDiverged = 4 };

struct Globals {
  std::string out;
  bool svg = false;
  bool dump = false;
  bool quiet = false;
  std::vector<std::string> overrides;
};

int exit_for(const Error& e) {
  return e.kind() == ErrorKind::OptimizerDiverged ? kOptimizerDiverged : kError;
}

fs::path output_dir(const Globals& g, const Scenario& s) {
  fs::path dir = g.out.empty() ? fs::path(s.config.out_dir) : fs::path(g.out);
  fs::create_directories(dir);
  return dir;
}

Scenario load(const std::string& path, const Globals& g) {
  return load_scenario_file(path, g.overrides);
}

VectorXd parse_point(const std::string& text, int n, const char* flag) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream is(cleaned);
  std::vector<double> values;
  std::string token;
  while (is >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) {
      throw Error(ErrorKind::InvalidArgument,
                  std::string(flag) + ": cannot parse '" + token + "' as a number");
    }
    values.push_back(v);
  }
  if (static_cast<int>(values.size()) != n) {
    throw Error(ErrorKind::InvalidArgument, std::string(flag) + ": expected " + std::to_string(n) +
                                                " components, got " +
                                                std::to_string(values.size()));
  }
  return Eigen::Map<VectorXd>(values.data(), n);
}

int run_simulate(const Scenario& s, const Globals& g, std::ostream& msg) {
  const TrajectoryLog log =
      simulate(s.context(), s.controller, s.setpoint, s.x0, s.theta_m0, s.theta_em0, s.sim);
  const fs::path dir = output_dir(g, s);
  write_csv(dir / s.config.csv, log);
  if (!s.config.plot_data.empty()) write_plot_data(dir / s.config.plot_data, log);
  if (g.svg || s.config.svg) write_svg_charts(dir, log);

  const auto& last = log.rows.back();
  if (!g.quiet) {
    msg << "rows " << log.rows.size() << ", end time " << log.end_time << " s\n";
    msg << "final |x - x_d| = " << (last.x - last.x_d).norm() << ", peak = " << peak_error(log)
        << '\n';
    msg << "final theta_m = [" << last.theta_m.transpose() << "], theta_em = ["
        << last.theta_em.transpose() << "]\n";
    if (log.geodesic_warnings > 0) {
      msg << "warning: " << log.geodesic_warnings << " control cycles: " << log.first_warning
          << '\n';
    }
    msg << "wrote " << (dir / s.config.csv).string() << '\n';
  }
  if (log.status == SimulationStatus::Diverged) {
    msg << "divergence detected at t = " << log.end_time << " s (|x| = " << last.x.norm()
        << ")\n";
    return kDiverged;
  }
  return kOk;
}

int run_verify(const Scenario& s, const Globals& g, std::ostream& msg) {
  VerificationSummary summary;
  summary.ccm = check_dual_ccm(s.model, s.metric, s.grid, s.config.verify_lambda);
  summary.killing_residual = check_killing(s.model, s.metric, s.grid);
  summary.lemma4_residual = check_lemma4_identity(s.model, s.metric, s.grid);
  const InvarianceReport inv = check_matched_invariance(s.model, s.metric, s.grid,
                                                        s.config.verify_lambda,
                                                        s.invariance_samples);
  summary.invariance_pass = inv.pass;
  summary.invariance_samples = static_cast<int>(s.invariance_samples.size());
  summary.ccm.killing_residual_max = summary.killing_residual;
  summary.ccm.lemma4_residual_max = summary.lemma4_residual;

  const fs::path dir = output_dir(g, s);
  write_verification_json(dir / s.config.verification_report, summary);
  if (!g.quiet) write_verification_text(msg, summary);
  if (!summary.pass()) {
    if (g.quiet) write_verification_text(msg, summary);
    return kVerifyFailed;
  }
  return kOk;
}

int run_geodesic(const Scenario& s, const std::string& p_text, const std::string& q_text,
                 const std::string& theta_text, std::ostream& msg) {
  const VectorXd p = parse_point(p_text, s.model.n, "--p");
  const VectorXd q = parse_point(q_text, s.model.n, "--q");
  const VectorXd theta =
      theta_text.empty() ? s.theta_em0 : parse_point(theta_text, s.metric.param_dim, "--theta");
  const Geodesic geo = solve_geodesic(p, q, s.metric, theta, s.basis, s.geodesic_options);
  msg.precision(12);
  msg << "E = " << geo.energy << '\n';
  msg << "L = " << (geo.energy > 0.0 ? curve_length(geo.nodes, s.metric, theta, s.basis) : 0.0) << '\n';
  msg << "converged = " << (geo.converged ? "true" : "false") << '\n';
  msg << "iterations = " << geo.iterations << '\n';
  msg << "gradient_norm = " << geo.gradient_norm << '\n';
  msg << "speed_residual = " << speed_constancy_residual(geo, s.metric, theta, s.basis) << '\n';
  msg << "tangent0 = [" << geo.tangent0.transpose() << "]\n";
  msg << "tangent1 = [" << geo.tangent1.transpose() << "]\n";
  msg << "nodes (s, gamma(s)):\n";
  for (Eigen::Index k = 0; k < geo.nodes.cols(); ++k) {
    msg << "  " << s.basis.nodes(k) << "  " << geo.nodes.col(k).transpose() << '\n';
  }
  return kOk;
}

template <class Fn>
int guarded(Fn&& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive control with control contraction metrics"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out, "output directory (overrides output.dir)");
  app.add_flag("--svg", g.svg, "also write SVG charts");
  app.add_flag("--dump-effective-config", g.dump,
               "print the fully resolved config and exit");
  app.add_flag("--quiet", g.quiet, "only report errors");
  app.add_option("--set", g.overrides, "override a config key, key=value (repeatable)");

  std::string config;
  auto* sim = app.add_subcommand("simulate", "run a closed-loop simulation");
  sim->add_option("config", config, "scenario config file")->required();
  sim->fallthrough();

  auto* ver = app.add_subcommand("verify-metric", "grid-certify the metric");
  ver->add_option("config", config, "scenario config file")->required();
  ver->fallthrough();

  std::string p_text, q_text, theta_text;
  auto* geo = app.add_subcommand("geodesic", "solve one geodesic");
  geo->add_option("config", config, "scenario config file")->required();
  geo->add_option("--p", p_text, "start point, comma separated")->required();
  geo->add_option("--q", q_text, "end point, comma separated")->required();
  geo->add_option("--theta", theta_text, "metric parameters (default: sim.theta_em0)");
  geo->fallthrough();

  std::vector<std::string> batch_configs;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* batch = app.add_subcommand("batch", "simulate several scenarios in parallel");
  batch->add_option("configs", batch_configs, "scenario config files")->required();
  batch->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  batch->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage errors share the config-error exit code
    return app.exit(e) == 0 ? kOk : kError;
  }

  if (batch->parsed()) {
    std::vector<int> codes(batch_configs.size(), kOk);
    std::vector<std::string> reports(batch_configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < batch_configs.size(); i = next++) {
        std::ostringstream os;
        codes[i] = guarded(
            [&] {
              Scenario s = load(batch_configs[i], g);
              Globals local = g;
              const fs::path base = g.out.empty() ? fs::path(s.config.out_dir) : fs::path(g.out);
              local.out = (base / fs::path(batch_configs[i]).stem()).string();
              return run_simulate(s, local, os);
            },
            os);
        reports[i] = os.str();
      }
    };
    std::vector<std::thread> pool;
    const std::size_t workers = std::min<std::size_t>(jobs, batch_configs.size());
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    int worst = kOk;
    for (std::size_t i = 0; i < batch_configs.size(); ++i) {
      if (!g.quiet || codes[i] != kOk) {
        std::cout << "== " << batch_configs[i] << " (exit " << codes[i] << ")\n" << reports[i];
      }
      worst = std::max(worst, codes[i]);
    }
    return worst;
  }

  return guarded(
      [&]() -> int {
        Scenario s = load(config, g);
        if (g.dump) {
          std::cout << dump_scenario(s.config);
          return kOk;
        }
        if (sim->parsed()) return run_simulate(s, g, std::cout);
        if (ver->parsed()) return run_verify(s, g, std::cout);
        return run_geodesic(s, p_text, q_text, theta_text, std::cout);
      },
      std::cerr);
}
