#include "accm/output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <vector>

#include "accm/error.hpp"

namespace accm {

namespace {

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void append(std::vector<std::string>& names, const std::string& stem, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) names.push_back(stem + std::to_string(i + 1));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::ConfigError, "cannot open output file " + path.string());
  return os;
}

struct Series {
  std::string label;
  std::vector<double> values;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

void svg_chart(const std::filesystem::path& path, const std::string& title,
               const std::vector<double>& t, const std::vector<Series>& series) {
  constexpr double W = 640, H = 360, L = 60, R = 20, T = 30, B = 40;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& s : series) {
    for (double v : s.values) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!(ymax > ymin)) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double tmin = t.empty() ? 0.0 : t.front();
  const double tmax = t.empty() || t.back() == tmin ? tmin + 1.0 : t.back();
  auto px = [&](double v) { return L + (v - tmin) / (tmax - tmin) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - T - B); };

  std::ofstream os = open_out(path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\">" << title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\">" << fmt9(tmin) << "</text>\n";
  os << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\">"
     << fmt9(tmax) << " s</text>\n";
  os << "<text x=\"" << L - 4 << "\" y=\"" << py(ymax) + 4 << "\" text-anchor=\"end\">"
     << fmt9(ymax) << "</text>\n";
  os << "<text x=\"" << L - 4 << "\" y=\"" << py(ymin) << "\" text-anchor=\"end\">" << fmt9(ymin)
     << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < t.size(); ++i) {
      os << px(t[i]) << "," << py(series[k].values[i]) << " ";
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (k + 1) << "\" text-anchor=\"end\" fill=\""
       << color << "\">" << series[k].label << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace

std::string csv_header(const TrajectoryLog& log) {
  std::vector<std::string> names{"t"};
  if (!log.rows.empty()) {
    const auto& r = log.rows.front();
    append(names, "x", r.x.size());
    append(names, "xd", r.x_d.size());
    append(names, "u", r.u.size());
    append(names, "uccm", r.u_ccm.size());
    append(names, "theta_m", r.theta_m.size());
    append(names, "theta_em", r.theta_em.size());
  }
  for (const char* s : {"E", "slack", "geodesic_converged", "geodesic_iterations"}) {
    names.emplace_back(s);
  }
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
  return out;
}

void write_csv(std::ostream& os, const TrajectoryLog& log) {
  os << csv_header(log) << '\n';
  for (const auto& r : log.rows) {
    os << fmt9(r.t);
    for (const VectorXd* v : {&r.x, &r.x_d, &r.u, &r.u_ccm, &r.theta_m, &r.theta_em}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) os << ',' << fmt9((*v)(i));
    }
    os << ',' << fmt9(r.energy) << ',' << fmt9(r.slack) << ',' << (r.geodesic_converged ? 1 : 0)
       << ',' << r.geodesic_iterations << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const TrajectoryLog& log) {
  std::ofstream os = open_out(path);
  write_csv(os, log);
}

void write_plot_data(const std::filesystem::path& path, const TrajectoryLog& log) {
  nlohmann::json j;
  std::vector<double> t;
  for (const auto& r : log.rows) t.push_back(r.t);
  auto columns = [&](auto getter, Eigen::Index count) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < count; ++i) {
      std::vector<double> col;
      for (const auto& r : log.rows) col.push_back(getter(r)(i));
      arr.push_back(col);
    }
    return arr;
  };
  const Eigen::Index n = log.rows.empty() ? 0 : log.rows.front().x.size();
  const Eigen::Index pm = log.rows.empty() ? 0 : log.rows.front().theta_m.size();
  const Eigen::Index pem = log.rows.empty() ? 0 : log.rows.front().theta_em.size();
  j["states"] = {{"t", t},
                 {"x", columns([](const LogRow& r) -> const VectorXd& { return r.x; }, n)},
                 {"x_d", columns([](const LogRow& r) -> const VectorXd& { return r.x_d; }, n)}};
  j["parameters"] = {
      {"t", t},
      {"theta_m", columns([](const LogRow& r) -> const VectorXd& { return r.theta_m; }, pm)},
      {"theta_em", columns([](const LogRow& r) -> const VectorXd& { return r.theta_em; }, pem)}};
  std::vector<double> e;
  for (const auto& r : log.rows) e.push_back(r.energy);
  j["energy"] = {{"t", t}, {"E", e}};
  j["status"] = log.status == SimulationStatus::Completed ? "completed" : "diverged";
  std::ofstream os = open_out(path);
  os << j.dump(1) << '\n';
}

void write_svg_charts(const std::filesystem::path& dir, const TrajectoryLog& log) {
  std::vector<double> t;
  for (const auto& r : log.rows) t.push_back(r.t);
  if (log.rows.empty()) return;
  const auto& first = log.rows.front();

  std::vector<Series> states;
  for (Eigen::Index i = 0; i < first.x.size(); ++i) {
    Series s{"x" + std::to_string(i + 1), {}};
    for (const auto& r : log.rows) s.values.push_back(r.x(i));
    states.push_back(std::move(s));
  }
  svg_chart(dir / "states.svg", "States", t, states);

  std::vector<Series> params;
  for (Eigen::Index i = 0; i < first.theta_em.size(); ++i) {
    Series s{"theta_em" + std::to_string(i + 1), {}};
    for (const auto& r : log.rows) s.values.push_back(r.theta_em(i));
    params.push_back(std::move(s));
  }
  for (Eigen::Index i = 0; i < first.theta_m.size(); ++i) {
    Series s{"theta_m" + std::to_string(i + 1), {}};
    for (const auto& r : log.rows) s.values.push_back(r.theta_m(i));
    params.push_back(std::move(s));
  }
  svg_chart(dir / "parameters.svg", "Parameter estimates", t, params);

  Series e{"E", {}};
  for (const auto& r : log.rows) e.values.push_back(r.energy);
  svg_chart(dir / "energy.svg", "Riemannian energy", t, {e});
}

bool VerificationSummary::pass() const {
  return ccm.pass && killing_residual <= tolerance_killing && lemma4_residual <= tolerance_lemma4 &&
         invariance_pass;
}

void write_verification_text(std::ostream& os, const VerificationSummary& s) {
  os << std::setprecision(9);
  os << "dual CCM condition at lambda = " << s.ccm.lambda << ": "
     << (s.ccm.pass ? "PASS" : "FAIL") << '\n';
  os << "  max projected eigenvalue = " << s.ccm.max_eigenvalue << '\n';
  os << "  worst point x = [" << s.ccm.worst_x.transpose() << "], theta = ["
     << s.ccm.worst_theta.transpose() << "] (grid index " << s.ccm.worst_index << ")\n";
  os << "  lambda_certified = " << s.ccm.lambda_certified << '\n';
  os << "Killing residual = " << s.killing_residual << " ("
     << (s.killing_residual <= s.tolerance_killing ? "PASS" : "FAIL") << ")\n";
  os << "metric-derivative identity residual = " << s.lemma4_residual << " ("
     << (s.lemma4_residual <= s.tolerance_lemma4 ? "PASS" : "FAIL") << ")\n";
  os << "matched invariance over " << s.invariance_samples << " samples: "
     << (s.invariance_pass ? "PASS" : "FAIL") << '\n';
  os << "overall: " << (s.pass() ? "PASS" : "FAIL") << '\n';
}

void write_verification_json(const std::filesystem::path& path, const VerificationSummary& s) {
  auto vec = [](const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json j;
  j["lambda"] = s.ccm.lambda;
  j["pass"] = s.pass();
  j["dual_ccm"] = {{"pass", s.ccm.pass},
                   {"max_eigenvalue", s.ccm.max_eigenvalue},
                   {"worst_x", vec(s.ccm.worst_x)},
                   {"worst_theta", vec(s.ccm.worst_theta)},
                   {"worst_index", s.ccm.worst_index},
                   {"lambda_certified", s.ccm.lambda_certified}};
  j["killing_residual_max"] = s.killing_residual;
  j["lemma4_residual_max"] = s.lemma4_residual;
  j["matched_invariance"] = {{"pass", s.invariance_pass}, {"samples", s.invariance_samples}};
  std::ofstream os = open_out(path);
  os << j.dump(2) << '\n';
}

}  // namespace accm
