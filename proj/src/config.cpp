#include "accm/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <variant>

#include "accm/error.hpp"
#include "accm/example_system.hpp"
#include "accm/expression.hpp"

namespace accm {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + text.size();
}

// Reads a double-quoted string starting at text[pos] == '"'; pos ends past
// the closing quote.
std::string read_quoted(const std::string& text, std::size_t& pos, const std::string& key) {
  std::string out;
  for (++pos; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '\\' && pos + 1 < text.size()) {
      out += text[++pos];
    } else if (c == '"') {
      ++pos;
      return out;
    } else {
      out += c;
    }
  }
  config_error(key + ": unterminated string");
}

bool is_bare_word(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_' && c != '-') {
      return false;
    }
  }
  return true;
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

// ---------------------------------------------------------------------------
// key table

using C = ScenarioConfig;
using Field = std::variant<std::string C::*, int C::*, double C::*, bool C::*,
                           std::vector<double> C::*, std::vector<std::string> C::*>;

struct Binding {
  const char* key;
  Field field;
};

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = {
      {"system.name", &C::system_name},
      {"system.n", &C::n},
      {"system.m", &C::m},
      {"system.p_m", &C::p_m},
      {"system.p_em", &C::p_em},
      {"system.f", &C::f},
      {"system.B", &C::B},
      {"system.phi", &C::phi},
      {"system.varrho", &C::varrho},
      {"system.varrho_dx1", &C::varrho_dx1},
      {"system.indicator", &C::indicator},
      {"system.theta_true_m", &C::theta_true_m},
      {"system.theta_true_em", &C::theta_true_em},
      {"metric.name", &C::metric_name},
      {"metric.W", &C::metric_W},
      {"metric.w_lower", &C::w_lower},
      {"metric.w_upper", &C::w_upper},
      {"controller.lambda", &C::lambda},
      {"controller.gamma_m", &C::gamma_m},
      {"controller.gamma_em", &C::gamma_em},
      {"controller.kappa", &C::kappa},
      {"controller.adapt_m", &C::adapt_m},
      {"controller.adapt_em", &C::adapt_em},
      {"controller.robust", &C::robust},
      {"controller.use_deadzone", &C::use_deadzone},
      {"controller.deadzone", &C::deadzone},
      {"controller.deadzone_norm", &C::deadzone_norm},
      {"controller.use_projection", &C::use_projection},
      {"controller.bounds_m_lower", &C::bounds_m_lower},
      {"controller.bounds_m_upper", &C::bounds_m_upper},
      {"controller.bounds_em_lower", &C::bounds_em_lower},
      {"controller.bounds_em_upper", &C::bounds_em_upper},
      {"sim.x0", &C::x0},
      {"sim.theta_m0", &C::theta_m0},
      {"sim.theta_em0", &C::theta_em0},
      {"sim.horizon", &C::horizon},
      {"sim.dt", &C::dt},
      {"sim.control_period", &C::control_period},
      {"sim.dt_log", &C::dt_log},
      {"sim.blowup_radius", &C::blowup_radius},
      {"setpoint.x_d", &C::x_d},
      {"setpoint.u_d", &C::u_d},
      {"setpoint.x_d_dot", &C::x_d_dot},
      {"solver.nodes", &C::nodes},
      {"solver.quadrature_order", &C::quadrature_order},
      {"solver.gradient_tolerance", &C::gradient_tolerance},
      {"solver.max_iterations", &C::max_iterations},
      {"solver.warm_start_fraction", &C::warm_start_fraction},
      {"verify.lambda", &C::verify_lambda},
      {"verify.x_lower", &C::grid_x_lower},
      {"verify.x_upper", &C::grid_x_upper},
      {"verify.x_count", &C::grid_x_count},
      {"verify.theta_lower", &C::grid_theta_lower},
      {"verify.theta_upper", &C::grid_theta_upper},
      {"verify.theta_count", &C::grid_theta_count},
      {"verify.eps_psd", &C::eps_psd},
      {"verify.invariance_theta_m", &C::invariance_theta_m},
      {"output.dir", &C::out_dir},
      {"output.csv", &C::csv},
      {"output.plot_data", &C::plot_data},
      {"output.verification_report", &C::verification_report},
      {"output.svg", &C::svg},
  };
  return table;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void assign(ScenarioConfig& c, const Binding& b, const ConfigValue& v) {
  const std::string key = b.key;
  using K = ConfigValue::Kind;
  std::visit(
      overloaded{
          [&](std::string C::*p) {
            if (v.kind != K::String) config_error(key + ": expected a string");
            c.*p = v.string;
          },
          [&](int C::*p) {
            if (v.kind != K::Number || v.number != std::floor(v.number) ||
                std::abs(v.number) > 1e9) {
              config_error(key + ": expected an integer");
            }
            c.*p = static_cast<int>(v.number);
          },
          [&](double C::*p) {
            if (v.kind != K::Number) config_error(key + ": expected a number");
            c.*p = v.number;
          },
          [&](bool C::*p) {
            if (v.kind != K::Bool) config_error(key + ": expected true or false");
            c.*p = v.boolean;
          },
          [&](std::vector<double> C::*p) {
            if (v.kind != K::List || !v.strings.empty()) {
              config_error(key + ": expected a list of numbers");
            }
            c.*p = v.numbers;
          },
          [&](std::vector<std::string> C::*p) {
            if (v.kind != K::List || !v.numbers.empty()) {
              config_error(key + ": expected a list of strings");
            }
            c.*p = v.strings;
          },
      },
      b.field);
}

std::string render(const ScenarioConfig& c, const Binding& b) {
  return std::visit(
      overloaded{
          [&](std::string C::*p) { return quote(c.*p); },
          [&](int C::*p) { return std::to_string(c.*p); },
          [&](double C::*p) { return fmt17(c.*p); },
          [&](bool C::*p) { return std::string(c.*p ? "true" : "false"); },
          [&](std::vector<double> C::*p) {
            std::string out = "[";
            for (std::size_t i = 0; i < (c.*p).size(); ++i) {
              out += (i ? ", " : "") + fmt17((c.*p)[i]);
            }
            return out + "]";
          },
          [&](std::vector<std::string> C::*p) {
            std::string out = "[";
            for (std::size_t i = 0; i < (c.*p).size(); ++i) {
              out += (i ? ", " : "") + quote((c.*p)[i]);
            }
            return out + "]";
          },
      },
      b.field);
}

// ---------------------------------------------------------------------------
// dimension checks and defaults

void require_size(const std::string& key, std::size_t have, std::size_t want) {
  if (have != want) {
    config_error(key + ": expected " + std::to_string(want) + " entries, got " +
                 std::to_string(have));
  }
}

void default_fill(std::vector<double>& v, std::size_t size, double value) {
  if (v.empty()) v.assign(size, value);
}

VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<Expression> compile(const std::vector<std::string>& texts, const std::string& key,
                                int n, int p) {
  std::vector<Expression> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    try {
      out.push_back(Expression::parse(t, n, p));
    } catch (const Error& e) {
      config_error(key + ": " + e.what());
    }
  }
  return out;
}

bool is_builtin_system(const ScenarioConfig& c) { return c.system_name == example::kSystemName; }

SystemModel build_inline_system(const ScenarioConfig& c) {
  const int n = c.n, m = c.m, pm = c.p_m, pem = c.p_em;
  auto f = compile(c.f, "system.f", n, 0);
  auto B = compile(c.B, "system.B", n, 0);
  auto phi = compile(c.phi, "system.phi", n, 0);
  auto varrho = compile(c.varrho, "system.varrho", n, 0);
  auto dx1 = compile(c.varrho_dx1, "system.varrho_dx1", n, 0);

  auto matrix = [](std::vector<Expression> e, int rows, int cols) {
    return [e = std::move(e), rows, cols](const VectorXd& x) {
      MatrixXd out(rows, cols);
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) out(i, j) = e[static_cast<std::size_t>(i * cols + j)](x);
      }
      return out;
    };
  };
  auto vector = [](std::vector<Expression> e) {
    return [e = std::move(e)](const VectorXd& x) {
      VectorXd out(static_cast<Eigen::Index>(e.size()));
      for (std::size_t i = 0; i < e.size(); ++i) out(static_cast<Eigen::Index>(i)) = e[i](x);
      return out;
    };
  };

  SystemModel model;
  model.name = c.system_name;
  model.n = n;
  model.m = m;
  model.p_m = pm;
  model.p_em = pem;
  model.f = vector(std::move(f));
  model.B = matrix(std::move(B), n, m);
  model.phi = matrix(std::move(phi), pm, m);
  model.varrho = matrix(std::move(varrho), pem, n);
  model.varrho_dx1 = vector(std::move(dx1));
  model.indicator = to_vector(c.indicator);
  model.theta_true_m = to_vector(c.theta_true_m);
  model.theta_true_em = to_vector(c.theta_true_em);
  return model;
}

VerificationGrid build_grid(const ScenarioConfig& c) {
  VerificationGrid grid;
  for (std::size_t i = 0; i < c.grid_x_lower.size(); ++i) {
    grid.x_axes.push_back({c.grid_x_lower[i], c.grid_x_upper[i], static_cast<int>(c.grid_x_count[i])});
  }
  for (std::size_t i = 0; i < c.grid_theta_lower.size(); ++i) {
    grid.theta_axes.push_back(
        {c.grid_theta_lower[i], c.grid_theta_upper[i], static_cast<int>(c.grid_theta_count[i])});
  }
  grid.eps_psd = c.eps_psd;
  try {
    grid.validate(c.n, c.p_em);
  } catch (const Error& e) {
    config_error(std::string("verify: ") + e.what());
  }
  return grid;
}

MetricField build_metric(const ScenarioConfig& c, const VerificationGrid& grid) {
  MetricField metric;
  if (c.metric_name == example::kSystemName) {
    if (c.n != 3 || c.p_em != 1) {
      config_error("metric.name: the built-in metric needs n = 3 and p_em = 1");
    }
    metric = example::make_metric();
  } else if (c.metric_name == "identity") {
    metric = identity_metric(c.n, c.p_em);
  } else if (c.metric_name == "inline") {
    require_size("metric.W", c.metric_W.size(), static_cast<std::size_t>(c.n * c.n));
    auto W = compile(c.metric_W, "metric.W", c.n, c.p_em);
    const int n = c.n;
    auto dual = [W = std::move(W), n](const VectorXd& x, const VectorXd& th) {
      MatrixXd out(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) out(i, j) = W[static_cast<std::size_t>(i * n + j)](x, th);
      }
      return out;
    };
    metric = metric_from_dual("inline", c.n, c.p_em, dual, 1.0, 1.0);
    VectorXd x, th;
    if (c.w_lower <= 0.0 || c.w_upper <= 0.0) {
      // parameters vary jointly with x on the grid
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (long long k = 0; k < grid.size(); ++k) {
        grid.point(k, x, th);
        const auto [l, h] = scan_eigen_bounds(metric, {x}, {th});
        lo = std::min(lo, l);
        hi = std::max(hi, h);
      }
      if (!(lo > 0.0)) config_error("metric.W: dual metric is not positive definite on the grid");
      metric.w_lower = lo;
      metric.w_upper = hi;
    }
  } else {
    config_error("metric.name: unknown metric '" + c.metric_name +
                 "' (expected builtin.lopez_example, identity or inline)");
  }
  if (c.w_lower > 0.0) metric.w_lower = c.w_lower;
  if (c.w_upper > 0.0) metric.w_upper = c.w_upper;
  return metric;
}

std::optional<ParameterBounds> build_bounds(const std::vector<double>& lo,
                                            const std::vector<double>& hi) {
  if (lo.empty()) return std::nullopt;
  return ParameterBounds{to_vector(lo), to_vector(hi)};
}

}  // namespace

// ---------------------------------------------------------------------------

ConfigValue ConfigValue::parse(const std::string& raw, const std::string& key) {
  const std::string text = trim(raw);
  ConfigValue v;
  if (text.empty()) config_error(key + ": missing value");
  if (text == "true" || text == "false") {
    v.kind = Kind::Bool;
    v.boolean = text == "true";
    return v;
  }
  if (text.front() == '"') {
    std::size_t pos = 0;
    v.kind = Kind::String;
    v.string = read_quoted(text, pos, key);
    if (pos != text.size()) config_error(key + ": trailing characters after string");
    return v;
  }
  if (text.front() == '[') {
    if (text.back() != ']') config_error(key + ": unterminated list");
    v.kind = Kind::List;
    std::size_t pos = 1;
    const std::size_t end = text.size() - 1;
    auto skip = [&] {
      while (pos < end && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    skip();
    while (pos < end) {
      if (text[pos] == '"') {
        v.strings.push_back(read_quoted(text, pos, key));
      } else {
        const auto comma = text.find(',', pos);
        const std::size_t stop = comma == std::string::npos || comma > end ? end : comma;
        double d = 0.0;
        const std::string item = trim(text.substr(pos, stop - pos));
        if (!parse_number(item, d)) config_error(key + ": bad list item '" + item + "'");
        v.numbers.push_back(d);
        pos = stop;
      }
      skip();
      if (pos < end) {
        if (text[pos] != ',') config_error(key + ": expected ',' in list");
        ++pos;
        skip();
        if (pos == end) config_error(key + ": trailing ',' in list");
      }
    }
    if (!v.numbers.empty() && !v.strings.empty()) {
      config_error(key + ": list mixes numbers and strings");
    }
    return v;
  }
  double d = 0.0;
  if (parse_number(text, d)) {
    v.kind = Kind::Number;
    v.number = d;
    return v;
  }
  if (is_bare_word(text)) {
    v.kind = Kind::String;
    v.string = text;
    return v;
  }
  config_error(key + ": cannot parse value '" + text + "'");
}

std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& origin) {
  std::vector<ConfigEntry> entries;
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = origin + ":" + std::to_string(number);
    if (eq == std::string::npos) config_error(where + ": expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) config_error(where + ": empty key");
    for (const auto& e : entries) {
      if (e.key == key) config_error(where + ": duplicate key " + key);
    }
    entries.push_back({key, ConfigValue::parse(body.substr(eq + 1), key), number});
  }
  return entries;
}

std::vector<ConfigEntry> read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) config_error("cannot open config file " + path.string() + ": file not found");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

void apply_override(std::vector<ConfigEntry>& entries, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) config_error("override '" + assignment + "': expected key=value");
  const std::string key = trim(assignment.substr(0, eq));
  ConfigValue value = ConfigValue::parse(assignment.substr(eq + 1), key);
  for (auto& e : entries) {
    if (e.key == key) {
      e.value = std::move(value);
      return;
    }
  }
  entries.push_back({key, std::move(value), 0});
}

ScenarioConfig load_scenario(const std::vector<ConfigEntry>& entries) {
  ScenarioConfig c;
  for (const auto& e : entries) {
    const Binding* found = nullptr;
    for (const auto& b : bindings()) {
      if (e.key == b.key) found = &b;
    }
    if (!found) {
      config_error("unknown config key '" + e.key + "'" +
                   (e.line ? " (line " + std::to_string(e.line) + ")" : std::string()));
    }
    assign(c, *found, e.value);
  }
  return c;
}

void resolve_defaults(ScenarioConfig& c) {
  const bool builtin = is_builtin_system(c);
  if (builtin) {
    const SystemModel ex = example::make_system();
    auto match = [](const char* key, int& have, int want) {
      if (have != 0 && have != want) {
        config_error(std::string(key) + ": built-in system has " + std::to_string(want));
      }
      have = want;
    };
    match("system.n", c.n, ex.n);
    match("system.m", c.m, ex.m);
    match("system.p_m", c.p_m, ex.p_m);
    match("system.p_em", c.p_em, ex.p_em);
    const std::pair<const char*, const std::vector<std::string>*> inline_keys[] = {
        {"system.f", &c.f},     {"system.B", &c.B}, {"system.phi", &c.phi},
        {"system.varrho", &c.varrho}, {"system.varrho_dx1", &c.varrho_dx1}};
    for (const auto& [key, value] : inline_keys) {
      if (!value->empty()) config_error(std::string(key) + ": not allowed with the built-in system");
    }
    if (c.indicator.empty()) c.indicator = {ex.indicator.data(), ex.indicator.data() + ex.m};
    if (c.theta_true_m.empty()) {
      c.theta_true_m = {ex.theta_true_m.data(), ex.theta_true_m.data() + ex.p_m};
    }
    if (c.theta_true_em.empty()) {
      c.theta_true_em = {ex.theta_true_em.data(), ex.theta_true_em.data() + ex.p_em};
    }
    if (c.x0.empty()) c.x0 = {1.0, 1.0, 1.0};
    if (c.theta_em0.empty()) c.theta_em0 = {1.0};
    if (c.theta_m0.empty()) c.theta_m0 = {0.0, -0.5};
    if (c.grid_x_lower.empty()) {
      c.grid_x_lower = {-3.0, 0.0, 0.0};
      c.grid_x_upper = {3.0, 0.0, 0.0};
      c.grid_x_count = {61, 1, 1};
    }
    if (c.grid_theta_lower.empty()) {
      c.grid_theta_lower = {-2.0};
      c.grid_theta_upper = {2.0};
      c.grid_theta_count = {41};
    }
    if (c.invariance_theta_m.empty()) c.invariance_theta_m = {-0.5, -1.5, 2.0, 2.0, 0.0, 0.0};
  } else if (c.system_name == "inline") {
    if (c.n <= 0 || c.m <= 0 || c.p_m < 0 || c.p_em < 0) {
      config_error("system.n, system.m must be > 0 and system.p_m, system.p_em >= 0");
    }
    const auto n = static_cast<std::size_t>(c.n), m = static_cast<std::size_t>(c.m);
    const auto pm = static_cast<std::size_t>(c.p_m), pem = static_cast<std::size_t>(c.p_em);
    require_size("system.f", c.f.size(), n);
    require_size("system.B", c.B.size(), n * m);
    if (c.phi.empty()) c.phi.assign(pm * m, "0");
    if (c.varrho.empty()) c.varrho.assign(pem * n, "0");
    if (c.varrho_dx1.empty()) c.varrho_dx1.assign(pem, "0");
    require_size("system.phi", c.phi.size(), pm * m);
    require_size("system.varrho", c.varrho.size(), pem * n);
    require_size("system.varrho_dx1", c.varrho_dx1.size(), pem);
    if (c.indicator.empty()) {
      c.indicator.assign(m, 0.0);
      c.indicator[0] = 1.0;
    }
    default_fill(c.theta_true_m, pm, 0.0);
    default_fill(c.theta_true_em, pem, 0.0);
    default_fill(c.x0, n, 0.0);
    default_fill(c.theta_m0, pm, 0.0);
    default_fill(c.theta_em0, pem, 0.0);
    if (c.grid_x_lower.empty()) {
      c.grid_x_lower.assign(n, -1.0);
      c.grid_x_upper.assign(n, 1.0);
      c.grid_x_count.assign(n, 5.0);
    }
    if (c.grid_theta_lower.empty() && pem > 0) {
      c.grid_theta_lower.assign(pem, -1.0);
      c.grid_theta_upper.assign(pem, 1.0);
      c.grid_theta_count.assign(pem, 5.0);
    }
    default_fill(c.invariance_theta_m, pm, 0.0);
  } else {
    config_error("system.name: unknown system '" + c.system_name + "' (expected " +
                 example::kSystemName + " or inline)");
  }

  const auto n = static_cast<std::size_t>(c.n), m = static_cast<std::size_t>(c.m);
  const auto pm = static_cast<std::size_t>(c.p_m), pem = static_cast<std::size_t>(c.p_em);
  default_fill(c.gamma_m, pm, 1.0);
  default_fill(c.gamma_em, pem, 1.0);
  default_fill(c.x_d, n, 0.0);
  default_fill(c.u_d, m, 0.0);
  default_fill(c.x_d_dot, n, 0.0);

  require_size("system.indicator", c.indicator.size(), m);
  require_size("system.theta_true_m", c.theta_true_m.size(), pm);
  require_size("system.theta_true_em", c.theta_true_em.size(), pem);
  require_size("controller.gamma_m", c.gamma_m.size(), pm);
  require_size("controller.gamma_em", c.gamma_em.size(), pem);
  require_size("sim.x0", c.x0.size(), n);
  require_size("sim.theta_m0", c.theta_m0.size(), pm);
  require_size("sim.theta_em0", c.theta_em0.size(), pem);
  require_size("setpoint.x_d", c.x_d.size(), n);
  require_size("setpoint.u_d", c.u_d.size(), m);
  require_size("setpoint.x_d_dot", c.x_d_dot.size(), n);
  require_size("verify.x_lower", c.grid_x_lower.size(), n);
  require_size("verify.x_upper", c.grid_x_upper.size(), n);
  require_size("verify.x_count", c.grid_x_count.size(), n);
  require_size("verify.theta_lower", c.grid_theta_lower.size(), pem);
  require_size("verify.theta_upper", c.grid_theta_upper.size(), pem);
  require_size("verify.theta_count", c.grid_theta_count.size(), pem);
  if (pm > 0 && c.invariance_theta_m.size() % pm != 0) {
    config_error("verify.invariance_theta_m: length must be a multiple of system.p_m");
  }
  auto pair = [](const char* lo_key, const std::vector<double>& lo, const char* hi_key,
                 const std::vector<double>& hi, std::size_t p) {
    if (lo.empty() && hi.empty()) return;
    require_size(lo_key, lo.size(), p);
    require_size(hi_key, hi.size(), p);
  };
  pair("controller.bounds_m_lower", c.bounds_m_lower, "controller.bounds_m_upper",
       c.bounds_m_upper, pm);
  pair("controller.bounds_em_lower", c.bounds_em_lower, "controller.bounds_em_upper",
       c.bounds_em_upper, pem);
  if (c.deadzone_norm != "euclidean" && c.deadzone_norm != "metric") {
    config_error("controller.deadzone_norm: expected euclidean or metric");
  }
}

std::string dump_scenario(const ScenarioConfig& c) {
  std::string out;
  std::string section;
  for (const auto& b : bindings()) {
    const std::string key = b.key;
    const std::string head = key.substr(0, key.find('.'));
    if (head != section) {
      if (!section.empty()) out += '\n';
      out += "# " + head + '\n';
      section = head;
    }
    out += key + " = " + render(c, b) + '\n';
  }
  return out;
}

Scenario build_scenario(ScenarioConfig config) {
  resolve_defaults(config);
  Scenario s;
  const auto& c = config;

  if (is_builtin_system(c)) {
    s.model = example::make_system();
    s.model.indicator = to_vector(c.indicator);
    s.model.theta_true_m = to_vector(c.theta_true_m);
    s.model.theta_true_em = to_vector(c.theta_true_em);
  } else {
    s.model = build_inline_system(c);
  }
  try {
    s.model.validate(to_vector(c.x0));
  } catch (const Error& e) {
    config_error(std::string("system: ") + e.what());
  }

  s.grid = build_grid(c);
  s.metric = build_metric(c, s.grid);

  if (c.nodes < 2) config_error("solver.nodes: need at least 2");
  if (c.quadrature_order < 2) config_error("solver.quadrature_order: need at least 2");
  if (!(c.gradient_tolerance > 0.0)) config_error("solver.gradient_tolerance: must be > 0");
  if (c.max_iterations < 0) config_error("solver.max_iterations: must be >= 0");
  s.basis = make_curve_basis(c.nodes, c.quadrature_order);
  s.geodesic_options.gradient_tolerance = c.gradient_tolerance;
  s.geodesic_options.max_iterations = c.max_iterations;
  s.geodesic_options.warm_start_fraction = c.warm_start_fraction;

  auto& k = s.controller;
  k.lambda = c.lambda;
  k.gamma_m = to_vector(c.gamma_m);
  k.gamma_em = to_vector(c.gamma_em);
  k.kappa = c.kappa;
  k.adapt_m = c.adapt_m;
  k.adapt_em = c.adapt_em;
  k.robust = c.robust;
  k.use_deadzone = c.use_deadzone;
  k.deadzone = c.deadzone;
  k.deadzone_norm = c.deadzone_norm == "metric" ? DeadzoneNorm::Metric : DeadzoneNorm::Euclidean;
  k.use_projection = c.use_projection;
  k.bounds_m = build_bounds(c.bounds_m_lower, c.bounds_m_upper);
  k.bounds_em = build_bounds(c.bounds_em_lower, c.bounds_em_upper);
  try {
    k.validate(s.model);
  } catch (const Error& e) {
    config_error(e.what());
  }

  s.sim.horizon = c.horizon;
  s.sim.dt = c.dt;
  s.sim.control_period = c.control_period;
  s.sim.dt_log = c.dt_log;
  if (c.blowup_radius > 0.0) s.sim.blowup_radius = c.blowup_radius;
  try {
    s.sim.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }

  s.setpoint = {to_vector(c.x_d), to_vector(c.u_d), to_vector(c.x_d_dot)};
  s.x0 = to_vector(c.x0);
  s.theta_m0 = to_vector(c.theta_m0);
  s.theta_em0 = to_vector(c.theta_em0);
  if (c.p_m > 0) {
    for (std::size_t i = 0; i < c.invariance_theta_m.size(); i += static_cast<std::size_t>(c.p_m)) {
      s.invariance_samples.push_back(
          Eigen::Map<const VectorXd>(c.invariance_theta_m.data() + i, c.p_m));
    }
  }
  s.config = std::move(config);
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides) {
  auto entries = read_config_file(path);
  for (const auto& o : overrides) apply_override(entries, o);
  return build_scenario(load_scenario(entries));
}

}  // namespace accm
