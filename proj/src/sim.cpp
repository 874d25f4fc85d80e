#include "ppc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ppc/errors.hpp"
#include "ppc/rk4.hpp"

namespace ppc {

std::string agent_column(int agent, const std::string& field) { return "a" + std::to_string(agent) + "_" + field; }

std::vector<std::string> trace_columns(const ScenarioConfig& cfg) {
  const int n = cfg.order();
  std::vector<std::string> cols = {"t"};
  for (int k = 0; k <= n; ++k) cols.push_back("y0_d" + std::to_string(k));
  cols.push_back("rho");
  cols.push_back("beta1");
  for (int i = 1; i <= cfg.n_agents(); ++i) {
    const int d = cfg.agents[static_cast<std::size_t>(i - 1)].plant.theta_dim();
    for (int k = 1; k <= n; ++k) cols.push_back(agent_column(i, "x" + std::to_string(k)));
    for (int k = 0; k < n; ++k) cols.push_back(agent_column(i, "yhat_d" + std::to_string(k)));
    for (const char* f : {"z", "zbar", "nu", "eps", "zeta_eps"}) cols.push_back(agent_column(i, f));
    for (int k = 1; k <= n; ++k) cols.push_back(agent_column(i, "e" + std::to_string(k)));
    for (int p = 1; p <= d; ++p) cols.push_back(agent_column(i, "theta_hat" + std::to_string(p)));
    for (const char* f : {"chi", "u_bar", "u", "beta2", "beta", "g", "work", "dissipation"})
      cols.push_back(agent_column(i, f));
  }
  return cols;
}

std::size_t Trace::index_of(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw SchemaMismatch("trace has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Trace::column(const std::string& name) const {
  const std::size_t j = index_of(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

DeltaBoundParams BoundSetup::params(const ScenarioConfig& cfg, bool use_kappa) const {
  DeltaBoundParams p;
  p.n_agents = cfg.n_agents();
  p.order = cfg.order();
  p.lambda = cfg.filter.lambda;
  p.iota = cfg.filter.rho.iota;
  p.rho0 = cfg.filter.rho.beta0;
  p.rho_inf = cfg.filter.rho.beta_inf;
  p.omega0 = omega0;
  p.sigma = use_kappa ? kappa : sigma;
  return p;
}

namespace {

// Offsets of each agent's block [x (n), ŷ chain (n), θ̂ (d), χ, work, dissipation]
// in the flat state.
struct StateLayout {
  int n = 0;
  std::vector<std::size_t> offset;
  std::vector<int> theta_dim;
  std::size_t total = 0;

  explicit StateLayout(const ScenarioConfig& cfg) : n(cfg.order()) {
    for (const AgentConfig& a : cfg.agents) {
      offset.push_back(total);
      theta_dim.push_back(a.plant.theta_dim());
      total += static_cast<std::size_t>(2 * n + a.plant.theta_dim() + 3);
    }
  }
  std::size_t x(int i) const { return offset[static_cast<std::size_t>(i)]; }
  std::size_t yhat(int i) const { return x(i) + static_cast<std::size_t>(n); }
  std::size_t theta(int i) const { return yhat(i) + static_cast<std::size_t>(n); }
  std::size_t chi(int i) const { return theta(i) + static_cast<std::size_t>(theta_dim[static_cast<std::size_t>(i)]); }
  // Verification monitors, integrated alongside the dynamics and never fed back.
  std::size_t work(int i) const { return chi(i) + 1; }
  std::size_t dissipation(int i) const { return chi(i) + 2; }

  bool is_monitor(std::size_t idx) const {
    for (std::size_t i = 0; i < offset.size(); ++i)
      if (idx == work(static_cast<int>(i)) || idx == dissipation(static_cast<int>(i))) return true;
    return false;
  }

  std::string name(std::size_t idx) const {
    for (std::size_t i = offset.size(); i-- > 0;) {
      if (idx >= offset[i]) {
        const auto local = static_cast<int>(idx - offset[i]);
        std::string what;
        if (local < n) {
          what = "x" + std::to_string(local + 1);
        } else if (local < 2 * n) {
          what = "yhat_d" + std::to_string(local - n);
        } else if (local < 2 * n + theta_dim[i]) {
          what = "theta_hat" + std::to_string(local - 2 * n + 1);
        } else if (local == 2 * n + theta_dim[i]) {
          what = "chi";
        } else if (local == 2 * n + theta_dim[i] + 1) {
          what = "work";
        } else {
          what = "dissipation";
        }
        return "agent " + std::to_string(i + 1) + " " + what;
      }
    }
    return "component " + std::to_string(idx);
  }
};

struct AgentEval {
  std::vector<double> z_derivs;
  double zbar = 0.0;
  double nu = 0.0;
  std::vector<double> beta2;
  ControlEvaluation control;
  double g = 0.0;
};

std::vector<FilterState> chains(const StateLayout& lay, std::span<const double> s) {
  std::vector<FilterState> out(lay.offset.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto b = s.begin() + static_cast<std::ptrdiff_t>(lay.yhat(static_cast<int>(i)));
    out[i].y_hat.assign(b, b + lay.n);
  }
  return out;
}

std::vector<double> consensus_derivs(int i, std::span<const FilterState> fs, const ScenarioConfig& cfg, double t) {
  std::vector<double> z(static_cast<std::size_t>(cfg.order()));
  for (int k = 0; k < cfg.order(); ++k)
    z[static_cast<std::size_t>(k)] = consensus_error(i, fs, cfg.topology, cfg.reference, t, k);
  return z;
}

// Everything the dynamics and the recorder need at one (t, state).
std::vector<AgentEval> evaluate(const ScenarioConfig& cfg, const StateLayout& lay, double t,
                                std::span<const double> s) {
  const int n = lay.n;
  const std::vector<FilterState> fs = chains(lay, s);
  std::vector<AgentEval> out(static_cast<std::size_t>(cfg.n_agents()));
  for (int i = 0; i < cfg.n_agents(); ++i) {
    const AgentConfig& a = cfg.agents[static_cast<std::size_t>(i)];
    AgentEval& ev = out[static_cast<std::size_t>(i)];
    ev.z_derivs = consensus_derivs(i, fs, cfg, t);
    ev.zbar = filtered_consensus(ev.z_derivs, cfg.filter.lambda);
    try {
      ev.nu = filter_input(ev.zbar, cfg.filter.rho, t, cfg.filter.c[static_cast<std::size_t>(i)]);
    } catch (const FunnelViolation& e) {
      throw FunnelViolation(e.value(), e.bound(), e.time(), "filtered consensus error of agent " + std::to_string(i + 1));
    }
    ev.beta2.resize(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) ev.beta2[static_cast<std::size_t>(k)] = pf_deriv(a.controller.beta2, t, k);

    const std::span<const double> x = s.subspan(lay.x(i), static_cast<std::size_t>(n));
    AdaptiveState ad;
    ad.theta_hat.assign(s.begin() + static_cast<std::ptrdiff_t>(lay.theta(i)),
                        s.begin() + static_cast<std::ptrdiff_t>(lay.chi(i)));
    ad.chi = s[lay.chi(i)];
    try {
      ev.control = backstepping(x, fs[static_cast<std::size_t>(i)].y_hat, ev.beta2, ad, ev.nu, a.controller,
                                a.plant.phi, t);
    } catch (const FunnelViolation& e) {
      throw FunnelViolation(e.value(), e.bound(), e.time(), "tracking error of agent " + std::to_string(i + 1));
    }
    ev.g = gain_value(a.plant, x, t);
  }
  return out;
}

std::vector<double> derivative(const ScenarioConfig& cfg, const StateLayout& lay, double t,
                               std::span<const double> s) {
  const std::vector<AgentEval> evs = evaluate(cfg, lay, t, s);
  std::vector<double> ds(lay.total, 0.0);
  const int n = lay.n;
  for (int i = 0; i < cfg.n_agents(); ++i) {
    const AgentConfig& a = cfg.agents[static_cast<std::size_t>(i)];
    const AgentEval& ev = evs[static_cast<std::size_t>(i)];
    const std::span<const double> x = s.subspan(lay.x(i), static_cast<std::size_t>(n));
    const std::vector<double> dx = plant_derivative(a.plant, x, ev.control.u, t);
    FilterState f;
    f.y_hat.assign(s.begin() + static_cast<std::ptrdiff_t>(lay.yhat(i)),
                   s.begin() + static_cast<std::ptrdiff_t>(lay.theta(i)));
    const std::vector<double> dy = filter_derivative(f, ev.nu);
    const AdaptationRates r = adaptation_derivatives(ev.control, a.controller.gamma);
    std::copy(dx.begin(), dx.end(), ds.begin() + static_cast<std::ptrdiff_t>(lay.x(i)));
    std::copy(dy.begin(), dy.end(), ds.begin() + static_cast<std::ptrdiff_t>(lay.yhat(i)));
    std::copy(r.theta_hat_dot.begin(), r.theta_hat_dot.end(), ds.begin() + static_cast<std::ptrdiff_t>(lay.theta(i)));
    ds[lay.chi(i)] = r.chi_dot;
    ds[lay.work(i)] = (ev.g * a.controller.nussbaum(s[lay.chi(i)]) + 1.0) * r.chi_dot;
    double diss = 0.0;
    for (int k = 0; k < n; ++k) {
      const double e = ev.control.e[static_cast<std::size_t>(k)];
      diss += a.controller.c[static_cast<std::size_t>(k)] * e * e;
    }
    ds[lay.dissipation(i)] = diss;
  }
  return ds;
}

std::vector<double> initial_state(const ScenarioConfig& cfg, const StateLayout& lay) {
  std::vector<double> s(lay.total, 0.0);
  for (int i = 0; i < cfg.n_agents(); ++i) {
    const AgentConfig& a = cfg.agents[static_cast<std::size_t>(i)];
    std::copy(a.x0.begin(), a.x0.end(), s.begin() + static_cast<std::ptrdiff_t>(lay.x(i)));
    std::copy(a.y_hat0.begin(), a.y_hat0.end(), s.begin() + static_cast<std::ptrdiff_t>(lay.yhat(i)));
    std::copy(a.theta_hat0.begin(), a.theta_hat0.end(), s.begin() + static_cast<std::ptrdiff_t>(lay.theta(i)));
    s[lay.chi(i)] = a.chi0;
  }
  return s;
}

std::vector<double> record_row(const ScenarioConfig& cfg, const StateLayout& lay, const BoundSetup& bounds,
                               double t, std::span<const double> s) {
  const std::vector<AgentEval> evs = evaluate(cfg, lay, t, s);
  const int n = lay.n;
  std::vector<double> row = {t};
  const std::vector<double> y0 = cfg.reference.derivatives(t, n + 1);
  row.insert(row.end(), y0.begin(), y0.end());
  const double rho = pf_eval(cfg.filter.rho, t);
  const double beta1 = delta_bound(t, bounds.params(cfg, false));
  row.push_back(rho);
  row.push_back(beta1);
  for (int i = 0; i < cfg.n_agents(); ++i) {
    const AgentEval& ev = evs[static_cast<std::size_t>(i)];
    const auto xb = s.begin() + static_cast<std::ptrdiff_t>(lay.x(i));
    row.insert(row.end(), xb, xb + 2 * n);  // x then ŷ chain
    row.push_back(ev.z_derivs[0]);
    row.push_back(ev.zbar);
    row.push_back(ev.nu);
    row.push_back(ev.control.epsilon);
    row.push_back(ev.control.zeta);
    row.insert(row.end(), ev.control.e.begin(), ev.control.e.end());
    const auto tb = s.begin() + static_cast<std::ptrdiff_t>(lay.theta(i));
    row.insert(row.end(), tb, tb + lay.theta_dim[static_cast<std::size_t>(i)]);
    row.push_back(s[lay.chi(i)]);
    row.push_back(ev.control.u_bar);
    row.push_back(ev.control.u);
    row.push_back(ev.beta2[0]);
    row.push_back(beta1 + ev.beta2[0]);
    row.push_back(ev.g);
    row.push_back(s[lay.work(i)]);
    row.push_back(s[lay.dissipation(i)]);
  }
  return row;
}

void check_guards(const ScenarioConfig& cfg, const StateLayout& lay, std::span<const double> s, double t) {
  for (int i = 0; i < cfg.n_agents(); ++i) {
    const double chi = s[lay.chi(i)];
    if (!(std::abs(chi) <= cfg.guards.chi_abs_max)) {
      std::ostringstream os;
      os << "agent " << i + 1 << ": |chi| = " << std::abs(chi) << " exceeds guard " << cfg.guards.chi_abs_max
         << " at t = " << t << " (Nussbaum gain e^(chi^2) about to overflow)";
      throw GuardTripped(os.str());
    }
  }
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (lay.is_monitor(k)) continue;
    if (!(std::abs(s[k]) <= cfg.guards.state_abs_max)) {
      std::ostringstream os;
      os << lay.name(k) << " = " << s[k] << " exceeds state guard " << cfg.guards.state_abs_max << " at t = " << t;
      throw GuardTripped(os.str());
    }
  }
}

}  // namespace

BoundSetup bound_setup(const ScenarioConfig& cfg) {
  BoundSetup b;
  b.sigma = sigma_min(augmented(cfg.topology));
  b.kappa = kappa(cfg.n_agents());
  if (!cfg.omega0.empty()) {
    b.omega0 = cfg.omega0;
  } else {
    std::vector<FilterState> fs;
    for (const AgentConfig& a : cfg.agents) fs.push_back({a.y_hat0});
    std::vector<std::vector<double>> z;
    for (int i = 0; i < cfg.n_agents(); ++i) z.push_back(consensus_derivs(i, fs, cfg, 0.0));
    b.omega0 = omega_initial(z, cfg.filter.lambda);
  }
  return b;
}

void check_initial_feasibility(const ScenarioConfig& cfg) {
  std::vector<FilterState> fs;
  for (const AgentConfig& a : cfg.agents) fs.push_back({a.y_hat0});
  const double r0 = cfg.feasibility_radius;
  std::ostringstream problems;
  bool bad = false;
  for (int i = 0; i < cfg.n_agents(); ++i) {
    const AgentConfig& a = cfg.agents[static_cast<std::size_t>(i)];
    const double zbar = filtered_consensus(consensus_derivs(i, fs, cfg, 0.0), cfg.filter.lambda);
    const double zeta_f = zbar / pf_eval(cfg.filter.rho, 0.0);
    const double eps = a.x0[0] - a.y_hat0[0];
    const double zeta_t = eps / pf_eval(a.controller.beta2, 0.0);
    if (!(std::abs(zeta_f) < r0)) {
      problems << " agent " << i + 1 << ": filtered consensus error " << zbar << " gives |zeta| = "
               << std::abs(zeta_f) << " >= " << r0 << ";";
      bad = true;
    }
    if (!(std::abs(zeta_t) < r0)) {
      problems << " agent " << i + 1 << ": tracking error " << eps << " gives |zeta| = " << std::abs(zeta_t)
               << " >= " << r0 << ";";
      bad = true;
    }
  }
  if (bad) throw InfeasibleInitialCondition("initial condition outside the funnels:" + problems.str());
}

Trace run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  check_initial_feasibility(cfg);
  const StateLayout lay(cfg);
  const BoundSetup bounds = bound_setup(cfg);

  Trace tr;
  tr.config_hash = config_hash(cfg);
  tr.n_agents = cfg.n_agents();
  tr.order = cfg.order();
  tr.columns = trace_columns(cfg);

  const long long steps = cfg.integration.steps();
  const double h = cfg.integration.h;
  const int every = cfg.integration.record_every;
  tr.rows.reserve(static_cast<std::size_t>(steps / every + 1));

  auto f = [&](double t, std::span<const double> s) { return derivative(cfg, lay, t, s); };
  const ComponentNamer namer = [&lay](std::size_t k) { return lay.name(k); };

  std::vector<double> s = initial_state(cfg, lay);
  try {
    tr.rows.push_back(record_row(cfg, lay, bounds, 0.0, s));
    for (long long k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * h;
      s = rk4_step(f, s, t, h, namer);
      const double t_next = static_cast<double>(k + 1) * h;
      check_guards(cfg, lay, s, t_next);
      if ((k + 1) % every == 0) tr.rows.push_back(record_row(cfg, lay, bounds, t_next, s));
    }
  } catch (const Overflow& e) {
    throw GuardTripped(std::string("Nussbaum overflow: ") + e.what());
  }
  tr.final_state = s;
  return tr;
}

// ---------------------------------------------------------------- CSV

void write_trace(std::ostream& out, const Trace& tr) {
  out << "# schema: " << tr.schema << "\n";
  out << "# config_hash: " << tr.config_hash << "\n";
  out << "# agents: " << tr.n_agents << "\n";
  out << "# order: " << tr.order << "\n";
  for (std::size_t j = 0; j < tr.columns.size(); ++j) out << (j ? "," : "") << tr.columns[j];
  out << "\n";
  out << std::setprecision(17);
  for (const auto& r : tr.rows) {
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
    out << "\n";
  }
}

void write_trace_file(const std::string& path, const Trace& tr) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_trace(f, tr);
  if (!f) throw Error("failed writing trace '" + path + "'");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Trace read_trace(std::istream& in) {
  Trace tr;
  tr.schema.clear();
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(1, colon - 1);
      std::string value = line.substr(colon + 1);
      key.erase(0, key.find_first_not_of(' '));
      value.erase(0, value.find_first_not_of(' '));
      try {
        if (key == "schema") tr.schema = value;
        if (key == "config_hash") tr.config_hash = value;
        if (key == "agents") tr.n_agents = std::stoi(value);
        if (key == "order") tr.order = std::stoi(value);
      } catch (const std::exception&) {
        throw ParseError("bad metadata value '" + value + "'", lineno, key);
      }
      continue;
    }
    if (!header) {
      tr.columns = split_csv(line);
      header = true;
      if (tr.schema != kTraceSchema)
        throw SchemaMismatch("unsupported trace schema '" + tr.schema + "' (expected " + kTraceSchema + ")");
      continue;
    }
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != tr.columns.size()) {
      std::ostringstream os;
      os << "row has " << cells.size() << " cells, header has " << tr.columns.size();
      throw ParseError(os.str(), lineno);
    }
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      try {
        std::size_t used = 0;
        row[j] = std::stod(cells[j], &used);
        if (used != cells[j].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("not a number: '" + cells[j] + "'", lineno, tr.columns[j]);
      }
    }
    tr.rows.push_back(std::move(row));
  }
  if (!header) throw ParseError("trace has no header row", lineno);
  return tr;
}

Trace read_trace_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open trace '" + path + "'");
  return read_trace(f);
}

// ---------------------------------------------------------------- verification

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult& VerificationReport::get(const std::string& name) const {
  for (const CheckResult& c : checks)
    if (c.name == name) return c;
  throw Error("no verification check named '" + name + "'");
}

std::vector<std::string> verification_checks() {
  return {"filter_funnel", "tracking_funnel", "output_funnel", "prop1_sigma", "prop1_kappa",
          "compact_form",  "lemma4",          "lyapunov",      "nu_bound"};
}

std::vector<double> lyapunov_series(const Trace& tr, const ScenarioConfig& cfg, int agent) {
  const AgentConfig& a = cfg.agents[static_cast<std::size_t>(agent - 1)];
  const int n = cfg.order();
  const int d = a.plant.theta_dim();
  const DenseMatrix gamma_inv = a.controller.gamma.inverse();
  std::vector<std::size_t> e_cols;
  for (int k = 1; k <= n; ++k) e_cols.push_back(tr.index_of(agent_column(agent, "e" + std::to_string(k))));
  std::vector<std::size_t> th_cols;
  for (int p = 1; p <= d; ++p) th_cols.push_back(tr.index_of(agent_column(agent, "theta_hat" + std::to_string(p))));

  std::vector<double> v;
  v.reserve(tr.samples());
  Eigen::VectorXd err(d);
  for (const auto& r : tr.rows) {
    double acc = 0.0;
    for (std::size_t k = 0; k < e_cols.size(); ++k) acc += 0.5 * r[e_cols[k]] * r[e_cols[k]];
    for (int p = 0; p < d; ++p) err(p) = a.plant.theta[static_cast<std::size_t>(p)] - r[th_cols[static_cast<std::size_t>(p)]];
    acc += 0.5 * err.dot(gamma_inv * err);
    v.push_back(acc);
  }
  return v;
}

namespace {

// Running minimum of a relative margin.
struct Worst {
  double margin = std::numeric_limits<double>::infinity();
  double time = 0.0;
  std::string where;

  void offer(double m, double t, const std::string& label) {
    if (m < margin || std::isnan(m)) {
      margin = std::isnan(m) ? -std::numeric_limits<double>::infinity() : m;
      time = t;
      where = label;
    }
  }
};

CheckResult finish(const std::string& name, const Worst& w, bool strict = true, std::string extra = {}) {
  CheckResult c;
  c.name = name;
  c.worst_margin = w.margin;
  c.worst_time = w.time;
  c.passed = strict ? w.margin > 0.0 : w.margin >= 0.0;
  std::ostringstream os;
  os << "worst at " << (w.where.empty() ? "-" : w.where);
  if (!extra.empty()) os << "; " << extra;
  c.detail = os.str();
  return c;
}

}  // namespace

VerificationReport verify_trace(const Trace& tr, const ScenarioConfig& cfg) {
  const std::vector<std::string> expected = trace_columns(cfg);
  if (tr.columns != expected) {
    std::ostringstream os;
    os << "trace columns do not match the config (" << tr.columns.size() << " vs " << expected.size() << " columns)";
    for (std::size_t j = 0; j < std::min(tr.columns.size(), expected.size()); ++j) {
      if (tr.columns[j] != expected[j]) {
        os << "; first difference at column " << j << ": '" << tr.columns[j] << "' vs '" << expected[j] << "'";
        break;
      }
    }
    throw SchemaMismatch(os.str());
  }
  if (tr.n_agents != cfg.n_agents() || tr.order != cfg.order())
    throw SchemaMismatch("trace metadata (agents/order) does not match the config");
  if (tr.samples() < 3) throw SchemaMismatch("trace needs at least three samples");

  const int na = cfg.n_agents();
  const std::vector<double> t = tr.column("t");
  const std::vector<double> y0 = tr.column("y0_d0");
  const BoundSetup bounds = bound_setup(cfg);
  const DeltaBoundParams bp_sigma = bounds.params(cfg, false);
  const DeltaBoundParams bp_kappa = bounds.params(cfg, true);
  const DenseMatrix w = augmented(cfg.topology);

  std::vector<std::vector<double>> zbar, eps, x1, yhat, z, nu;
  for (int i = 1; i <= na; ++i) {
    zbar.push_back(tr.column(agent_column(i, "zbar")));
    eps.push_back(tr.column(agent_column(i, "eps")));
    x1.push_back(tr.column(agent_column(i, "x1")));
    yhat.push_back(tr.column(agent_column(i, "yhat_d0")));
    z.push_back(tr.column(agent_column(i, "z")));
    nu.push_back(tr.column(agent_column(i, "nu")));
  }

  VerificationReport rep;
  Worst filter_w, track_w, out_w, sig_w, kap_w, compact_w, nu_w;
  const double compact_tol = 1e-10;
  const double nu_shape = filter_input_shape_max();
  for (std::size_t s = 0; s < tr.samples(); ++s) {
    const double ts = t[s];
    const double rho = pf_eval(cfg.filter.rho, ts);
    const double b1 = delta_bound(ts, bp_sigma);
    const double b1k = delta_bound(ts, bp_kappa);
    Eigen::VectorXd delta(na), zv(na);
    for (int i = 0; i < na; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const std::string label = "agent " + std::to_string(i + 1) + ", t = " + std::to_string(ts);
      const double b2 = pf_eval(cfg.agents[ui].controller.beta2, ts);
      filter_w.offer((rho - std::abs(zbar[ui][s])) / rho, ts, label);
      track_w.offer((b2 - std::abs(eps[ui][s])) / b2, ts, label);
      out_w.offer((b1 + b2 - std::abs(x1[ui][s] - y0[s])) / (b1 + b2), ts, label);
      const double nu_max = cfg.filter.c[ui] / cfg.filter.rho.beta_inf * nu_shape;
      nu_w.offer((nu_max - std::abs(nu[ui][s])) / nu_max, ts, label);
      delta(i) = yhat[ui][s] - y0[s];
      zv(i) = z[ui][s];
    }
    const double dn = delta.norm();
    const std::string label = "t = " + std::to_string(ts);
    sig_w.offer((b1 - dn) / b1, ts, label);
    kap_w.offer((b1k - dn) / b1k, ts, label);
    const double err = (zv - w * delta).cwiseAbs().maxCoeff() / (1.0 + zv.cwiseAbs().maxCoeff());
    compact_w.offer((compact_tol - err) / compact_tol, ts, label);
  }
  rep.checks.push_back(finish("filter_funnel", filter_w));
  rep.checks.push_back(finish("tracking_funnel", track_w));
  rep.checks.push_back(finish("output_funnel", out_w));
  rep.checks.push_back(finish("prop1_sigma", sig_w, false));
  rep.checks.push_back(finish("prop1_kappa", kap_w, false));
  rep.checks.push_back(finish("compact_form", compact_w, false));

  // Integrated Nussbaum inequality and the Lyapunov balance, per agent. The
  // work ∫(gN(χ)+1)χ̇ and dissipation ∫Σc_k e_k² are integrated with the
  // dynamics, so neither depends on how finely the trace was sampled.
  Worst l4_w, lyap_w;
  for (int i = 1; i <= na; ++i) {
    const std::vector<double> v = lyapunov_series(tr, cfg, i);
    const std::vector<double> chi = tr.column(agent_column(i, "chi"));
    const std::vector<double> work = tr.column(agent_column(i, "work"));
    const std::vector<double> diss = tr.column(agent_column(i, "dissipation"));
    const std::string label = "agent " + std::to_string(i);

    const Lemma4Result l4 = lemma4_work_check(t, v, chi, work, 1e-3);
    l4_w.offer(l4.worst_margin, l4.worst_time, label);

    double scale = 1.0;
    for (std::size_t s = 0; s < v.size(); ++s)
      scale = std::max({scale, 1.0 + std::abs(v[s] - v[0]), 1.0 + std::abs(work[s] - work[0]), 1.0 + diss[s] - diss[0]});
    for (std::size_t s = 0; s < v.size(); ++s) {
      const double residual = (v[s] - v[0]) - ((work[s] - work[0]) - (diss[s] - diss[0]));
      lyap_w.offer((1e-3 * scale - std::abs(residual)) / scale, t[s], label + ", t = " + std::to_string(t[s]));
    }
  }
  rep.checks.push_back(finish("lemma4", l4_w, false));
  rep.checks.push_back(finish("lyapunov", lyap_w, false));
  rep.checks.push_back(finish("nu_bound", nu_w, false));
  return rep;
}

}  // namespace ppc
