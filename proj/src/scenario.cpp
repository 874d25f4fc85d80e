#include "ppc/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ppc/errors.hpp"

namespace ppc {

long long IntegrationSettings::steps() const { return std::llround(t_end / h); }

int ScenarioConfig::order() const { return agents.empty() ? 0 : agents.front().plant.order; }

void ScenarioConfig::validate() const {
  const int n_ag = n_agents();
  if (n_ag < 1) throw InvalidParams("scenario needs at least one agent");
  if (topology.size() != n_ag) {
    std::ostringstream os;
    os << "topology has " << topology.size() << " followers but " << n_ag << " agents are configured";
    throw InvalidParams(os.str());
  }
  if (!has_leader_spanning_tree(topology))
    throw InvalidParams("topology has no spanning tree rooted at the leader");
  filter.validate(n_ag);
  const int n = order();
  if (n < 2 || n > kMaxOrder) {
    std::ostringstream os;
    os << "plant order must be in 2.." << kMaxOrder << ", got " << n;
    throw InvalidParams(os.str());
  }
  for (int i = 0; i < n_ag; ++i) {
    const AgentConfig& a = agents[static_cast<std::size_t>(i)];
    const std::string who = "agent " + std::to_string(i + 1) + ": ";
    try {
      if (a.plant.order != n) throw InvalidParams("all agents must share one plant order");
      a.plant.validate();
      a.controller.validate(n, a.plant.theta_dim());
      if (static_cast<int>(a.x0.size()) != n) throw InvalidParams("initial x needs one entry per state");
      if (static_cast<int>(a.y_hat0.size()) != n) throw InvalidParams("initial filter chain needs n entries");
      if (static_cast<int>(a.theta_hat0.size()) != a.plant.theta_dim())
        throw InvalidParams("initial theta_hat size differs from theta_dim");
      for (double v : a.x0)
        if (!std::isfinite(v)) throw InvalidParams("initial x must be finite");
      for (double v : a.y_hat0)
        if (!std::isfinite(v)) throw InvalidParams("initial filter chain must be finite");
    } catch (const InvalidParams& e) {
      throw InvalidParams(who + e.what());
    }
  }
  if (!(integration.h > 0.0) || !(integration.t_end > 0.0))
    throw InvalidParams("integration needs step > 0 and t_end > 0");
  if (integration.record_every < 1) throw InvalidParams("record_every must be at least 1");
  const long long steps = integration.steps();
  if (steps < 1 || std::abs(static_cast<double>(steps) * integration.h - integration.t_end) > 1e-9 * integration.t_end)
    throw InvalidParams("t_end must be an integer multiple of the step");
  if (!(guards.chi_abs_max > 0.0) || !(guards.state_abs_max > 0.0)) throw InvalidParams("guards must be positive");
  if (!(feasibility_radius > 0.0 && feasibility_radius <= 1.0))
    throw InvalidParams("feasibility_radius must lie in (0, 1]");
  if (!omega0.empty() && static_cast<int>(omega0.size()) != n - 1)
    throw InvalidParams("omega0 needs one entry per k = 1..n-1");
}

namespace {

bool same_plant(const PlantModel& a, const PlantModel& b) {
  if (a.order != b.order || a.theta != b.theta || a.gain_lo != b.gain_lo || a.gain_hi != b.gain_hi) return false;
  if (a.gain.to_string() != b.gain.to_string() || a.phi.size() != b.phi.size()) return false;
  for (std::size_t k = 0; k < a.phi.size(); ++k) {
    if (a.phi[k].size() != b.phi[k].size()) return false;
    for (std::size_t p = 0; p < a.phi[k].size(); ++p)
      if (a.phi[k][p].to_string() != b.phi[k][p].to_string()) return false;
  }
  return true;
}

bool same_controller(const ControllerParams& a, const ControllerParams& b) {
  return a.c == b.c && a.gamma == b.gamma && a.beta2 == b.beta2 && a.nussbaum.kind() == b.nussbaum.kind() &&
         a.nussbaum.name() == b.nussbaum.name() && a.nussbaum.chi_guard() == b.nussbaum.chi_guard();
}

}  // namespace

bool operator==(const AgentConfig& a, const AgentConfig& b) {
  return same_plant(a.plant, b.plant) && same_controller(a.controller, b.controller) && a.x0 == b.x0 &&
         a.y_hat0 == b.y_hat0 && a.theta_hat0 == b.theta_hat0 && a.chi0 == b.chi0;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return a.name == b.name && a.topology == b.topology && a.reference == b.reference && a.filter == b.filter &&
         a.agents == b.agents && a.integration.t_end == b.integration.t_end && a.integration.h == b.integration.h &&
         a.integration.record_every == b.integration.record_every &&
         a.guards.chi_abs_max == b.guards.chi_abs_max && a.guards.state_abs_max == b.guards.state_abs_max &&
         a.feasibility_radius == b.feasibility_radius && a.omega0 == b.omega0;
}

std::vector<std::string> preset_names() { return {"paper-case1", "paper-case2"}; }

ScenarioConfig preset(std::string_view name) {
  ScenarioCase which;
  if (name == "paper-case1") {
    which = ScenarioCase::Case1;
  } else if (name == "paper-case2") {
    which = ScenarioCase::Case2;
  } else {
    throw InvalidParams("unknown preset '" + std::string(name) + "' (expected paper-case1 or paper-case2)");
  }

  ScenarioConfig cfg;
  cfg.name = std::string(name);
  const std::vector<Edge> chain = {{1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}};
  const std::vector<int> pinned = {1};
  cfg.topology = DirectedTopology::from_edges(4, chain, pinned);
  cfg.reference = ReferenceSignal::sine(1.0, 1.0, 0.0);
  cfg.filter.lambda = 2.0;
  cfg.filter.c = {4.0, 4.0, 4.0, 4.0};
  cfg.filter.rho = {2.0, 0.03, 1.0};

  const std::vector<PlantModel> plants = scenario_models(which);
  const double ck[4] = {1.0, 2.0, 1.5, 1.2};
  const double gamma[4] = {0.5, 0.1, 2.0, 0.5};
  const double yh0[4] = {1.0, 0.6, 0.4, 0.2};
  const double yh1[4] = {0.6, 0.4, 0.5, 0.3};
  const double x1[4] = {2.0, 1.0, 0.0, -0.8};
  const double x2[4] = {0.6, 0.5, -0.5, -0.6};
  for (int i = 0; i < 4; ++i) {
    AgentConfig a;
    a.plant = plants[static_cast<std::size_t>(i)];
    a.controller.c = {ck[i], ck[i]};
    a.controller.gamma = DenseMatrix::Constant(1, 1, gamma[i]);
    a.controller.beta2 = {2.4, 0.03, 1.0};
    a.controller.nussbaum = NussbaumFn::exp_sin_half_pi();
    a.x0 = {x1[i], x2[i]};
    a.y_hat0 = {yh0[i], yh1[i]};
    a.theta_hat0 = {0.0};
    a.chi0 = 0.0;
    cfg.agents.push_back(std::move(a));
  }
  return cfg;
}

// ---------------------------------------------------------------- writing

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void emit_seq(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << num(x);
  out << YAML::EndSeq;
}

void emit_pf(YAML::Emitter& out, const char* key, const PerformanceFunction& pf) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "beta0" << YAML::Value << num(pf.beta0);
  out << YAML::Key << "beta_inf" << YAML::Value << num(pf.beta_inf);
  out << YAML::Key << "iota" << YAML::Value << num(pf.iota);
  out << YAML::EndMap;
}

}  // namespace

std::string write_config(const ScenarioConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << cfg.name;

  out << YAML::Key << "reference" << YAML::Value << YAML::BeginMap;
  switch (cfg.reference.kind()) {
    case ReferenceSignal::Kind::Sine:
      out << YAML::Key << "kind" << YAML::Value << "sine";
      out << YAML::Key << "amplitude" << YAML::Value << num(cfg.reference.amplitude());
      out << YAML::Key << "omega" << YAML::Value << num(cfg.reference.omega());
      out << YAML::Key << "phase" << YAML::Value << num(cfg.reference.phase());
      break;
    case ReferenceSignal::Kind::Constant:
      out << YAML::Key << "kind" << YAML::Value << "constant";
      out << YAML::Key << "value" << YAML::Value << num(cfg.reference.value());
      break;
    case ReferenceSignal::Kind::Tabulated:
      out << YAML::Key << "kind" << YAML::Value << "tabulated";
      out << YAML::Key << "rows" << YAML::Value << YAML::BeginSeq;
      for (const auto& row : cfg.reference.rows()) emit_seq(out, row);
      out << YAML::EndSeq;
      break;
  }
  out << YAML::EndMap;

  out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "agents" << YAML::Value << cfg.topology.size();
  out << YAML::Key << "edges" << YAML::Value << YAML::BeginSeq;
  for (const Edge& e : cfg.topology.edges())
    out << YAML::Flow << YAML::BeginSeq << e.from << e.to << num(e.weight) << YAML::EndSeq;
  out << YAML::EndSeq;
  out << YAML::Key << "pinned" << YAML::Value << YAML::Flow << cfg.topology.pinned_agents();
  out << YAML::EndMap;

  out << YAML::Key << "filter" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "lambda" << YAML::Value << num(cfg.filter.lambda);
  out << YAML::Key << "gains" << YAML::Value;
  emit_seq(out, cfg.filter.c);
  emit_pf(out, "rho", cfg.filter.rho);
  out << YAML::EndMap;

  out << YAML::Key << "agents" << YAML::Value << YAML::BeginSeq;
  for (const AgentConfig& a : cfg.agents) {
    out << YAML::BeginMap;
    out << YAML::Key << "plant" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "theta" << YAML::Value;
    emit_seq(out, a.plant.theta);
    out << YAML::Key << "phi" << YAML::Value << YAML::BeginSeq;
    for (const auto& row : a.plant.phi) {
      out << YAML::Flow << YAML::BeginSeq;
      for (const Expr& e : row) out << YAML::DoubleQuoted << e.to_string();
      out << YAML::EndSeq;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "gain" << YAML::Value << YAML::DoubleQuoted << a.plant.gain.to_string();
    out << YAML::Key << "gain_bounds" << YAML::Value;
    emit_seq(out, {a.plant.gain_lo, a.plant.gain_hi});
    out << YAML::EndMap;

    out << YAML::Key << "controller" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "c" << YAML::Value;
    emit_seq(out, a.controller.c);
    out << YAML::Key << "gamma" << YAML::Value << YAML::BeginSeq;
    for (Eigen::Index r = 0; r < a.controller.gamma.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(a.controller.gamma.cols()));
      for (Eigen::Index s = 0; s < a.controller.gamma.cols(); ++s) row[static_cast<std::size_t>(s)] = a.controller.gamma(r, s);
      emit_seq(out, row);
    }
    out << YAML::EndSeq;
    emit_pf(out, "beta2", a.controller.beta2);
    out << YAML::Key << "nussbaum" << YAML::Value << a.controller.nussbaum.name();
    out << YAML::EndMap;

    out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "x" << YAML::Value;
    emit_seq(out, a.x0);
    out << YAML::Key << "y_hat" << YAML::Value;
    emit_seq(out, a.y_hat0);
    out << YAML::Key << "theta_hat" << YAML::Value;
    emit_seq(out, a.theta_hat0);
    out << YAML::Key << "chi" << YAML::Value << num(a.chi0);
    out << YAML::EndMap;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "integration" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "t_end" << YAML::Value << num(cfg.integration.t_end);
  out << YAML::Key << "step" << YAML::Value << num(cfg.integration.h);
  out << YAML::Key << "record_every" << YAML::Value << cfg.integration.record_every;
  out << YAML::EndMap;

  out << YAML::Key << "guards" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "chi_abs_max" << YAML::Value << num(cfg.guards.chi_abs_max);
  out << YAML::Key << "state_abs_max" << YAML::Value << num(cfg.guards.state_abs_max);
  out << YAML::EndMap;

  out << YAML::Key << "feasibility_radius" << YAML::Value << num(cfg.feasibility_radius);
  if (!cfg.omega0.empty()) {
    out << YAML::Key << "omega0" << YAML::Value;
    emit_seq(out, cfg.omega0);
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void write_config_file(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << write_config(cfg);
  if (!f) throw Error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------- reading

namespace {

std::size_t line_of(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  return m.line >= 0 ? static_cast<std::size_t>(m.line) + 1 : 0;
}

// A YAML node together with its dotted key path, for error messages.
class Cursor {
 public:
  Cursor(YAML::Node node, std::string path, std::size_t fallback_line)
      : node_(std::move(node)), path_(std::move(path)), fallback_(fallback_line) {}

  std::size_t line() const {
    const std::size_t l = line_of(node_);
    return l ? l : fallback_;
  }
  const std::string& path() const { return path_; }
  const YAML::Node& node() const { return node_; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line(), path_); }

  void require_map(std::initializer_list<const char*> allowed) const {
    if (!node_.IsMap()) fail("expected a mapping");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!ok.count(key)) {
        throw ParseError("unknown key", line_of(kv.first), path_.empty() ? key : path_ + "." + key);
      }
    }
  }

  bool has(const char* key) const { return node_.IsMap() && node_[key].IsDefined() && !node_[key].IsNull(); }

  Cursor operator[](const char* key) const {
    const std::string p = path_.empty() ? key : path_ + "." + key;
    if (!has(key)) throw ParseError("missing required key", line(), p);
    return Cursor(node_[key], p, line());
  }

  Cursor at(std::size_t i) const { return Cursor(node_[i], path_ + "[" + std::to_string(i) + "]", line()); }

  std::size_t size() const {
    if (!node_.IsSequence()) fail("expected a sequence");
    return node_.size();
  }

  double as_double() const {
    if (!node_.IsScalar()) fail("expected a number");
    const std::string s = node_.Scalar();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail("expected a number, got '" + s + "'");
    return v;
  }

  int as_int() const {
    const double v = as_double();
    if (v != std::floor(v) || std::abs(v) > 1e9) fail("expected an integer");
    return static_cast<int>(v);
  }

  std::string as_string() const {
    if (!node_.IsScalar()) fail("expected a string");
    return node_.Scalar();
  }

  std::vector<double> as_doubles() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).as_double());
    return out;
  }

  std::vector<int> as_ints() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).as_int());
    return out;
  }

  Expr as_expr() const {
    try {
      return Expr::parse(as_string());
    } catch (const ParseError& e) {
      fail(std::string("bad expression: ") + e.what());
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::size_t fallback_;
};

PerformanceFunction read_pf(const Cursor& c) {
  c.require_map({"beta0", "beta_inf", "iota"});
  PerformanceFunction pf{c["beta0"].as_double(), c["beta_inf"].as_double(), c["iota"].as_double()};
  try {
    pf.validate();
  } catch (const InvalidParams& e) {
    c.fail(e.what());
  }
  return pf;
}

ReferenceSignal read_reference(const Cursor& c) {
  c.require_map({"kind", "amplitude", "omega", "phase", "value", "rows"});
  const std::string kind = c["kind"].as_string();
  if (kind == "sine") {
    return ReferenceSignal::sine(c.has("amplitude") ? c["amplitude"].as_double() : 1.0,
                                 c.has("omega") ? c["omega"].as_double() : 1.0,
                                 c.has("phase") ? c["phase"].as_double() : 0.0);
  }
  if (kind == "constant") return ReferenceSignal::constant(c["value"].as_double());
  if (kind == "tabulated") {
    const Cursor rows = c["rows"];
    std::vector<std::vector<double>> table;
    for (std::size_t i = 0; i < rows.size(); ++i) table.push_back(rows.at(i).as_doubles());
    try {
      return ReferenceSignal::tabulated(std::move(table));
    } catch (const InvalidParams& e) {
      rows.fail(e.what());
    }
  }
  c["kind"].fail("unknown reference kind '" + kind + "' (expected sine, constant or tabulated)");
}

DirectedTopology read_topology(const Cursor& c) {
  c.require_map({"agents", "edges", "pinned"});
  const int n = c["agents"].as_int();
  std::vector<Edge> edges;
  if (c.has("edges")) {
    const Cursor ec = c["edges"];
    for (std::size_t i = 0; i < ec.size(); ++i) {
      const Cursor e = ec.at(i);
      if (e.size() != 2 && e.size() != 3) e.fail("edge must be [from, to] or [from, to, weight]");
      edges.push_back({e.at(0).as_int(), e.at(1).as_int(), e.size() == 3 ? e.at(2).as_double() : 1.0});
    }
  }
  const std::vector<int> pinned = c.has("pinned") ? c["pinned"].as_ints() : std::vector<int>{};
  try {
    return DirectedTopology::from_edges(n, edges, pinned);
  } catch (const InvalidParams& e) {
    c.fail(e.what());
  }
}

FilterParams read_filter(const Cursor& c) {
  c.require_map({"lambda", "gains", "rho"});
  FilterParams f;
  f.lambda = c["lambda"].as_double();
  f.c = c["gains"].as_doubles();
  f.rho = read_pf(c["rho"]);
  return f;
}

PlantModel read_plant(const Cursor& c) {
  if (c.has("preset")) {
    c.require_map({"preset", "agent"});
    const std::string name = c["preset"].as_string();
    const int idx = c["agent"].as_int();
    ScenarioCase which;
    if (name == "paper-case1") {
      which = ScenarioCase::Case1;
    } else if (name == "paper-case2") {
      which = ScenarioCase::Case2;
    } else {
      c["preset"].fail("unknown plant preset '" + name + "'");
    }
    const auto models = scenario_models(which);
    if (idx < 1 || idx > static_cast<int>(models.size())) c["agent"].fail("preset agent index out of range");
    return models[static_cast<std::size_t>(idx - 1)];
  }
  c.require_map({"theta", "phi", "gain", "gain_bounds"});
  PlantModel m;
  m.theta = c["theta"].as_doubles();
  const Cursor phi = c["phi"];
  m.order = static_cast<int>(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const Cursor row = phi.at(k);
    std::vector<Expr> exprs;
    for (std::size_t p = 0; p < row.size(); ++p) exprs.push_back(row.at(p).as_expr());
    m.phi.push_back(std::move(exprs));
  }
  m.gain = c["gain"].as_expr();
  const std::vector<double> bounds = c["gain_bounds"].as_doubles();
  if (bounds.size() != 2) c["gain_bounds"].fail("gain_bounds must be [lo, hi]");
  m.gain_lo = bounds[0];
  m.gain_hi = bounds[1];
  try {
    m.validate();
  } catch (const InvalidParams& e) {
    c.fail(e.what());
  }
  return m;
}

ControllerParams read_controller(const Cursor& c) {
  c.require_map({"c", "gamma", "beta2", "nussbaum"});
  ControllerParams p;
  p.c = c["c"].as_doubles();
  const Cursor g = c["gamma"];
  const std::size_t d = g.size();
  p.gamma = DenseMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    const std::vector<double> row = g.at(r).as_doubles();
    if (row.size() != d) g.at(r).fail("gamma must be square");
    for (std::size_t s = 0; s < d; ++s) p.gamma(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = row[s];
  }
  p.beta2 = read_pf(c["beta2"]);
  if (c.has("nussbaum")) {
    const std::string kind = c["nussbaum"].as_string();
    if (kind != "exp-sin-half-pi") c["nussbaum"].fail("unknown Nussbaum function '" + kind + "'");
  }
  p.nussbaum = NussbaumFn::exp_sin_half_pi();
  return p;
}

AgentConfig read_agent(const Cursor& c) {
  c.require_map({"plant", "controller", "initial"});
  AgentConfig a;
  a.plant = read_plant(c["plant"]);
  a.controller = read_controller(c["controller"]);
  const Cursor init = c["initial"];
  init.require_map({"x", "y_hat", "theta_hat", "chi"});
  a.x0 = init["x"].as_doubles();
  a.y_hat0 = init["y_hat"].as_doubles();
  a.theta_hat0 = init.has("theta_hat") ? init["theta_hat"].as_doubles()
                                       : std::vector<double>(static_cast<std::size_t>(a.plant.theta_dim()), 0.0);
  a.chi0 = init.has("chi") ? init["chi"].as_double() : 0.0;
  return a;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 0);
  }
  const Cursor c(root, "", 1);
  c.require_map({"name", "preset", "reference", "topology", "filter", "agents", "integration", "guards",
                 "feasibility_radius", "omega0"});

  ScenarioConfig cfg;
  if (c.has("preset")) {
    try {
      cfg = preset(c["preset"].as_string());
    } catch (const InvalidParams& e) {
      c["preset"].fail(e.what());
    }
  }
  if (c.has("name")) cfg.name = c["name"].as_string();
  if (c.has("reference")) cfg.reference = read_reference(c["reference"]);
  if (c.has("topology")) cfg.topology = read_topology(c["topology"]);
  if (c.has("filter")) cfg.filter = read_filter(c["filter"]);
  if (c.has("agents")) {
    const Cursor ag = c["agents"];
    cfg.agents.clear();
    for (std::size_t i = 0; i < ag.size(); ++i) cfg.agents.push_back(read_agent(ag.at(i)));
  }
  if (c.has("integration")) {
    const Cursor in = c["integration"];
    in.require_map({"t_end", "step", "record_every"});
    if (in.has("t_end")) cfg.integration.t_end = in["t_end"].as_double();
    if (in.has("step")) cfg.integration.h = in["step"].as_double();
    if (in.has("record_every")) cfg.integration.record_every = in["record_every"].as_int();
  }
  if (c.has("guards")) {
    const Cursor g = c["guards"];
    g.require_map({"chi_abs_max", "state_abs_max"});
    if (g.has("chi_abs_max")) cfg.guards.chi_abs_max = g["chi_abs_max"].as_double();
    if (g.has("state_abs_max")) cfg.guards.state_abs_max = g["state_abs_max"].as_double();
  }
  if (c.has("feasibility_radius")) cfg.feasibility_radius = c["feasibility_radius"].as_double();
  if (c.has("omega0")) cfg.omega0 = c["omega0"].as_doubles();

  try {
    cfg.validate();
  } catch (const InvalidParams& e) {
    throw ParseError(std::string("invalid scenario: ") + e.what());
  }
  return cfg;
}

ScenarioConfig read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string config_hash(const ScenarioConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : write_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ppc
