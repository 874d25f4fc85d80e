#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ppc/errors.hpp"
#include "ppc/nussbaum.hpp"
#include "ppc/rk4.hpp"
#include "ppc/sim.hpp"

namespace ppc {
namespace {

ScenarioConfig short_case(const char* name, double t_end, int record_every) {
  ScenarioConfig cfg = preset(name);
  cfg.integration.t_end = t_end;
  cfg.integration.record_every = record_every;
  return cfg;
}

// Two third-order agents in a chain, starting close to the leader.
ScenarioConfig third_order_pair() {
  ScenarioConfig cfg = preset("paper-case1");
  cfg.name = "third-order";
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a(1, 0) = 1.0;
  cfg.topology = DirectedTopology(a, {1, 0});
  cfg.filter.c = {4.0, 4.0};
  cfg.filter.lambda = 3.0;
  cfg.agents.resize(2);
  for (std::size_t i = 0; i < 2; ++i) {
    AgentConfig& ag = cfg.agents[i];
    ag.plant.order = 3;
    ag.plant.theta = {0.3};
    ag.plant.phi = {{Expr::parse("sin(x1)")}, {Expr::parse("0.1*x1*x2")}, {Expr::parse("cos(x2)")}};
    ag.plant.gain = Expr::parse(i == 0 ? "1 + 0.1*sin(x1)" : "-1 - 0.1*cos(x3)");
    ag.plant.gain_lo = i == 0 ? 0.9 : -1.1;
    ag.plant.gain_hi = i == 0 ? 1.1 : -0.9;
    ag.controller.c = {1.0, 1.0, 1.0};
    ag.controller.gamma = DenseMatrix::Constant(1, 1, 0.5);
    ag.x0 = {0.3 * static_cast<double>(i + 1), 1.0, 0.0};
    ag.y_hat0 = {0.1, 0.9, 0.0};
    ag.theta_hat0 = {0.0};
    // Start where g·N(χ) < 0 so the run exercises n = 3 without a sign-search
    // transient; from χ = 0 agent 1 needs a step far below 1e-4 near t = 3.8.
    ag.chi0 = i == 0 ? -1.0 : 1.0;
  }
  cfg.integration.t_end = 5.0;
  cfg.integration.record_every = 100;
  return cfg;
}

TEST(Rk4, ZeroFieldLeavesStateUnchanged) {
  const std::vector<double> s{1.0, -2.0};
  auto zero = [](double, std::span<const double> y) { return std::vector<double>(y.size(), 0.0); };
  EXPECT_EQ(rk4_step(zero, s, 0.0, 0.5), s);
}

TEST(Rk4, ExponentialGrowthStep) {
  auto grow = [](double, std::span<const double> y) { return std::vector<double>{y[0]}; };
  const std::vector<double> s{1.0};
  const double next = rk4_step(grow, s, 0.0, 0.1)[0];
  // One RK4 step on y' = y reproduces the Taylor series of e^h through h^4.
  EXPECT_NEAR(next, 1.0 + 0.1 + 0.01 / 2.0 + 0.001 / 6.0 + 0.0001 / 24.0, 1e-15);
  EXPECT_LT(std::abs(next - std::exp(0.1)), 1e-7);
}

TEST(Rk4, FourthOrderGlobalConvergence) {
  auto decay = [](double, std::span<const double> y) { return std::vector<double>{-y[0]}; };
  auto global_error = [&](int steps) {
    std::vector<double> s{1.0};
    const double h = 2.0 / steps;
    for (int k = 0; k < steps; ++k) s = rk4_step(decay, s, k * h, h);
    return std::abs(s[0] - std::exp(-2.0));
  };
  const double ratio = global_error(20) / global_error(40);
  EXPECT_NEAR(ratio, 16.0, 0.8);
}

TEST(Rk4, NamesTheNonFiniteComponent) {
  auto bad = [](double, std::span<const double> y) { return std::vector<double>{y[0], std::log(-1.0)}; };
  const std::vector<double> s{1.0, 1.0};
  try {
    rk4_step(bad, s, 0.0, 0.1, [](std::size_t i) { return i == 1 ? std::string("agent 2 chi") : std::string("x"); });
    FAIL() << "no throw";
  } catch (const NonFiniteState& e) {
    EXPECT_NE(std::string(e.what()).find("agent 2 chi"), std::string::npos);
  }
}

TEST(TraceSchema, ColumnsForTheBenchmark) {
  const std::vector<std::string> cols = trace_columns(preset("paper-case1"));
  const std::vector<std::string> global{"t", "y0_d0", "y0_d1", "y0_d2", "rho", "beta1"};
  ASSERT_GE(cols.size(), global.size());
  EXPECT_TRUE(std::equal(global.begin(), global.end(), cols.begin()));
  const std::vector<std::string> per_agent{"x1",  "x2",         "yhat_d0", "yhat_d1", "z",    "zbar",
                                           "nu",  "eps",        "zeta_eps", "e1",     "e2",   "theta_hat1",
                                           "chi", "u_bar",      "u",       "beta2",   "beta", "g",
                                           "work", "dissipation"};
  EXPECT_EQ(cols.size(), global.size() + 4 * per_agent.size());
  for (int i = 1; i <= 4; ++i) {
    for (std::size_t f = 0; f < per_agent.size(); ++f) {
      EXPECT_EQ(cols[global.size() + static_cast<std::size_t>(i - 1) * per_agent.size() + f],
                agent_column(i, per_agent[f]));
    }
  }
  EXPECT_EQ(agent_column(3, "u"), "a3_u");
}

class ShortRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    cfg_ = new ScenarioConfig(short_case("paper-case1", 3.0, 50));
    trace_ = new Trace(run_scenario(*cfg_));
  }
  static void TearDownTestSuite() {
    delete trace_;
    delete cfg_;
  }
  static ScenarioConfig* cfg_;
  static Trace* trace_;
};
ScenarioConfig* ShortRun::cfg_ = nullptr;
Trace* ShortRun::trace_ = nullptr;

TEST_F(ShortRun, RecordsOnTheStride) {
  EXPECT_EQ(trace_->samples(), 3.0 / (50 * 1e-4) + 1);
  const std::vector<double> t = trace_->column("t");
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_NEAR(t.back(), 3.0, 1e-12);
  for (std::size_t k = 1; k < t.size(); ++k) EXPECT_GT(t[k], t[k - 1]);
  EXPECT_EQ(trace_->config_hash, config_hash(*cfg_));
  EXPECT_EQ(trace_->schema, kTraceSchema);
  EXPECT_THROW(trace_->index_of("missing"), SchemaMismatch);
}

TEST_F(ShortRun, InitialRowMatchesTheConfig) {
  const AgentConfig& a1 = cfg_->agents[0];
  EXPECT_EQ(trace_->column("a1_x1")[0], a1.x0[0]);
  EXPECT_EQ(trace_->column("a1_yhat_d1")[0], a1.y_hat0[1]);
  EXPECT_EQ(trace_->column("rho")[0], 2.0);
  EXPECT_EQ(trace_->column("a1_beta2")[0], 2.4);
  EXPECT_EQ(trace_->column("a1_work")[0], 0.0);
  // Agent 1 is pinned: z = ŷ − y₀ = 1 − sin 0.
  EXPECT_EQ(trace_->column("a1_z")[0], 1.0);
  // z̄ = ż + λz = (0.6 − cos 0) + 2·1.
  EXPECT_NEAR(trace_->column("a1_zbar")[0], -0.4 + 2.0, 1e-15);
}

TEST_F(ShortRun, AllChecksPass) {
  const VerificationReport rep = verify_trace(*trace_, *cfg_);
  ASSERT_EQ(rep.checks.size(), verification_checks().size());
  for (std::size_t k = 0; k < rep.checks.size(); ++k) {
    EXPECT_EQ(rep.checks[k].name, verification_checks()[k]);
    EXPECT_TRUE(rep.checks[k].passed) << rep.checks[k].name << " margin " << rep.checks[k].worst_margin << " "
                                      << rep.checks[k].detail;
    EXPECT_GE(rep.checks[k].worst_margin, 0.0) << rep.checks[k].name;
  }
  EXPECT_TRUE(rep.all_passed());
  EXPECT_THROW(rep.get("no-such-check"), Error);
}

TEST_F(ShortRun, CsvRoundTripIsExact) {
  std::stringstream buf;
  write_trace(buf, *trace_);
  const Trace back = read_trace(buf);
  EXPECT_EQ(back.columns, trace_->columns);
  EXPECT_EQ(back.rows, trace_->rows);
  EXPECT_EQ(back.config_hash, trace_->config_hash);
  EXPECT_EQ(back.n_agents, 4);
  EXPECT_EQ(back.order, 2);
  std::stringstream again;
  write_trace(again, back);
  std::stringstream first;
  write_trace(first, *trace_);
  EXPECT_EQ(again.str(), first.str());
}

TEST_F(ShortRun, CsvHeaderCarriesTheSchema) {
  std::stringstream buf;
  write_trace(buf, *trace_);
  std::string line;
  std::getline(buf, line);
  EXPECT_EQ(line, std::string("# schema: ") + kTraceSchema);
}

TEST_F(ShortRun, ForgedFilterSampleIsCaught) {
  Trace forged = *trace_;
  const std::size_t row = 17;
  const double t = forged.rows[row][forged.index_of("t")];
  forged.rows[row][forged.index_of("a3_zbar")] = 1.01 * forged.rows[row][forged.index_of("rho")];
  const VerificationReport rep = verify_trace(forged, *cfg_);
  const CheckResult& c = rep.get("filter_funnel");
  EXPECT_FALSE(c.passed);
  EXPECT_DOUBLE_EQ(c.worst_time, t);
  EXPECT_LT(c.worst_margin, 0.0);
  EXPECT_FALSE(rep.all_passed());
}

TEST_F(ShortRun, ForgedTrackingSampleIsCaught) {
  Trace forged = *trace_;
  const std::size_t row = 40;
  forged.rows[row][forged.index_of("a2_eps")] = -forged.rows[row][forged.index_of("a2_beta2")];
  EXPECT_FALSE(verify_trace(forged, *cfg_).get("tracking_funnel").passed);
}

TEST_F(ShortRun, MismatchedConfigIsRejected) {
  EXPECT_THROW(verify_trace(*trace_, third_order_pair()), SchemaMismatch);
  Trace tiny = *trace_;
  tiny.rows.resize(2);
  EXPECT_THROW(verify_trace(tiny, *cfg_), SchemaMismatch);
}

TEST_F(ShortRun, FiniteDifferenceLyapunovChecksOnAFineTrace) {
  // Record every step over the first second so that central differences of V
  // and χ resolve the transient.
  ScenarioConfig fine = short_case("paper-case1", 1.0, 1);
  const Trace tr = run_scenario(fine);
  const std::vector<double> t = tr.column("t");
  const double dt = t[1] - t[0];
  const NussbaumFn f = NussbaumFn::exp_sin_half_pi();
  for (int i = 1; i <= 4; ++i) {
    const std::vector<double> v = lyapunov_series(tr, fine, i);
    const std::vector<double> chi = tr.column(agent_column(i, "chi"));
    const std::vector<double> g = tr.column(agent_column(i, "g"));
    EXPECT_TRUE(check_lemma4_trace(t, v, chi, g, 1.0, f, 1e-3)) << "agent " << i;

    const std::vector<double> v_dot = central_difference(v, dt);
    const std::vector<double> chi_dot = central_difference(chi, dt);
    for (std::size_t k = 1; k + 1 < t.size(); ++k) {
      const double rhs = (g[k] * f(chi[k]) + 1.0) * chi_dot[k];
      const double scale = 1.0 + std::abs(rhs) + std::abs(v_dot[k]);
      ASSERT_LE(v_dot[k], rhs + 1e-3 * scale) << "agent " << i << " t = " << t[k];
    }
  }
}

TEST(Simulation, ThirdOrderAgentsStayInsideTheirFunnels) {
  const ScenarioConfig cfg = third_order_pair();
  const Trace tr = run_scenario(cfg);
  const VerificationReport rep = verify_trace(tr, cfg);
  for (const CheckResult& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.detail;
  EXPECT_EQ(tr.order, 3);
  EXPECT_NO_THROW(tr.index_of("a2_e3"));
}

TEST(Simulation, DeterministicReruns) {
  const ScenarioConfig cfg = short_case("paper-case2", 1.0, 20);
  const Trace a = run_scenario(cfg);
  const Trace b = run_scenario(cfg);
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_EQ(a.final_state, b.final_state);
}

TEST(Simulation, ConsistentStartSettlesOnTheReference) {
  // Every chain starts on the leader (ŷ = x = (sin 0, cos 0)) and θ̂ = θ. The
  // unknown gain still has to be found through χ, so ε leaves zero briefly.
  ScenarioConfig cfg = short_case("paper-case1", 5.0, 100);
  for (AgentConfig& a : cfg.agents) {
    a.y_hat0 = {0.0, 1.0};
    a.x0 = {0.0, 1.0};
    a.theta_hat0 = a.plant.theta;
  }
  const Trace tr = run_scenario(cfg);
  const std::vector<double> t = tr.column("t");
  for (int i = 1; i <= 4; ++i) {
    const std::vector<double> eps = tr.column(agent_column(i, "eps"));
    EXPECT_EQ(eps.front(), 0.0) << "agent " << i;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] >= 4.0) EXPECT_LT(std::abs(eps[k]), 0.03) << "agent " << i << " t = " << t[k];
    }
  }
  EXPECT_TRUE(verify_trace(tr, cfg).all_passed());
}

TEST(Simulation, InfeasibleStartIsReported) {
  ScenarioConfig cfg = short_case("paper-case1", 1.0, 100);
  cfg.agents[1].x0[0] = cfg.agents[1].y_hat0[0] + 3.0;
  try {
    run_scenario(cfg);
    FAIL() << "no throw";
  } catch (const InfeasibleInitialCondition& e) {
    EXPECT_NE(std::string(e.what()).find("agent 2"), std::string::npos) << e.what();
    EXPECT_EQ(std::string(e.what()).find("agent 1"), std::string::npos) << e.what();
  }
}

TEST(Simulation, CoarseStepFailsLoudly) {
  ScenarioConfig cfg = preset("paper-case1");
  cfg.integration.h = 0.1;
  cfg.integration.record_every = 1;
  bool raised = false;
  try {
    run_scenario(cfg);
  } catch (const GuardTripped&) {
    raised = true;
  } catch (const FunnelViolation&) {
    raised = true;
  }
  EXPECT_TRUE(raised);
}

TEST(Simulation, ChiGuardTrips) {
  ScenarioConfig cfg = short_case("paper-case1", 1.0, 100);
  cfg.guards.chi_abs_max = 0.05;
  EXPECT_THROW(run_scenario(cfg), GuardTripped);
}

TEST(TraceIo, RejectsForeignSchemaAndBadRows) {
  std::stringstream wrong("# schema: other/9\n# config_hash: 0\n# agents: 1\n# order: 2\nt\n0\n");
  EXPECT_THROW(read_trace(wrong), SchemaMismatch);

  const Trace tr = run_scenario(short_case("paper-case1", 0.02, 100));
  std::stringstream buf;
  write_trace(buf, tr);
  std::string text = buf.str();
  text += "1,2,3\n";
  std::stringstream broken(text);
  try {
    read_trace(broken);
    FAIL() << "no throw";
  } catch (const ParseError& e) {
    EXPECT_GT(e.line(), 4u);
  }
}

}  // namespace
}  // namespace ppc
