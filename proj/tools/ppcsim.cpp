// ppcsim: run, verify and inspect distributed prescribed-performance scenarios.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>

#include "ppc/errors.hpp"
#include "ppc/graph.hpp"
#include "ppc/nussbaum.hpp"
#include "ppc/sim.hpp"

namespace {

ppc::ScenarioConfig load(const std::string& config, const std::string& preset_name) {
  if (!config.empty() && !preset_name.empty()) throw ppc::InvalidParams("give either a config file or --preset, not both");
  if (!preset_name.empty()) return ppc::preset(preset_name);
  if (config.empty()) throw ppc::InvalidParams("a config file or --preset is required");
  return ppc::read_config(config);
}

void print_matrix(const char* name, const ppc::DenseMatrix& m) {
  std::printf("%s =\n", name);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::printf("  [");
    for (Eigen::Index c = 0; c < m.cols(); ++c) std::printf("%s%9.5f", c ? " " : "", m(r, c) + 0.0);  // + 0.0 turns -0 into 0
    std::printf(" ]\n");
  }
}

int cmd_simulate(const std::string& config, const std::string& preset_name, const std::string& out,
                 std::optional<double> t_end, std::optional<double> step, std::optional<int> record_every) {
  ppc::ScenarioConfig cfg = load(config, preset_name);
  if (t_end) cfg.integration.t_end = *t_end;
  if (step) cfg.integration.h = *step;
  if (record_every) cfg.integration.record_every = *record_every;
  const auto start = std::chrono::steady_clock::now();
  const ppc::Trace tr = ppc::run_scenario(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ppc::write_trace_file(out, tr);
  std::fprintf(stderr, "%s: %lld steps, %zu samples in %.2f s -> %s\n", cfg.name.c_str(), cfg.integration.steps(),
               tr.samples(), secs, out.c_str());
  return 0;
}

int cmd_verify(const std::string& trace_path, const std::string& config) {
  const ppc::ScenarioConfig cfg = ppc::read_config(config);
  const ppc::Trace tr = ppc::read_trace_file(trace_path);
  const ppc::VerificationReport rep = ppc::verify_trace(tr, cfg);
  for (const ppc::CheckResult& c : rep.checks) {
    std::printf("%-4s %-16s margin %+.6e at t = %.4f  (%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                c.worst_margin, c.worst_time, c.detail.c_str());
  }
  if (tr.config_hash != ppc::config_hash(cfg))
    std::printf("note: trace was produced by a config with hash %s, this config hashes to %s\n",
                tr.config_hash.c_str(), ppc::config_hash(cfg).c_str());
  return rep.all_passed() ? 0 : 1;
}

int cmd_graph(const std::string& config, const std::string& preset_name) {
  const ppc::ScenarioConfig cfg = load(config, preset_name);
  const ppc::DenseMatrix l = ppc::laplacian(cfg.topology);
  const ppc::DenseMatrix w = ppc::augmented(cfg.topology);
  print_matrix("L", l);
  print_matrix("W = L + B", w);
  std::printf("spanning tree from leader: %s\n", ppc::has_leader_spanning_tree(cfg.topology) ? "yes" : "no");
  std::printf("sigma_min(L + B) = %.10f\n", ppc::sigma_min(w));
  std::printf("kappa(N = %d)     = %.10f\n", cfg.topology.size(), ppc::kappa(cfg.topology.size()));
  try {
    const std::vector<double> cbar(static_cast<std::size_t>(cfg.topology.size()), 1.0);
    const ppc::DenseMatrix p = ppc::lemma1_p(w, cbar);
    print_matrix("P (C = I)", p);
    const Eigen::VectorXd ev = ppc::symmetric_eigenvalues(ppc::lemma1_q(w, cbar, p));
    std::printf("min eig(P W + W^T P) = %.10f\n", ev(0));
    const ppc::DenseMatrix p2 = ppc::lemma1_p_two_sided(w, cbar);
    print_matrix("two-sided P (C = I)", p2);
    std::printf("min eig(P W + W^T P) = %.10f  (two-sided)\n",
                ppc::symmetric_eigenvalues(ppc::lemma1_q(w, cbar, p2))(0));
  } catch (const ppc::Error& e) {
    std::printf("Lemma-1 construction failed: %s\n", e.what());
  }
  return 0;
}

int cmd_nussbaum(double k_target, double chi_max, int steps) {
  const ppc::NussbaumFn f = ppc::NussbaumFn::exp_sin_half_pi();
  const ppc::BKReport r = ppc::verify_bk(f, k_target, chi_max, steps);
  std::printf("function            %s\n", f.name().c_str());
  std::printf("chi range           [0, %g], %d Simpson steps\n", chi_max, steps);
  std::printf("growth N+ / N-      %.6e / %.6e  (threshold %g)  %s\n", r.growth_plus, r.growth_minus,
              r.growth_threshold, r.growth_ok ? "ok" : "FAIL");
  std::printf("max ratio +/-, -/+  %.6e / %.6e  (target %g)  %s\n", r.max_ratio_plus_over_minus,
              r.max_ratio_minus_over_plus, k_target, r.ratio_ok ? "ok" : "FAIL");
  std::printf("measured K          %.6e\n", r.k_measured());
  std::printf("verdict             %s\n", r.passes ? "PASS" : "FAIL");
  return r.passes ? 0 : 1;
}

int cmd_bounds(const std::string& config, const std::string& preset_name, double dt) {
  const ppc::ScenarioConfig cfg = load(config, preset_name);
  cfg.validate();
  const ppc::BoundSetup b = ppc::bound_setup(cfg);
  const ppc::DeltaBoundParams ps = b.params(cfg, false);
  const ppc::DeltaBoundParams pk = b.params(cfg, true);
  std::printf("t,rho,beta1_sigma,beta1_kappa");
  for (int i = 1; i <= cfg.n_agents(); ++i) std::printf(",a%d_beta2,a%d_beta", i, i);
  std::printf("\n");
  const long long n = std::llround(cfg.integration.t_end / dt);
  for (long long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double b1 = ppc::delta_bound(t, ps);
    std::printf("%.6g,%.12g,%.12g,%.12g", t, ppc::pf_eval(cfg.filter.rho, t), b1, ppc::delta_bound(t, pk));
    for (const ppc::AgentConfig& a : cfg.agents) {
      const double b2 = ppc::pf_eval(a.controller.beta2, t);
      std::printf(",%.12g,%.12g", b2, b1 + b2);
    }
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed prescribed-performance tracking simulator"};
  app.require_subcommand(1);

  std::string config, preset_name, out = "trace.csv", trace_path;
  std::optional<double> t_end, step;
  std::optional<int> record_every;
  auto* sim = app.add_subcommand("simulate", "Integrate a scenario and write a CSV trace");
  sim->add_option("config", config, "Scenario YAML file");
  sim->add_option("--preset", preset_name, "Built-in scenario (paper-case1 | paper-case2)");
  sim->add_option("--out,-o", out, "Trace output path");
  sim->add_option("--t-end", t_end, "Override the final time");
  sim->add_option("--step", step, "Override the RK4 step");
  sim->add_option("--record-every", record_every, "Override the recording stride");

  auto* ver = app.add_subcommand("verify", "Check every funnel and bound on a trace (exit 0 iff all pass)");
  ver->add_option("trace", trace_path, "Trace CSV")->required();
  ver->add_option("config", config, "Scenario YAML the trace was produced from")->required();

  auto* graph = app.add_subcommand("graph-analyze", "Print L, W, sigma_min, kappa and the Lemma-1 P matrices");
  graph->add_option("config", config, "Scenario YAML file");
  graph->add_option("--preset", preset_name, "Built-in scenario");

  double k_target = 3.0, chi_max = 8.0;
  int steps = 200000;
  auto* nuss = app.add_subcommand("nussbaum-check", "Finite-horizon B-K check of the default Nussbaum function");
  nuss->add_option("--k-target", k_target, "Required ratio maximum")->capture_default_str();
  nuss->add_option("--chi-max", chi_max, "Upper end of the chi grid")->capture_default_str();
  nuss->add_option("--steps", steps, "Simpson intervals")->capture_default_str();

  double dt = 0.01;
  auto* bounds = app.add_subcommand("bounds", "Print funnel and filter-error bound curves as CSV");
  bounds->add_option("config", config, "Scenario YAML file");
  bounds->add_option("--preset", preset_name, "Built-in scenario");
  bounds->add_option("--dt", dt, "Sampling interval")->capture_default_str();

  auto* dump = app.add_subcommand("write-config", "Write a built-in scenario as YAML to stdout");
  dump->add_option("preset", preset_name, "Built-in scenario")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(config, preset_name, out, t_end, step, record_every);
    if (*ver) return cmd_verify(trace_path, config);
    if (*graph) return cmd_graph(config, preset_name);
    if (*nuss) return cmd_nussbaum(k_target, chi_max, steps);
    if (*bounds) return cmd_bounds(config, preset_name, dt);
    if (*dump) {
      std::cout << ppc::write_config(ppc::preset(preset_name));
      return 0;
    }
  } catch (const ppc::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ppc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
