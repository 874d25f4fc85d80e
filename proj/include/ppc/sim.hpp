#pragma once

// Fixed-step integration of the coupled filter + plant + adaptive system,
// the recorded trace and its CSV schema, and the trace verifier.

#include <iosfwd>
#include <string>
#include <vector>

#include "ppc/scenario.hpp"

namespace ppc {

inline constexpr const char* kTraceSchema = "ppc-trace/1";

/// Column-named samples on a uniform time grid.
struct Trace {
  std::string schema = kTraceSchema;
  std::string config_hash;
  int n_agents = 0;
  int order = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // rows[sample][column]
  // Full flat state at t_end, for convergence studies.
  std::vector<double> final_state;

  std::size_t index_of(const std::string& name) const;  // throws SchemaMismatch
  std::vector<double> column(const std::string& name) const;
  std::size_t samples() const { return rows.size(); }
};

/// Column names for `cfg`, in order. Per-agent columns are prefixed "a<i>_".
std::vector<std::string> trace_columns(const ScenarioConfig& cfg);

/// Name of the per-agent column `field` for agent i (1-based).
std::string agent_column(int agent, const std::string& field);

/// Inputs to the output-funnel bound: σ_min(L + B), κ(N), |ω_k(0)|.
struct BoundSetup {
  double sigma = 0.0;
  double kappa = 0.0;
  std::vector<double> omega0;

  DeltaBoundParams params(const ScenarioConfig& cfg, bool use_kappa) const;
};

BoundSetup bound_setup(const ScenarioConfig& cfg);

/// Throws InfeasibleInitialCondition listing every agent whose filtered
/// consensus or tracking error starts outside the feasibility radius.
void check_initial_feasibility(const ScenarioConfig& cfg);

/// Validates `cfg`, checks feasibility and integrates to t_end. Throws
/// FunnelViolation, GuardTripped, NonFiniteState, GainSignFlip, GainOutOfBounds.
Trace run_scenario(const ScenarioConfig& cfg);

void write_trace(std::ostream& out, const Trace& tr);
void write_trace_file(const std::string& path, const Trace& tr);
Trace read_trace(std::istream& in);
Trace read_trace_file(const std::string& path);

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst_margin = 0.0;
  double worst_time = 0.0;
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  const CheckResult& get(const std::string& name) const;
};

/// Check names, in report order.
std::vector<std::string> verification_checks();

/// Evaluates every funnel, bound and inequality on the stored samples.
/// Throws SchemaMismatch when the trace columns do not match `cfg`.
VerificationReport verify_trace(const Trace& tr, const ScenarioConfig& cfg);

/// Per-agent V = ½ξ² + ½θ̃ᵀΓ⁻¹θ̃ + ½Σ_{k≥2}e_k² along the trace, using the
/// true θ from the plant model.
std::vector<double> lyapunov_series(const Trace& tr, const ScenarioConfig& cfg, int agent);

}  // namespace ppc
