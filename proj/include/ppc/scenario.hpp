#pragma once

// Scenario configuration: topology, reference, filter and per-agent
// plant/controller settings, integration and guard limits. Serialized as YAML.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ppc/controller.hpp"
#include "ppc/filter.hpp"
#include "ppc/graph.hpp"
#include "ppc/plant.hpp"

namespace ppc {

struct AgentConfig {
  PlantModel plant;
  ControllerParams controller;
  std::vector<double> x0;
  std::vector<double> y_hat0;  // (ŷ, ŷ̇, ..., ŷ^(n−1)) at t = 0
  std::vector<double> theta_hat0;
  double chi0 = 0.0;
};

struct IntegrationSettings {
  double t_end = 20.0;
  double h = 1e-4;
  int record_every = 100;

  long long steps() const;
};

struct Guards {
  double chi_abs_max = 10.0;
  double state_abs_max = 1e8;
};

struct ScenarioConfig {
  std::string name = "custom";
  DirectedTopology topology{DenseMatrix::Zero(1, 1), {1}};
  ReferenceSignal reference = ReferenceSignal::sine();
  FilterParams filter;
  std::vector<AgentConfig> agents;
  IntegrationSettings integration;
  Guards guards;
  /// Initial normalized errors must satisfy |ζ| < feasibility_radius.
  double feasibility_radius = 1.0 - 1e-6;
  /// |ω_k(0)|, k = 1..n−1; empty means derive them from the initial chains.
  std::vector<double> omega0;

  int order() const;
  int n_agents() const { return static_cast<int>(agents.size()); }

  /// Structural validation: sizes, gains, λ > ι, Γ ≻ 0, leader spanning tree,
  /// integration settings. Throws InvalidParams.
  void validate() const;
};

bool operator==(const AgentConfig& a, const AgentConfig& b);
bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

/// "paper-case1" or "paper-case2". Throws InvalidParams for other names.
ScenarioConfig preset(std::string_view name);
std::vector<std::string> preset_names();

std::string write_config(const ScenarioConfig& cfg);
void write_config_file(const ScenarioConfig& cfg, const std::string& path);

/// Throws ParseError naming the line and key path on malformed input.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig read_config(const std::string& path);

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace ppc
