#pragma once

// Distributed reference filter: each follower drives an n-th order chain of
// integrators ŷ^(n) = ν from its neighbours' chains (and the leader, when
// pinned) so that the filtered consensus error stays inside ±ρ(t).

#include <span>
#include <string>
#include <vector>

#include "ppc/graph.hpp"
#include "ppc/perffn.hpp"

namespace ppc {

/// (ŷ, ŷ̇, ..., ŷ^(n−1)).
struct FilterState {
  std::vector<double> y_hat;

  bool operator==(const FilterState&) const = default;
};

struct FilterParams {
  double lambda = 2.0;
  std::vector<double> c;  // one gain per agent
  PerformanceFunction rho;

  bool operator==(const FilterParams&) const = default;

  /// Throws InvalidParams unless λ > ι, every c_i > 0 and there is one c_i per agent.
  void validate(int n_agents) const;
};

/// Leader output y₀ with analytic derivatives.
class ReferenceSignal {
 public:
  enum class Kind { Sine, Constant, Tabulated };

  /// amplitude·sin(omega·t + phase).
  static ReferenceSignal sine(double amplitude = 1.0, double omega = 1.0, double phase = 0.0);
  static ReferenceSignal constant(double value);
  /// Rows (t, y₀, ẏ₀, ...), strictly increasing t; each column is linearly
  /// interpolated and held constant outside the table.
  static ReferenceSignal tabulated(std::vector<std::vector<double>> rows);

  Kind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  double omega() const { return omega_; }
  double phase() const { return phase_; }
  double value() const { return amplitude_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

  /// (y₀, ẏ₀, ..., y₀^(count−1)) at t. Throws OrderTooHigh when a table
  /// lacks the requested derivative columns.
  std::vector<double> derivatives(double t, int count) const;

  bool operator==(const ReferenceSignal&) const = default;

 private:
  ReferenceSignal() = default;

  Kind kind_ = Kind::Sine;
  double amplitude_ = 1.0;
  double omega_ = 1.0;
  double phase_ = 0.0;
  std::vector<std::vector<double>> rows_;
};

/// k-th derivative of z_i = Σ_j a_ij(ŷ_i − ŷ_j) + b_i(ŷ_i − y₀). Reads only
/// agent i, its in-neighbours, and the leader when b_i = 1.
double consensus_error(int i, std::span<const FilterState> states, const DirectedTopology& topo,
                       const ReferenceSignal& ref, double t, int k);

/// z̄ = Σ_k C(n−1, k)·λ^k·z^(n−1−k) for z_derivs = (z, ż, ..., z^(n−1)).
double filtered_consensus(std::span<const double> z_derivs, double lambda);

/// ν = −(c/ρ)·(1 − ζ²)·ln((1 + ζ)/(1 − ζ)), ζ = z̄/ρ(t).
double filter_input(double zbar, const PerformanceFunction& rho, double t, double c);

/// max over ζ ∈ (−1, 1) of |(1 − ζ²)·ln((1 + ζ)/(1 − ζ))|.
double filter_input_shape_max();

std::vector<double> filter_derivative(const FilterState& s, double nu);

struct DeltaBoundParams {
  int n_agents = 1;
  int order = 2;
  double lambda = 2.0;
  double iota = 1.0;
  double rho0 = 2.0;
  double rho_inf = 0.03;
  std::vector<double> omega0;  // |ω_1(0)|, ..., |ω_{n−1}(0)|
  double sigma = 1.0;          // σ_min(L + B) or a lower bound on it
};

/// √N·(ω̄_{n−1}e^(−ιt) + ρ∞/λ^(n−1)) / σ. Throws InvalidParams if λ <= ι,
/// σ <= 0, or omega0 has the wrong length.
double delta_bound(double t, const DeltaBoundParams& p);

/// |ω_k(0)| = max_i |((d/dt + λ)^(n−1−k) z_i)(0)| for k = 1..n−1, from the
/// consensus-error derivatives of every agent at t = 0.
std::vector<double> omega_initial(std::span<const std::vector<double>> z_derivs_per_agent, double lambda);

}  // namespace ppc
