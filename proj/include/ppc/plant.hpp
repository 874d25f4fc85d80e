#pragma once

// Strict-feedback agent dynamics
//   ẋ_k = x_{k+1} + θᵀφ_k(x_1..x_k),  k < n
//   ẋ_n = g(x, t)·u + θᵀφ_n(x_1..x_n)
// with θ and g hidden from the controller.

#include <span>
#include <string>
#include <vector>

#include "ppc/expr.hpp"

namespace ppc {

struct PlantModel {
  int order = 2;
  std::vector<double> theta;
  // phi[k][d]: component d of the level-(k+1) regressor.
  std::vector<std::vector<Expr>> phi;
  Expr gain;
  // Admissible gain interval; both ends share one sign.
  double gain_lo = 1.0;
  double gain_hi = 1.0;

  int theta_dim() const { return static_cast<int>(theta.size()); }

  /// Throws InvalidParams on shape errors, a regressor that reads states past
  /// its level or depends on time, or a gain interval that straddles zero.
  void validate() const;

  /// +1 or −1: the sign every gain evaluation must carry.
  int gain_sign() const { return gain_lo > 0.0 ? 1 : -1; }

  template <typename T>
  std::vector<T> regressor(int level, std::span<const T> x) const;
};

using AgentPlantState = std::vector<double>;

/// g(x, t). Throws GainSignFlip when the sign differs from the declared one
/// and GainOutOfBounds when it leaves [gain_lo, gain_hi].
double gain_value(const PlantModel& m, std::span<const double> x, double t);

/// Throws NonFiniteState when any component is NaN or infinite.
std::vector<double> plant_derivative(const PlantModel& m, std::span<const double> x, double u, double t);

enum class ScenarioCase { Case1, Case2 };

/// The four benchmark agents; Case2 negates every gain.
std::vector<PlantModel> scenario_models(ScenarioCase which);

template <typename T>
std::vector<T> PlantModel::regressor(int level, std::span<const T> x) const {
  const auto& row = phi[static_cast<std::size_t>(level - 1)];
  std::vector<T> out;
  out.reserve(row.size());
  for (const Expr& e : row) out.push_back(e.template eval<T>(x, T(0.0)));
  return out;
}

}  // namespace ppc
