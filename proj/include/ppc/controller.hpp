#pragma once

// Per-agent adaptive backstepping with a Nussbaum gain. The controller sees
// its own state, its filter chain, the tracking funnel and the known
// regressors; it never reads θ or g.

#include <span>
#include <vector>

#include "ppc/expr.hpp"
#include "ppc/graph.hpp"
#include "ppc/nussbaum.hpp"
#include "ppc/perffn.hpp"

namespace ppc {

/// Highest plant order the generic recursion is instantiated for.
inline constexpr int kMaxOrder = 4;

struct ControllerParams {
  std::vector<double> c;  // c_1..c_n
  DenseMatrix gamma;      // adaptation gain, symmetric positive definite
  PerformanceFunction beta2;
  NussbaumFn nussbaum = NussbaumFn::exp_sin_half_pi();

  /// Throws InvalidParams on non-positive gains, wrong sizes or an indefinite Γ.
  void validate(int order, int theta_dim) const;
};

struct AdaptiveState {
  std::vector<double> theta_hat;
  double chi = 0.0;
};

struct ControlEvaluation {
  double epsilon = 0.0;
  double zeta = 0.0;
  double xi = 0.0;
  double mu = 0.0;
  std::vector<double> e;      // e_1..e_n, e_1 = ξ
  std::vector<double> alpha;  // α_1..α_{n−1}
  std::vector<double> tau;    // τ_n
  double u_bar = 0.0;
  double u = 0.0;
};

struct TrackingError {
  double epsilon;
  NormalizedError zeta;
  double xi;
};

/// ε = y − ŷ, ζ = ε/β₂(t), ξ = ln((1 + ζ)/(1 − ζ)). Throws FunnelViolation.
TrackingError tracking_error(double y, double y_hat, const PerformanceFunction& beta2, double t);

/// μ = 2/(β₂·(1 − ζ²)).
double mu(NormalizedError zeta, double beta2_val);

/// Full control law. `yhat_derivs` = (ŷ, ..., ŷ^(n−1)); `beta2_derivs` =
/// (β₂, ..., β₂^(n)); `regressors[k]` is the level-(k+1) regressor row.
/// Throws FunnelViolation when |ε| >= β₂ and NonFiniteState on NaN/∞.
ControlEvaluation backstepping(std::span<const double> x, std::span<const double> yhat_derivs,
                               std::span<const double> beta2_derivs, const AdaptiveState& ad, double nu,
                               const ControllerParams& params, std::span<const std::vector<Expr>> regressors,
                               double t);

/// Hand-expanded n = 2 control law, independent of the generic recursion.
ControlEvaluation closed_form_n2(std::span<const double> x, std::span<const double> yhat_derivs,
                                 std::span<const double> beta2_derivs, const AdaptiveState& ad, double nu,
                                 const ControllerParams& params, std::span<const std::vector<Expr>> regressors,
                                 double t);

struct AdaptationRates {
  std::vector<double> theta_hat_dot;
  double chi_dot = 0.0;
};

/// θ̂̇ = Γ·τ_n, χ̇ = e_n·ū.
AdaptationRates adaptation_derivatives(const ControlEvaluation& eval, const DenseMatrix& gamma);

/// α_k and its exact partials with respect to every controller input.
struct VirtualControlGradient {
  double value = 0.0;
  std::vector<double> d_x;       // ∂/∂x_1..x_n
  std::vector<double> d_yhat;    // ∂/∂ŷ^(0..n−1)
  std::vector<double> d_beta2;   // ∂/∂β₂^(0..n)
  std::vector<double> d_theta;   // ∂/∂θ̂
};

/// α_level for 1 <= level <= n − 1, value only.
double virtual_control(int level, std::span<const double> x, std::span<const double> yhat_derivs,
                       std::span<const double> beta2_derivs, std::span<const double> theta_hat,
                       const ControllerParams& params, std::span<const std::vector<Expr>> regressors);

VirtualControlGradient virtual_control_gradient(int level, std::span<const double> x,
                                                std::span<const double> yhat_derivs,
                                                std::span<const double> beta2_derivs,
                                                std::span<const double> theta_hat, const ControllerParams& params,
                                                std::span<const std::vector<Expr>> regressors);

}  // namespace ppc
