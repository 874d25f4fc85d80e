#pragma once

// Exponential performance functions and the normalized-error transforms that
// turn a funnel constraint |e| < β(t) into boundedness of an unconstrained
// signal.

#include <cmath>

namespace ppc {

/// β(t) = (β₀ − β∞)·e^(−ι·t) + β∞ with β₀ > β∞ > 0 and ι > 0.
struct PerformanceFunction {
  double beta0 = 1.0;
  double beta_inf = 0.1;
  double iota = 1.0;

  bool operator==(const PerformanceFunction&) const = default;

  /// Throws InvalidParams unless β₀ > β∞ > 0 and ι > 0.
  void validate() const;
};

/// Default cap on the derivative order pf_deriv accepts.
inline constexpr int kMaxDerivativeOrder = 16;

double pf_eval(const PerformanceFunction& pf, double t);

/// k-th time derivative. Throws OrderTooHigh when k > max_order.
double pf_deriv(const PerformanceFunction& pf, double t, int k, int max_order = kMaxDerivativeOrder);

/// e / β, guaranteed strictly inside (−1, 1).
class NormalizedError {
 public:
  /// Throws InvalidParams when |zeta| >= 1 or zeta is not finite.
  explicit NormalizedError(double zeta);

  double value() const { return zeta_; }

 private:
  double zeta_;
};

/// ζ = e / β(t). Throws FunnelViolation unless |e| < β(t).
NormalizedError normalize(double e, const PerformanceFunction& pf, double t);

/// O(ζ) = ln((1 + ζ)/(1 − ζ)), evaluated as log1p(ζ) − log1p(−ζ).
double transform_o(NormalizedError z);

/// M(ζ) = 1/(1 − ζ²).
double transform_m(NormalizedError z);

/// Inverse of transform_o: ζ = (e^O − 1)/(e^O + 1) = tanh(O/2).
double inverse_transform_o(double o);

/// Composed funnel β₁(t) + β₂(t) for e = δ + ε.
double output_bound(const PerformanceFunction& pf1, const PerformanceFunction& pf2, double t);

}  // namespace ppc
