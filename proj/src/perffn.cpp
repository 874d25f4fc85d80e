#include "ppc/perffn.hpp"

#include <sstream>

#include "ppc/errors.hpp"

namespace ppc {

void PerformanceFunction::validate() const {
  if (!(beta0 > beta_inf && beta_inf > 0.0 && iota > 0.0) || !std::isfinite(beta0)) {
    std::ostringstream os;
    os << "performance function needs beta0 > beta_inf > 0 and iota > 0 (got beta0=" << beta0
       << ", beta_inf=" << beta_inf << ", iota=" << iota << ")";
    throw InvalidParams(os.str());
  }
}

double pf_eval(const PerformanceFunction& pf, double t) {
  return (pf.beta0 - pf.beta_inf) * std::exp(-pf.iota * t) + pf.beta_inf;
}

double pf_deriv(const PerformanceFunction& pf, double t, int k, int max_order) {
  if (k < 0) throw InvalidParams("derivative order must be nonnegative");
  if (k > max_order) {
    std::ostringstream os;
    os << "derivative order " << k << " exceeds configured maximum " << max_order;
    throw OrderTooHigh(os.str());
  }
  if (k == 0) return pf_eval(pf, t);
  double coeff = pf.beta0 - pf.beta_inf;
  for (int i = 0; i < k; ++i) coeff *= -pf.iota;
  return coeff * std::exp(-pf.iota * t);
}

NormalizedError::NormalizedError(double zeta) : zeta_(zeta) {
  if (!(std::abs(zeta) < 1.0)) throw InvalidParams("normalized error must lie strictly inside (-1, 1)");
}

NormalizedError normalize(double e, const PerformanceFunction& pf, double t) {
  const double bound = pf_eval(pf, t);
  if (!(std::abs(e) < bound)) throw FunnelViolation(e, bound, t);
  const double zeta = e / bound;
  // |e| < bound can still round to |ζ| == 1 when e is within an ulp of bound.
  if (!(std::abs(zeta) < 1.0)) throw FunnelViolation(e, bound, t);
  return NormalizedError(zeta);
}

double transform_o(NormalizedError z) { return std::log1p(z.value()) - std::log1p(-z.value()); }

double transform_m(NormalizedError z) { return 1.0 / (1.0 - z.value() * z.value()); }

double inverse_transform_o(double o) { return std::tanh(0.5 * o); }

double output_bound(const PerformanceFunction& pf1, const PerformanceFunction& pf2, double t) {
  return pf_eval(pf1, t) + pf_eval(pf2, t);
}

}  // namespace ppc
