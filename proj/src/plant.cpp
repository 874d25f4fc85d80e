#include "ppc/plant.hpp"

#include <cmath>
#include <sstream>

#include "ppc/errors.hpp"

namespace ppc {

void PlantModel::validate() const {
  if (order < 1) throw InvalidParams("plant order must be at least 1");
  if (static_cast<int>(phi.size()) != order) throw InvalidParams("plant needs one regressor row per state");
  for (double v : theta)
    if (!std::isfinite(v)) throw InvalidParams("theta entries must be finite");
  for (int k = 0; k < order; ++k) {
    const auto& row = phi[static_cast<std::size_t>(k)];
    if (row.size() != theta.size()) {
      std::ostringstream os;
      os << "regressor row " << k + 1 << " has " << row.size() << " entries, theta has " << theta.size();
      throw InvalidParams(os.str());
    }
    for (const Expr& e : row) {
      if (e.max_variable() > k + 1) {
        std::ostringstream os;
        os << "regressor row " << k + 1 << " reads x" << e.max_variable() << " (strict-feedback violation)";
        throw InvalidParams(os.str());
      }
      if (e.uses_time()) throw InvalidParams("regressors must not depend on time");
    }
  }
  if (gain.max_variable() > order) throw InvalidParams("gain reads a state beyond the plant order");
  if (!(gain_lo <= gain_hi) || !std::isfinite(gain_lo) || !std::isfinite(gain_hi))
    throw InvalidParams("gain bounds must be finite with lo <= hi");
  if (!(gain_lo * gain_hi > 0.0)) throw InvalidParams("gain bounds must share a strict sign");
}

double gain_value(const PlantModel& m, std::span<const double> x, double t) {
  const double g = m.gain(x, t);
  if (!std::isfinite(g)) throw NonFiniteState("gain is not finite");
  if ((g > 0.0 ? 1 : -1) != m.gain_sign() || g == 0.0) {
    std::ostringstream os;
    os << "gain changed sign: g = " << g << " at t = " << t;
    throw GainSignFlip(os.str());
  }
  // Bounds are closed intervals; allow rounding at the ends.
  const double slack = 1e-12 * std::max(1.0, std::abs(m.gain_hi));
  if (g < m.gain_lo - slack || g > m.gain_hi + slack) {
    std::ostringstream os;
    os << "gain " << g << " outside [" << m.gain_lo << ", " << m.gain_hi << "] at t = " << t;
    throw GainOutOfBounds(os.str());
  }
  return g;
}

std::vector<double> plant_derivative(const PlantModel& m, std::span<const double> x, double u, double t) {
  const int n = m.order;
  std::vector<double> dx(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const std::vector<double> phi = m.regressor<double>(k, x);
    double drift = 0.0;
    for (std::size_t d = 0; d < phi.size(); ++d) drift += m.theta[d] * phi[d];
    const double feed = k < n ? x[static_cast<std::size_t>(k)] : gain_value(m, x, t) * u;
    dx[static_cast<std::size_t>(k - 1)] = feed + drift;
  }
  for (int k = 0; k < n; ++k) {
    if (!std::isfinite(dx[static_cast<std::size_t>(k)])) {
      std::ostringstream os;
      os << "plant derivative component x" << k + 1 << " is not finite at t = " << t;
      throw NonFiniteState(os.str());
    }
  }
  return dx;
}

namespace {

PlantModel benchmark_agent(double theta, const char* phi2, const char* gain, double lo, double hi) {
  PlantModel m;
  m.order = 2;
  m.theta = {theta};
  m.phi = {{Expr::parse("sin(x1)")}, {Expr::parse(phi2)}};
  m.gain = Expr::parse(gain);
  m.gain_lo = lo;
  m.gain_hi = hi;
  return m;
}

}  // namespace

std::vector<PlantModel> scenario_models(ScenarioCase which) {
  std::vector<PlantModel> agents = {
      benchmark_agent(0.7, "x2", "-0.5 - 0.1*sin(x1*x2)", -0.6, -0.4),
      benchmark_agent(0.8, "x2", "-0.6 - 0.2*cos(x1*x2)", -0.8, -0.4),
      benchmark_agent(0.5, "x1*x2", "1 + 0.2*cos(x2^2)", 0.8, 1.2),
      benchmark_agent(0.6, "x1*x2", "1 + 0.1*sin(x1^2)", 0.9, 1.1),
  };
  if (which == ScenarioCase::Case2) {
    for (PlantModel& m : agents) {
      m.gain = -m.gain;
      const double lo = m.gain_lo;
      m.gain_lo = -m.gain_hi;
      m.gain_hi = -lo;
    }
  }
  for (const PlantModel& m : agents) m.validate();
  return agents;
}

}  // namespace ppc
