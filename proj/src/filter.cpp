#include "ppc/filter.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ppc/errors.hpp"

namespace ppc {

void FilterParams::validate(int n_agents) const {
  rho.validate();
  if (!(lambda > rho.iota)) {
    std::ostringstream os;
    os << "filter pole lambda = " << lambda << " must exceed the funnel decay rate iota = " << rho.iota;
    throw InvalidParams(os.str());
  }
  if (static_cast<int>(c.size()) != n_agents) throw InvalidParams("need one filter gain per agent");
  for (double ci : c)
    if (!(ci > 0.0)) throw InvalidParams("filter gains must be positive");
}

ReferenceSignal ReferenceSignal::sine(double amplitude, double omega, double phase) {
  ReferenceSignal r;
  r.kind_ = Kind::Sine;
  r.amplitude_ = amplitude;
  r.omega_ = omega;
  r.phase_ = phase;
  return r;
}

ReferenceSignal ReferenceSignal::constant(double value) {
  ReferenceSignal r;
  r.kind_ = Kind::Constant;
  r.amplitude_ = value;
  r.omega_ = 0.0;
  return r;
}

ReferenceSignal ReferenceSignal::tabulated(std::vector<std::vector<double>> rows) {
  if (rows.empty()) throw InvalidParams("tabulated reference needs at least one row");
  const std::size_t width = rows.front().size();
  if (width < 2) throw InvalidParams("tabulated reference rows need (t, y0, ...)");
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != width) throw InvalidParams("tabulated reference rows must have equal width");
    if (k > 0 && !(rows[k][0] > rows[k - 1][0])) throw InvalidParams("tabulated reference times must increase");
  }
  ReferenceSignal r;
  r.kind_ = Kind::Tabulated;
  r.rows_ = std::move(rows);
  return r;
}

std::vector<double> ReferenceSignal::derivatives(double t, int count) const {
  std::vector<double> out(static_cast<std::size_t>(count), 0.0);
  switch (kind_) {
    case Kind::Sine: {
      // d^k/dt^k sin(ωt + φ) = ω^k sin(ωt + φ + kπ/2)
      double scale = amplitude_;
      for (int k = 0; k < count; ++k) {
        out[static_cast<std::size_t>(k)] = scale * std::sin(omega_ * t + phase_ + k * std::numbers::pi / 2.0);
        scale *= omega_;
      }
      break;
    }
    case Kind::Constant:
      if (count > 0) out[0] = amplitude_;
      break;
    case Kind::Tabulated: {
      const int available = static_cast<int>(rows_.front().size()) - 1;
      if (count > available) {
        std::ostringstream os;
        os << "tabulated reference provides " << available << " derivative columns, " << count << " requested";
        throw OrderTooHigh(os.str());
      }
      auto it = std::upper_bound(rows_.begin(), rows_.end(), t,
                                 [](double tv, const std::vector<double>& row) { return tv < row[0]; });
      if (it == rows_.begin()) {
        std::copy_n(rows_.front().begin() + 1, count, out.begin());
      } else if (it == rows_.end()) {
        std::copy_n(rows_.back().begin() + 1, count, out.begin());
      } else {
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double w = (t - lo[0]) / (hi[0] - lo[0]);
        for (int k = 0; k < count; ++k) {
          const auto col = static_cast<std::size_t>(k + 1);
          out[static_cast<std::size_t>(k)] = (1.0 - w) * lo[col] + w * hi[col];
        }
      }
      break;
    }
  }
  return out;
}

double consensus_error(int i, std::span<const FilterState> states, const DirectedTopology& topo,
                       const ReferenceSignal& ref, double t, int k) {
  const auto ki = static_cast<std::size_t>(k);
  const double own = states[static_cast<std::size_t>(i)].y_hat[ki];
  double z = 0.0;
  for (int j : topo.neighbors(i)) z += topo.weight(i, j) * (own - states[static_cast<std::size_t>(j)].y_hat[ki]);
  if (topo.pinned(i)) z += own - ref.derivatives(t, k + 1)[ki];
  return z;
}

double filtered_consensus(std::span<const double> z_derivs, double lambda) {
  const int n = static_cast<int>(z_derivs.size());
  double acc = 0.0;
  double binom = 1.0;
  double lam_pow = 1.0;
  for (int k = 0; k < n; ++k) {
    acc += binom * lam_pow * z_derivs[static_cast<std::size_t>(n - 1 - k)];
    binom = binom * (n - 1 - k) / (k + 1);
    lam_pow *= lambda;
  }
  return acc;
}

double filter_input(double zbar, const PerformanceFunction& rho, double t, double c) {
  const double bound = pf_eval(rho, t);
  const NormalizedError z = normalize(zbar, rho, t);
  const double zeta = z.value();
  return -(c / bound) * (1.0 - zeta * zeta) * transform_o(z);
}

double filter_input_shape_max() {
  // Odd in ζ, so the maximum of |·| is attained on (0, 1).
  auto neg_shape = [](double zeta) { return -(1.0 - zeta * zeta) * (std::log1p(zeta) - std::log1p(-zeta)); };
  const auto [arg, val] = boost::math::tools::brent_find_minima(neg_shape, 0.0, 1.0 - 1e-12, 52);
  (void)arg;
  return -val;
}

std::vector<double> filter_derivative(const FilterState& s, double nu) {
  std::vector<double> d(s.y_hat.size());
  for (std::size_t k = 0; k + 1 < s.y_hat.size(); ++k) d[k] = s.y_hat[k + 1];
  if (!d.empty()) d.back() = nu;
  return d;
}

double delta_bound(double t, const DeltaBoundParams& p) {
  if (!(p.lambda > p.iota)) {
    std::ostringstream os;
    os << "delta_bound needs lambda > iota (lambda = " << p.lambda << ", iota = " << p.iota << ")";
    throw InvalidParams(os.str());
  }
  if (!(p.sigma > 0.0)) throw InvalidParams("delta_bound needs a positive singular-value bound");
  if (p.order < 2) throw InvalidParams("delta_bound needs order >= 2");
  if (static_cast<int>(p.omega0.size()) != p.order - 1)
    throw InvalidParams("delta_bound needs one |omega_k(0)| per k = 1..n-1");
  const double gap = p.lambda - p.iota;
  double omega_bar = p.omega0[0] + (p.rho0 - p.rho_inf) / gap;
  for (int k = 2; k <= p.order - 1; ++k) omega_bar = p.omega0[static_cast<std::size_t>(k - 1)] + omega_bar / gap;
  const double steady = p.rho_inf / std::pow(p.lambda, p.order - 1);
  return std::sqrt(static_cast<double>(p.n_agents)) * (omega_bar * std::exp(-p.iota * t) + steady) / p.sigma;
}

std::vector<double> omega_initial(std::span<const std::vector<double>> z_derivs_per_agent, double lambda) {
  if (z_derivs_per_agent.empty()) return {};
  const int n = static_cast<int>(z_derivs_per_agent.front().size());
  std::vector<double> omega(static_cast<std::size_t>(std::max(0, n - 1)), 0.0);
  for (const auto& z : z_derivs_per_agent) {
    for (int k = 1; k <= n - 1; ++k) {
      // (d/dt + λ)^m z with m = n−1−k, needing z .. z^(m).
      const int m = n - 1 - k;
      const double w = filtered_consensus(std::span<const double>(z.data(), static_cast<std::size_t>(m + 1)), lambda);
      auto& slot = omega[static_cast<std::size_t>(k - 1)];
      slot = std::max(slot, std::abs(w));
    }
  }
  return omega;
}

}  // namespace ppc
