#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ppc/errors.hpp"

namespace ppc {

/// Maps a flat state index to a human-readable component name.
using ComponentNamer = std::function<std::string(std::size_t)>;

namespace detail {

inline void require_finite_stage(std::span<const double> k, int stage, double t, const ComponentNamer& name) {
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!std::isfinite(k[i])) {
      std::ostringstream os;
      os << "RK4 stage " << stage << " at t = " << t << ": derivative of "
         << (name ? name(i) : "component " + std::to_string(i)) << " is not finite";
      throw NonFiniteState(os.str());
    }
  }
}

}  // namespace detail

/// One classical Runge-Kutta step. `f(t, y)` returns dy/dt.
template <typename F>
std::vector<double> rk4_step(F&& f, std::span<const double> state, double t, double h,
                             const ComponentNamer& name = {}) {
  const std::size_t n = state.size();
  std::vector<double> tmp(n);

  const std::vector<double> k1 = f(t, std::span<const double>(state));
  detail::require_finite_stage(k1, 1, t, name);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
  const std::vector<double> k2 = f(t + 0.5 * h, std::span<const double>(tmp));
  detail::require_finite_stage(k2, 2, t + 0.5 * h, name);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
  const std::vector<double> k3 = f(t + 0.5 * h, std::span<const double>(tmp));
  detail::require_finite_stage(k3, 3, t + 0.5 * h, name);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + h * k3[i];
  const std::vector<double> k4 = f(t + h, std::span<const double>(tmp));
  detail::require_finite_stage(k4, 4, t + h, name);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = state[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace ppc
