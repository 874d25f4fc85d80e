#include "ppc/nussbaum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ppc/errors.hpp"

namespace ppc {

NussbaumFn::NussbaumFn(Kind kind, std::string name, std::function<double(double)> fn, double guard)
    : kind_(kind), name_(std::move(name)), fn_(std::move(fn)), chi_guard_(guard) {}

NussbaumFn NussbaumFn::exp_sin_half_pi(double chi_guard) {
  return NussbaumFn(Kind::ExpSinHalfPi, "exp-sin-half-pi",
                    [](double chi) { return std::exp(chi * chi) * std::sin(chi * std::numbers::pi / 2.0); },
                    chi_guard);
}

NussbaumFn NussbaumFn::custom(std::string name, std::function<double(double)> fn) {
  return NussbaumFn(Kind::Custom, std::move(name), std::move(fn), std::numeric_limits<double>::infinity());
}

double NussbaumFn::operator()(double chi) const {
  if (std::abs(chi) > chi_guard_) {
    std::ostringstream os;
    os << "Nussbaum argument |chi| = " << std::abs(chi) << " exceeds guard " << chi_guard_;
    throw Overflow(os.str());
  }
  const double v = fn_(chi);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "Nussbaum function '" << name_ << "' is not finite at chi = " << chi;
    throw Overflow(os.str());
  }
  return v;
}

double nussbaum_eval(const NussbaumFn& f, double chi) { return f(chi); }

std::pair<double, double> truncations(const NussbaumFn& f, double chi) {
  const double n = f(chi);
  return {std::max(0.0, n), std::max(0.0, -n)};
}

double BKReport::k_measured() const { return std::min(max_ratio_plus_over_minus, max_ratio_minus_over_plus); }

BKReport verify_bk(const NussbaumFn& f, double k_target, double chi_max, int steps, double growth_threshold) {
  if (!(chi_max > 0.0)) throw InvalidParams("chi_max must be positive");
  if (chi_max > f.chi_guard()) throw Overflow("chi_max exceeds the Nussbaum overflow guard");
  if (steps < 1000) throw InvalidParams("verify_bk needs at least 1000 quadrature steps");
  if (steps % 2 != 0) ++steps;

  BKReport r;
  r.k_target = k_target;
  r.chi_max = chi_max;
  r.growth_threshold = growth_threshold;

  const double h = chi_max / steps;
  const auto pairs = static_cast<std::size_t>(steps / 2);
  r.chi_grid.reserve(pairs + 1);
  r.integral_plus.reserve(pairs + 1);
  r.integral_minus.reserve(pairs + 1);
  r.chi_grid.push_back(0.0);
  r.integral_plus.push_back(0.0);
  r.integral_minus.push_back(0.0);

  double acc_plus = 0.0;
  double acc_minus = 0.0;
  auto [p0, m0] = truncations(f, 0.0);
  for (std::size_t k = 1; k <= pairs; ++k) {
    const double mid = (2.0 * static_cast<double>(k) - 1.0) * h;
    const double right = 2.0 * static_cast<double>(k) * h;
    const auto [pm, mm] = truncations(f, mid);
    const auto [pr, mr] = truncations(f, right);
    acc_plus += h / 3.0 * (p0 + 4.0 * pm + pr);
    acc_minus += h / 3.0 * (m0 + 4.0 * mm + mr);
    p0 = pr;
    m0 = mr;
    r.chi_grid.push_back(right);
    r.integral_plus.push_back(acc_plus);
    r.integral_minus.push_back(acc_minus);
  }

  const double inf = std::numeric_limits<double>::infinity();
  r.ratio_plus_over_minus.resize(r.chi_grid.size());
  r.ratio_minus_over_plus.resize(r.chi_grid.size());
  for (std::size_t k = 0; k < r.chi_grid.size(); ++k) {
    r.ratio_plus_over_minus[k] = r.integral_minus[k] > 0.0 ? r.integral_plus[k] / r.integral_minus[k] : inf;
    r.ratio_minus_over_plus[k] = r.integral_plus[k] > 0.0 ? r.integral_minus[k] / r.integral_plus[k] : inf;
  }
  // A zero numerator over a zero denominator carries no information; report
  // it as 0 so that a one-sided function cannot pass on the vacuous ratio.
  for (std::size_t k = 0; k < r.chi_grid.size(); ++k) {
    if (r.integral_plus[k] == 0.0 && r.integral_minus[k] == 0.0) {
      r.ratio_plus_over_minus[k] = 0.0;
      r.ratio_minus_over_plus[k] = 0.0;
    }
  }

  const double tail_start = 0.5 * chi_max;
  for (std::size_t k = 0; k < r.chi_grid.size(); ++k) {
    if (r.chi_grid[k] < tail_start) continue;
    r.max_ratio_plus_over_minus = std::max(r.max_ratio_plus_over_minus, r.ratio_plus_over_minus[k]);
    r.max_ratio_minus_over_plus = std::max(r.max_ratio_minus_over_plus, r.ratio_minus_over_plus[k]);
  }

  const double chi_end = r.chi_grid.back();
  r.growth_plus = r.integral_plus.back() / chi_end;
  r.growth_minus = r.integral_minus.back() / chi_end;
  r.growth_ok = r.growth_plus > growth_threshold && r.growth_minus > growth_threshold;
  // A ratio that is infinite only because one truncation never integrates to
  // anything nonzero does not count as growth of that side.
  const bool plus_finite = std::isfinite(r.max_ratio_plus_over_minus);
  const bool minus_finite = std::isfinite(r.max_ratio_minus_over_plus);
  r.ratio_ok = plus_finite && minus_finite && r.max_ratio_plus_over_minus >= k_target &&
               r.max_ratio_minus_over_plus >= k_target;
  r.passes = r.growth_ok && r.ratio_ok;
  return r;
}

double simpson_integral(const NussbaumFn& f, double chi, int steps) {
  if (steps < 2) throw InvalidParams("simpson_integral needs at least 2 steps");
  if (steps % 2 != 0) ++steps;
  const double h = chi / steps;
  double acc = f(0.0) + f(chi);
  for (int k = 1; k < steps; ++k) acc += (k % 2 == 1 ? 4.0 : 2.0) * f(k * h);
  return acc * h / 3.0;
}

std::vector<double> central_difference(std::span<const double> y, double dt) {
  std::vector<double> d(y.size(), 0.0);
  const std::size_t n = y.size();
  if (n < 2) return d;
  d[0] = (y[1] - y[0]) / dt;
  d[n - 1] = (y[n - 1] - y[n - 2]) / dt;
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (y[k + 1] - y[k - 1]) / (2.0 * dt);
  return d;
}

namespace {

double uniform_step(std::span<const double> t) {
  if (t.size() < 2) return 0.0;
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0.0)) throw GridMismatch("time grid must be strictly increasing");
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs((t[k] - t[k - 1]) - dt) > 1e-6 * dt) throw GridMismatch("time grid is not uniform");
  }
  return dt;
}

}  // namespace

Lemma4Result lemma4_trace_check(std::span<const double> t, std::span<const double> v,
                                std::span<const double> chi, std::span<const double> g_eff, double a,
                                const NussbaumFn& f, double tol) {
  if (v.size() != t.size() || chi.size() != t.size() || g_eff.size() != t.size()) {
    std::ostringstream os;
    os << "series lengths differ: t=" << t.size() << " V=" << v.size() << " chi=" << chi.size()
       << " g=" << g_eff.size();
    throw GridMismatch(os.str());
  }
  Lemma4Result r;
  if (t.empty()) {
    r.holds = true;
    return r;
  }
  const double dt = uniform_step(t);
  const std::vector<double> chi_dot = dt > 0.0 ? central_difference(chi, dt) : std::vector<double>(t.size(), 0.0);

  bool finite = true;
  for (std::size_t k = 0; k < t.size(); ++k) {
    finite = finite && std::isfinite(v[k]) && std::isfinite(chi[k]);
    r.max_abs_chi = std::max(r.max_abs_chi, std::abs(chi[k]));
    r.max_v = std::max(r.max_v, v[k]);
  }

  r.worst_margin = std::numeric_limits<double>::infinity();
  double integral = 0.0;
  double prev = (g_eff[0] * f(chi[0]) + a) * chi_dot[0];
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) {
      const double cur = (g_eff[k] * f(chi[k]) + a) * chi_dot[k];
      integral += 0.5 * dt * (prev + cur);
      prev = cur;
    }
    const double lhs = v[k] - v[0];
    const double slack = tol * (1.0 + std::abs(integral));
    const double margin = (integral + slack - lhs) / (1.0 + std::abs(integral));
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.worst_time = t[k];
    }
  }
  r.holds = finite && r.worst_margin >= 0.0;
  return r;
}

Lemma4Result lemma4_work_check(std::span<const double> t, std::span<const double> v,
                               std::span<const double> chi, std::span<const double> work, double tol) {
  if (v.size() != t.size() || chi.size() != t.size() || work.size() != t.size())
    throw GridMismatch("series lengths differ");
  Lemma4Result r;
  r.holds = true;
  if (t.empty()) return r;
  uniform_step(t);
  bool finite = true;
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.size(); ++k) {
    finite = finite && std::isfinite(v[k]) && std::isfinite(chi[k]) && std::isfinite(work[k]);
    r.max_abs_chi = std::max(r.max_abs_chi, std::abs(chi[k]));
    r.max_v = std::max(r.max_v, v[k]);
    const double rhs = work[k] - work[0];
    const double margin = (rhs + tol * (1.0 + std::abs(rhs)) - (v[k] - v[0])) / (1.0 + std::abs(rhs));
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.worst_time = t[k];
    }
  }
  r.holds = finite && r.worst_margin >= 0.0;
  return r;
}

bool check_lemma4_trace(std::span<const double> t, std::span<const double> v, std::span<const double> chi,
                        std::span<const double> g_eff, double a, const NussbaumFn& f, double tol) {
  return lemma4_trace_check(t, v, chi, g_eff, a, f, tol).holds;
}

}  // namespace ppc
