#pragma once

// Nussbaum-type gains for unknown control direction, and numeric desk checks
// of the B-K growth conditions and of the integrated boundedness inequality.

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ppc {

class NussbaumFn {
 public:
  enum class Kind { ExpSinHalfPi, Custom };

  /// |chi| beyond which e^(chi^2) overflows a double.
  static constexpr double kDefaultChiGuard = 26.6;

  /// N(χ) = e^(χ²)·sin(χπ/2).
  static NussbaumFn exp_sin_half_pi(double chi_guard = kDefaultChiGuard);
  static NussbaumFn custom(std::string name, std::function<double(double)> fn);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double chi_guard() const { return chi_guard_; }

  /// Throws Overflow when |χ| exceeds the guard or the value is not finite.
  double operator()(double chi) const;

 private:
  NussbaumFn(Kind kind, std::string name, std::function<double(double)> fn, double guard);

  Kind kind_;
  std::string name_;
  std::function<double(double)> fn_;
  double chi_guard_;
};

double nussbaum_eval(const NussbaumFn& f, double chi);

/// (N⁺, N⁻) = (max{0, N}, max{0, −N}).
std::pair<double, double> truncations(const NussbaumFn& f, double chi);

struct BKReport {
  double k_target = 0.0;
  double chi_max = 0.0;
  double growth_threshold = 0.0;
  // Cumulative quantities on the even Simpson nodes 0, 2h, 4h, ..., chi_max.
  std::vector<double> chi_grid;
  std::vector<double> integral_plus;
  std::vector<double> integral_minus;
  std::vector<double> ratio_plus_over_minus;  // +inf where ∫N⁻ = 0
  std::vector<double> ratio_minus_over_plus;  // +inf where ∫N⁺ = 0
  double growth_plus = 0.0;   // (1/χ)∫₀^χ N⁺ at chi_max
  double growth_minus = 0.0;  // (1/χ)∫₀^χ N⁻ at chi_max
  // Lim-sup surrogates: maxima over the tail window [chi_max/2, chi_max].
  double max_ratio_plus_over_minus = 0.0;
  double max_ratio_minus_over_plus = 0.0;
  bool growth_ok = false;
  bool ratio_ok = false;
  bool passes = false;

  /// min of the two lim-sup surrogates: the finite-horizon estimate of K.
  double k_measured() const;
};

/// Finite-horizon check of the B-K conditions using composite Simpson on
/// `steps` uniform intervals (rounded up to even) over [0, chi_max].
BKReport verify_bk(const NussbaumFn& f, double k_target, double chi_max, int steps = 200000,
                   double growth_threshold = 100.0);

/// Composite Simpson ∫₀^χ N(s) ds on `steps` uniform intervals.
double simpson_integral(const NussbaumFn& f, double chi, int steps);

struct Lemma4Result {
  bool holds = false;
  double worst_margin = 0.0;  // min over samples of (rhs + tol·(1+|rhs|) − (V − V₀)) / (1 + |rhs|)
  double worst_time = 0.0;
  double max_abs_chi = 0.0;
  double max_v = 0.0;
};

/// Checks V(t) − V(0) <= ∫₀ᵗ (g·N(χ) + a)·χ̇ dτ + tol·(1 + |rhs|) on every
/// sample of a uniform time grid, with χ̇ from central differences and the
/// integral by the trapezoid rule. Throws GridMismatch on ragged or
/// non-uniform series.
Lemma4Result lemma4_trace_check(std::span<const double> t, std::span<const double> v,
                                std::span<const double> chi, std::span<const double> g_eff, double a,
                                const NussbaumFn& f, double tol);

bool check_lemma4_trace(std::span<const double> t, std::span<const double> v, std::span<const double> chi,
                        std::span<const double> g_eff, double a, const NussbaumFn& f, double tol);

/// The same inequality with the right-hand side supplied as an already
/// integrated work series W(t) = ∫₀ᵗ (g·N(χ) + a)·χ̇ dτ (offset-free: W(t) − W(0)
/// is used).
Lemma4Result lemma4_work_check(std::span<const double> t, std::span<const double> v,
                               std::span<const double> chi, std::span<const double> work, double tol);

/// Central differences on a uniform grid, one-sided at the ends.
std::vector<double> central_difference(std::span<const double> y, double dt);

}  // namespace ppc
