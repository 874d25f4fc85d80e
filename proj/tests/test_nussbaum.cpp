#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "ppc/errors.hpp"
#include "ppc/nussbaum.hpp"

namespace ppc {
namespace {

const NussbaumFn kDefault = NussbaumFn::exp_sin_half_pi();

TEST(Nussbaum, Examples) {
  EXPECT_EQ(nussbaum_eval(kDefault, 0.0), 0.0);
  EXPECT_NEAR(nussbaum_eval(kDefault, 1.0), std::numbers::e, 1e-15);
  EXPECT_NEAR(nussbaum_eval(kDefault, 3.0), -std::exp(9.0), 1e-9);
  EXPECT_NEAR(nussbaum_eval(kDefault, 3.0), -8103.084, 1e-3);
}

TEST(Nussbaum, OverflowGuard) {
  EXPECT_NO_THROW(kDefault(26.0));
  EXPECT_THROW(kDefault(27.0), Overflow);
  EXPECT_THROW(kDefault(-27.0), Overflow);
  const NussbaumFn nan_fn = NussbaumFn::custom("nan", [](double) { return std::nan(""); });
  EXPECT_THROW(nan_fn(0.0), Overflow);
}

TEST(Truncations, Examples) {
  const auto [p1, m1] = truncations(kDefault, 1.0);
  EXPECT_NEAR(p1, std::numbers::e, 1e-15);
  EXPECT_EQ(m1, 0.0);
  const auto [p3, m3] = truncations(kDefault, 3.0);
  EXPECT_EQ(p3, 0.0);
  EXPECT_NEAR(m3, std::exp(9.0), 1e-9);
  const auto [p0, m0] = truncations(kDefault, 0.0);
  EXPECT_EQ(p0, 0.0);
  EXPECT_EQ(m0, 0.0);
}

TEST(Truncations, DecomposeTheFunction) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> chi_dist(-8.0, 8.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const double chi = chi_dist(rng);
    const auto [p, m] = truncations(kDefault, chi);
    EXPECT_EQ(p - m, kDefault(chi));
    EXPECT_EQ(std::min(p, m), 0.0);
    EXPECT_GE(p, 0.0);
    EXPECT_GE(m, 0.0);
  }
}

TEST(VerifyBK, DefaultFunctionPasses) {
  const BKReport r = verify_bk(kDefault, 3.0, 8.0);
  EXPECT_TRUE(r.growth_ok);
  EXPECT_TRUE(r.ratio_ok);
  EXPECT_TRUE(r.passes);
  EXPECT_GE(r.max_ratio_plus_over_minus, 3.0);
  EXPECT_GE(r.max_ratio_minus_over_plus, 3.0);
  EXPECT_TRUE(verify_bk(kDefault, 1.0, 8.0).passes);
}

TEST(VerifyBK, RatioMaximaSitAtLobeEnds) {
  // ∫N⁺/∫N⁻ peaks where a positive lobe ends (χ = 2, 6) and ∫N⁻/∫N⁺ where a
  // negative lobe ends (χ = 4, 8): the lobes alternate sign on [2m, 2m + 2].
  // Recompute those cumulative integrals independently and check the report.
  auto lobe = [](double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double s) { return std::exp(s * s) * std::sin(s * std::numbers::pi / 2.0); }, a, b, 15, 1e-13);
  };
  double plus = 0.0, minus = 0.0;
  double best_pm = 0.0, best_mp = 0.0;
  for (int m = 0; m < 4; ++m) {
    const double v = lobe(2.0 * m, 2.0 * m + 2.0);
    (v > 0 ? plus : minus) += std::abs(v);
    if (2.0 * m + 2.0 >= 4.0) {
      if (minus > 0) best_pm = std::max(best_pm, plus / minus);
      if (plus > 0) best_mp = std::max(best_mp, minus / plus);
    }
  }
  const BKReport r = verify_bk(kDefault, 3.0, 8.0);
  EXPECT_NEAR(r.max_ratio_plus_over_minus, best_pm, 1e-6 * best_pm);
  EXPECT_NEAR(r.max_ratio_minus_over_plus, best_mp, 1e-6 * best_mp);
}

TEST(VerifyBK, ConstantFunctionFails) {
  const NussbaumFn one = NussbaumFn::custom("one", [](double) { return 1.0; });
  const BKReport r = verify_bk(one, 3.0, 8.0);
  EXPECT_FALSE(r.passes);
  EXPECT_FALSE(r.ratio_ok);
  EXPECT_TRUE(std::isinf(r.max_ratio_plus_over_minus));
  EXPECT_EQ(r.max_ratio_minus_over_plus, 0.0);
}

TEST(VerifyBK, SlowOscillationFailsGrowth) {
  const NussbaumFn slow = NussbaumFn::custom("sin", [](double s) { return std::sin(s); });
  EXPECT_FALSE(verify_bk(slow, 1.0, 8.0).growth_ok);
}

TEST(VerifyBK, ScaledTruncationsRemainNussbaum) {
  const double k_measured = verify_bk(kDefault, 0.0, 8.0).k_measured();
  for (const auto& [eta1, eta2] : {std::pair{0.4, 0.8}, std::pair{0.8, 0.4}}) {
    const NussbaumFn scaled = NussbaumFn::custom("scaled", [eta1, eta2](double s) {
      const auto [p, m] = truncations(kDefault, s);
      return eta2 * p - eta1 * m;
    });
    const double k_target = std::min(eta2 / eta1, eta1 / eta2) * k_measured * (1.0 - 1e-9);
    const BKReport r = verify_bk(scaled, k_target, 8.0);
    EXPECT_TRUE(r.passes) << "eta = (" << eta1 << ", " << eta2 << "), k_target " << k_target;
  }
}

TEST(VerifyBK, RejectsBadArguments) {
  EXPECT_THROW(verify_bk(kDefault, 3.0, 0.0), InvalidParams);
  EXPECT_THROW(verify_bk(kDefault, 3.0, 8.0, 10), InvalidParams);
  EXPECT_THROW(verify_bk(kDefault, 3.0, 30.0), Overflow);
}

TEST(Simpson, MatchesAdaptiveQuadrature) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> chi_dist(0.1, 8.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double chi = chi_dist(rng);
    const double reference = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double s) { return std::exp(s * s) * std::sin(s * std::numbers::pi / 2.0); }, 0.0, chi, 20, 1e-14);
    const double simpson = simpson_integral(kDefault, chi, 200000);
    EXPECT_NEAR(simpson, reference, 1e-6 * std::abs(reference) + 1e-12) << "chi = " << chi;
  }
}

TEST(CentralDifference, ExactOnQuadratics) {
  std::vector<double> y;
  for (int k = 0; k <= 10; ++k) y.push_back(0.5 * k * k * 0.01);
  const std::vector<double> d = central_difference(y, 0.1);
  for (int k = 1; k < 10; ++k) EXPECT_NEAR(d[static_cast<std::size_t>(k)], 0.1 * k, 1e-12);
}

TEST(Lemma4, ConstantTraceHolds) {
  const std::vector<double> t{0.0, 0.1, 0.2, 0.3};
  const std::vector<double> v(4, 2.0), chi(4, 0.7), g(4, -0.5);
  const Lemma4Result r = lemma4_trace_check(t, v, chi, g, 1.0, kDefault, 1e-3);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(check_lemma4_trace(t, v, chi, g, 1.0, kDefault, 1e-3));
  EXPECT_NEAR(r.max_abs_chi, 0.7, 0.0);
}

TEST(Lemma4, JumpAboveTheRightHandSideFails) {
  const std::vector<double> t{0.0, 0.1, 0.2, 0.3};
  const std::vector<double> v{1.0, 1.0, 5.0, 1.0}, chi(4, 0.0), g(4, 1.0);
  const Lemma4Result r = lemma4_trace_check(t, v, chi, g, 1.0, kDefault, 1e-3);
  EXPECT_FALSE(r.holds);
  EXPECT_DOUBLE_EQ(r.worst_time, 0.2);
}

TEST(Lemma4, ExactSolutionOfTheEqualityCase) {
  // V̇ = (g·N(χ) + 1)·χ̇ with g = 1 integrates to V = V₀ + ∫N + χ − χ₀.
  std::vector<double> t, v, chi, g;
  for (int k = 0; k <= 4000; ++k) {
    const double s = k * 1e-3;
    const double c = 1.5 * std::sin(s);
    t.push_back(s);
    chi.push_back(c);
    g.push_back(1.0);
    // N is odd, so its integral from 0 is even in the upper limit.
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [](double x) { return std::exp(x * x) * std::sin(x * std::numbers::pi / 2.0); }, 0.0, std::abs(c), 10,
        1e-12);
    v.push_back(3.0 + integral + c);
  }
  EXPECT_TRUE(check_lemma4_trace(t, v, chi, g, 1.0, kDefault, 1e-3));
  for (std::size_t k = 2000; k < v.size(); ++k) v[k] += 0.5;
  EXPECT_FALSE(check_lemma4_trace(t, v, chi, g, 1.0, kDefault, 1e-3));
}

TEST(Lemma4, GridErrors) {
  const std::vector<double> t{0.0, 0.1, 0.3}, v(3, 0.0), chi(3, 0.0), g(3, 1.0);
  EXPECT_THROW(lemma4_trace_check(t, v, chi, g, 1.0, kDefault, 1e-3), GridMismatch);
  const std::vector<double> short_v(2, 0.0);
  const std::vector<double> t2{0.0, 0.1, 0.2};
  EXPECT_THROW(lemma4_trace_check(t2, short_v, chi, g, 1.0, kDefault, 1e-3), GridMismatch);
  EXPECT_THROW(lemma4_work_check(t2, short_v, chi, g, 1e-3), GridMismatch);
}

TEST(Lemma4, WorkSeriesCheck) {
  const std::vector<double> t{0.0, 0.1, 0.2};
  const std::vector<double> chi(3, 0.0);
  const std::vector<double> work{5.0, 6.0, 7.0};
  EXPECT_TRUE(lemma4_work_check(t, std::vector<double>{0.0, 0.9, 2.0}, chi, work, 1e-3).holds);
  const Lemma4Result bad = lemma4_work_check(t, std::vector<double>{0.0, 1.1, 2.0}, chi, work, 1e-3);
  EXPECT_FALSE(bad.holds);
  EXPECT_DOUBLE_EQ(bad.worst_time, 0.1);
}

}  // namespace
}  // namespace ppc
