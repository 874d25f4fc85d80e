#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ppc/errors.hpp"
#include "ppc/filter.hpp"
#include "ppc/graph.hpp"

namespace ppc {
namespace {

DirectedTopology two_agent_chain() {
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a(1, 0) = 1.0;
  return DirectedTopology(a, {1, 0});
}

TEST(ConsensusError, AgreementGivesZero) {
  const DirectedTopology topo = two_agent_chain();
  const ReferenceSignal ref = ReferenceSignal::sine();
  const double t = 0.8;
  const std::vector<double> y0 = ref.derivatives(t, 2);
  const std::vector<FilterState> states{{y0}, {y0}};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(consensus_error(i, states, topo, ref, t, k), 0.0, 1e-15);
}

TEST(ConsensusError, TwoAgentExample) {
  const DirectedTopology topo = two_agent_chain();
  const ReferenceSignal ref = ReferenceSignal::constant(0.0);
  const std::vector<FilterState> states{{{1.0, 0.0}}, {{0.6, 0.0}}};
  EXPECT_DOUBLE_EQ(consensus_error(0, states, topo, ref, 0.0, 0), 1.0);
  EXPECT_DOUBLE_EQ(consensus_error(1, states, topo, ref, 0.0, 0), -0.4);
}

TEST(ConsensusError, UnpinnedAgentIgnoresTheLeader) {
  const DirectedTopology topo = two_agent_chain();
  const std::vector<FilterState> states{{{1.0, 0.2}}, {{0.6, -0.1}}};
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(consensus_error(1, states, topo, ReferenceSignal::constant(5.0), 0.0, k),
              consensus_error(1, states, topo, ReferenceSignal::sine(3.0, 2.0), 1.3, k));
  }
}

TEST(ConsensusError, ReadsOnlyNeighbours) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  DenseMatrix a = DenseMatrix::Zero(5, 5);
  a(1, 0) = 1.0;
  a(2, 1) = 0.5;
  a(3, 1) = 2.0;
  a(4, 3) = 1.0;
  a(2, 4) = 1.0;
  const DirectedTopology topo(a, {1, 0, 0, 1, 0});
  const ReferenceSignal ref = ReferenceSignal::sine();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<FilterState> states(5);
    for (auto& s : states) s.y_hat = {d(rng), d(rng), d(rng)};
    for (int i = 0; i < 5; ++i) {
      std::vector<FilterState> mutated = states;
      for (int j = 0; j < 5; ++j) {
        const bool visible = j == i || a(i, j) > 0.0;
        if (!visible) mutated[static_cast<std::size_t>(j)].y_hat = {d(rng), d(rng), d(rng)};
      }
      for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(consensus_error(i, states, topo, ref, 0.4, k), consensus_error(i, mutated, topo, ref, 0.4, k));
      }
    }
  }
}

TEST(ConsensusError, CompactFormMatchesAugmentedLaplacian) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  DenseMatrix a = DenseMatrix::Zero(4, 4);
  a(1, 0) = 1.0;
  a(2, 1) = 0.7;
  a(3, 2) = 1.0;
  a(0, 3) = 0.3;
  const DirectedTopology topo(a, {1, 0, 1, 0});
  const ReferenceSignal ref = ReferenceSignal::sine();
  const DenseMatrix w = augmented(topo);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<FilterState> states(4);
    Eigen::VectorXd delta(4);
    const double t = d(rng) + 3.0;
    const double y0 = ref.derivatives(t, 1)[0];
    for (int i = 0; i < 4; ++i) {
      states[static_cast<std::size_t>(i)].y_hat = {d(rng), d(rng)};
      delta(i) = states[static_cast<std::size_t>(i)].y_hat[0] - y0;
    }
    const Eigen::VectorXd z = w * delta;
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(consensus_error(i, states, topo, ref, t, 0), z(i), 1e-12);
  }
}

TEST(FilteredConsensus, Examples) {
  EXPECT_DOUBLE_EQ(filtered_consensus(std::vector<double>{1.0, 0.5}, 2.0), 2.5);
  EXPECT_DOUBLE_EQ(filtered_consensus(std::vector<double>{0.7}, 2.0), 0.7);
  EXPECT_DOUBLE_EQ(filtered_consensus(std::vector<double>{1.0, 1.0, 1.0}, 1.0), 4.0);
  // n = 4: z''' + 3λz'' + 3λ²z' + λ³z.
  EXPECT_DOUBLE_EQ(filtered_consensus(std::vector<double>{1.0, 2.0, 3.0, 4.0}, 2.0), 4.0 + 18.0 + 24.0 + 8.0);
}

TEST(FilterInput, Examples) {
  const PerformanceFunction rho{2.0, 0.03, 1.0};
  EXPECT_EQ(filter_input(0.0, rho, 0.0, 4.0), 0.0);
  EXPECT_NEAR(filter_input(1.0, rho, 0.0, 4.0), -1.5 * std::log(3.0), 1e-14);
  EXPECT_NEAR(filter_input(1.0, rho, 0.0, 4.0), -1.6479, 1e-4);
  EXPECT_THROW(filter_input(2.0, rho, 0.0, 4.0), FunnelViolation);
}

TEST(FilterInput, BoundedNearTheFunnelEdge) {
  const PerformanceFunction rho{2.0, 0.03, 1.0};
  const double edge = 2.0 * (1.0 - 1e-12);
  const double nu = filter_input(edge, rho, 0.0, 4.0);
  EXPECT_TRUE(std::isfinite(nu));
  EXPECT_LE(std::abs(nu), 4.0 / 2.0 * filter_input_shape_max());
  EXPECT_LT(std::abs(nu), 1e-9);
}

TEST(FilterInput, ShapeMaximumMatchesGridSearch) {
  double best = 0.0;
  for (int k = 1; k < 1000000; ++k) {
    const double z = k * 1e-6;
    best = std::max(best, (1.0 - z * z) * std::log((1.0 + z) / (1.0 - z)));
  }
  EXPECT_NEAR(filter_input_shape_max(), best, 1e-9);
}

TEST(FilterDerivative, ShiftStructure) {
  EXPECT_EQ(filter_derivative(FilterState{{1.0, 0.6}}, 0.0), (std::vector<double>{0.6, 0.0}));
  EXPECT_EQ(filter_derivative(FilterState{{0.0, 0.0}}, 3.0), (std::vector<double>{0.0, 3.0}));
  EXPECT_EQ(filter_derivative(FilterState{{1.0, 2.0, 3.0}}, 4.0), (std::vector<double>{2.0, 3.0, 4.0}));
}

TEST(FilterParams, Validation) {
  FilterParams p{2.0, {4.0, 4.0}, {2.0, 0.03, 1.0}};
  EXPECT_NO_THROW(p.validate(2));
  EXPECT_THROW(p.validate(3), InvalidParams);
  p.lambda = 1.0;
  EXPECT_THROW(p.validate(2), InvalidParams);
  p.lambda = 2.0;
  p.c[1] = 0.0;
  EXPECT_THROW(p.validate(2), InvalidParams);
}

TEST(Reference, SineDerivatives) {
  const ReferenceSignal ref = ReferenceSignal::sine(2.0, 3.0, 0.5);
  const double t = 0.7;
  const std::vector<double> d = ref.derivatives(t, 4);
  EXPECT_DOUBLE_EQ(d[0], 2.0 * std::sin(3.0 * t + 0.5));
  EXPECT_DOUBLE_EQ(d[1], 6.0 * std::cos(3.0 * t + 0.5));
  EXPECT_DOUBLE_EQ(d[2], -18.0 * std::sin(3.0 * t + 0.5));
  EXPECT_DOUBLE_EQ(d[3], -54.0 * std::cos(3.0 * t + 0.5));
  EXPECT_EQ(ReferenceSignal::constant(1.5).derivatives(9.0, 3), (std::vector<double>{1.5, 0.0, 0.0}));
}

TEST(Reference, TabulatedInterpolatesAndHolds) {
  const ReferenceSignal ref = ReferenceSignal::tabulated({{0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}, {2.0, 0.0, -1.0}});
  EXPECT_DOUBLE_EQ(ref.derivatives(0.5, 2)[0], 0.5);
  EXPECT_DOUBLE_EQ(ref.derivatives(1.5, 2)[1], 0.0);
  EXPECT_DOUBLE_EQ(ref.derivatives(-1.0, 1)[0], 0.0);
  EXPECT_DOUBLE_EQ(ref.derivatives(5.0, 2)[1], -1.0);
  EXPECT_THROW(ref.derivatives(0.5, 3), OrderTooHigh);
  EXPECT_THROW(ReferenceSignal::tabulated({{1.0, 0.0}, {0.5, 0.0}}), InvalidParams);
  EXPECT_THROW(ReferenceSignal::tabulated({}), InvalidParams);
}

DeltaBoundParams base_bound() {
  DeltaBoundParams p;
  p.n_agents = 4;
  p.order = 2;
  p.lambda = 2.0;
  p.iota = 1.0;
  p.rho0 = 2.0;
  p.rho_inf = 0.03;
  p.omega0 = {1.5};
  p.sigma = 0.3;
  return p;
}

TEST(DeltaBound, SecondOrderClosedForm) {
  const DeltaBoundParams p = base_bound();
  // ω̄ = |ω(0)| + (ρ₀ − ρ∞)/(λ − ι).
  const double omega_bar = 1.5 + 1.97 / 1.0;
  for (double t : {0.0, 0.5, 3.0}) {
    EXPECT_NEAR(delta_bound(t, p), 2.0 * (omega_bar * std::exp(-t) + 0.03 / 2.0) / 0.3, 1e-13);
  }
}

TEST(DeltaBound, SteadyStateLevel) {
  const DeltaBoundParams p = base_bound();
  EXPECT_NEAR(delta_bound(200.0, p), 2.0 * 0.015 / 0.3, 1e-14);
}

TEST(DeltaBound, ThirdOrderRecursion) {
  DeltaBoundParams p = base_bound();
  p.order = 3;
  p.lambda = 3.0;
  p.omega0 = {0.4, 0.9};
  const double w1 = 0.4 + 1.97 / 2.0;
  const double w2 = 0.9 + w1 / 2.0;
  EXPECT_NEAR(delta_bound(0.0, p), 2.0 * (w2 + 0.03 / 9.0) / 0.3, 1e-13);
}

TEST(DeltaBound, ConstantWithoutTransient) {
  DeltaBoundParams p = base_bound();
  p.rho0 = p.rho_inf;
  p.omega0 = {0.0};
  EXPECT_DOUBLE_EQ(delta_bound(0.0, p), delta_bound(7.0, p));
}

TEST(DeltaBound, RejectsBadParameters) {
  DeltaBoundParams p = base_bound();
  p.lambda = 1.0;
  EXPECT_THROW(delta_bound(0.0, p), InvalidParams);
  p = base_bound();
  p.sigma = 0.0;
  EXPECT_THROW(delta_bound(0.0, p), InvalidParams);
  p = base_bound();
  p.omega0 = {1.0, 2.0};
  EXPECT_THROW(delta_bound(0.0, p), InvalidParams);
}

TEST(OmegaInitial, AppliesTheShiftedOperator) {
  // n = 3: ω₂(0) = z(0), ω₁(0) = ż(0) + λz(0), maximized over agents.
  const std::vector<std::vector<double>> z{{1.0, -0.5, 9.0}, {-2.0, 1.0, -9.0}};
  const std::vector<double> w = omega_initial(z, 2.0);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_DOUBLE_EQ(w[0], std::max(std::abs(-0.5 + 2.0), std::abs(1.0 - 4.0)));
  EXPECT_DOUBLE_EQ(w[1], 2.0);
  const std::vector<std::vector<double>> z2{{0.3, 5.0}, {-0.7, 1.0}};
  EXPECT_EQ(omega_initial(z2, 2.0), std::vector<double>{0.7});
}

}  // namespace
}  // namespace ppc
