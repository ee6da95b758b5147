#include <gtest/gtest.h>

#include <cctype>
#include <cmath>
#include <ostream>
#include <string>

#include "hmflow/diagnostics.hpp"
#include "hmflow/flow_engine.hpp"
#include "hmflow/map_generators.hpp"
#include "hmflow/numerics.hpp"
#include "hmflow/qd_harness.hpp"
#include "hmflow/torus_domain.hpp"

namespace hmflow {
namespace {

struct Scenario {
  const char* target;
  std::uint64_t seed;
};

void PrintTo(const Scenario& s, std::ostream* os) { *os << s.target << "/seed" << s.seed; }

class FlowProperties : public ::testing::TestWithParam<Scenario> {
 protected:
  TargetManifold target() const { return TargetManifold::from_name(GetParam().target); }

  FlowState initial(std::size_t n = 24) const {
    auto rng = make_rng(GetParam().seed, 99);
    const auto l = LatticeParams::from_ab(uniform(rng, -0.5, 0.5), uniform(rng, 0.6, 1.6));
    return make_state(random_smooth_map(target(), {n, n}, GetParam().seed, 0), l);
  }
};

TEST_P(FlowProperties, EnergyNonIncreasingAndOnTarget) {
  FlowSettings s;
  s.target = target();
  const FlowEngine engine(s);
  FlowState st = initial();
  const double e0 = energy(st.moments, st.lattice);
  double prev = e0;
  for (int k = 0; k < 300; ++k) {
    st = engine.step(std::move(st), false);
    const double e = energy(st.moments, st.lattice);
    ASSERT_LE(e, prev + 1e-6 * (1 + e0)) << k;
    prev = e;
  }
  for (std::size_t i = 0; i < 24; ++i)
    for (std::size_t j = 0; j < 24; ++j) ASSERT_LT(target().distance(st.u.at(i, j)), 1e-10);
}

TEST_P(FlowProperties, RunTraceIsMonotone) {
  FlowSettings s;
  s.target = target();
  const FlowEngine engine(s);
  const FlowState st = initial();
  RunControl c;
  c.t_max = 0.02;
  c.trace_cadence = 1;
  c.tol_converge = 0;
  const auto r = engine.run(st, c);
  const double tol = 1e-6 * (1 + r.state.trace.front().energy);
  for (std::size_t k = 1; k < r.state.trace.size(); ++k) {
    ASSERT_LE(r.state.trace[k].energy, r.state.trace[k - 1].energy + tol);
  }
}

TEST_P(FlowProperties, DecayRateMatchesOneStepDifference) {
  FlowSettings s;
  s.target = target();
  s.cfl_fraction = 0.01;
  const auto d = check_decay_rate(initial(48), FlowEngine(s));
  EXPECT_LE(d.predicted, 0.0);
  // O(dt) from the step and O(h^2) from the compact-versus-wide stencils.
  EXPECT_LT(d.relative_error, 0.05);
}

TEST_P(FlowProperties, ParameterizationsAgree) {
  const auto c = check_ode_consistency(initial(), target(), 1e-4, 0.1);
  EXPECT_LT(c.max_a_gap, 1e-10);
  EXPECT_LT(c.max_b_gap, 1e-10);
  // Euler in (a, b) and in (alpha, beta) agree only in the limit dt -> 0.
  EXPECT_LT(c.equivariance_gap, 1e-6);
  if (c.equivariance_gap > 1e-9) {
    const auto half = check_ode_consistency(initial(), target(), 5e-5, 0.1);
    EXPECT_GT(c.equivariance_gap / half.equivariance_gap, 1.8);
  }
}

TEST_P(FlowProperties, MetricTermScalesWithEta) {
  FlowSettings s;
  s.target = target();
  const FlowEngine engine(s);
  FlowState a = initial();
  FlowState b = a;
  b.eta2 = 2 * a.eta2;
  const double tau2 = std::pow(engine.evaluate(a).tension_l2, 2);
  const double ma = engine.energy_decay_rate(a) + tau2;
  const double mb = engine.energy_decay_rate(b) + tau2;
  EXPECT_NEAR(mb, 2 * ma, 1e-12 * (1 + std::abs(mb)));
}

TEST_P(FlowProperties, HopfBoundHolds) {
  auto rng = make_rng(GetParam().seed, 7);
  const auto l = LatticeParams::from_ab(uniform(rng, -0.5, 0.5), uniform(rng, 0.5, 2));
  const auto s = harness::run_hopf_trials(target(), l, {32, 32}, GetParam().seed, 5);
  EXPECT_EQ(s.violations, 0);
}

INSTANTIATE_TEST_SUITE_P(RandomStates, FlowProperties,
                         ::testing::Values(Scenario{"flat-torus", 1}, Scenario{"flat-torus", 2},
                                           Scenario{"sphere:3", 3}, Scenario{"sphere:3", 4},
                                           Scenario{"sphere:4", 5}),
                         [](const ::testing::TestParamInfo<Scenario>& info) {
                           std::string name = info.param.target;
                           for (char& c : name) {
                             if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
                           }
                           return name + "_seed" + std::to_string(info.param.seed);
                         });

TEST(HarnessProperties, PoincareRatiosArePureFunctionsOfSpec) {
  harness::TrialSpec spec;
  spec.grid = {16, 16};
  spec.seed = 17;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto a = harness::poincare_ratio(harness::generate_differential(spec, k), LatticeParams{});
    const auto b = harness::poincare_ratio(harness::generate_differential(spec, k), LatticeParams{});
    ASSERT_EQ(a, b);
  }
}

TEST(HarnessProperties, PoincareRatiosFiniteOnRandomDifferentials) {
  // A single mode k gives 1 / (pi |k|); mixtures of the lowest shells stay
  // of the same order.
  harness::TrialSpec spec;
  spec.grid = {32, 32};
  spec.trials = 30;
  const auto s = harness::run_poincare_trials(spec, LatticeParams{});
  EXPECT_EQ(s.skipped, 0);
  EXPECT_GT(s.max_ratio, 0.0);
  EXPECT_LT(s.max_ratio, 1.0);
}

}  // namespace
}  // namespace hmflow
