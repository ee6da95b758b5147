#include "hmflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "hmflow/error.hpp"

namespace hmflow {

OdeConsistency check_ode_consistency(const FlowState& initial, const TargetManifold& target,
                                     double dt, double duration) {
  if (!(dt > 0.0) || !(duration >= 0.0)) {
    throw DomainError("step and duration must be positive");
  }
  FlowSettings settings;
  settings.target = target;
  settings.dt_policy = DtPolicy::fixed;
  settings.fixed_dt = dt;

  settings.coordinates = LatticeCoordinates::ab;
  const FlowEngine ab_engine(settings);
  settings.coordinates = LatticeCoordinates::alpha_beta;
  const FlowEngine ab2_engine(settings);

  OdeConsistency out;
  FlowState s1 = initial;
  FlowState s2 = initial;
  while (s1.t < duration) {
    const LatticeParams& L = s1.lattice;
    const LatticeVelocity v = lattice_velocity_ab(s1.moments, L, s1.eta2);
    const AlphaBetaVelocity w = lattice_velocity_alphabeta(s1.moments, L, s1.eta2);
    out.max_a_gap = std::max(
        out.max_a_gap, std::abs(v.a_dot - (w.alpha_dot * L.beta() + L.alpha() * w.beta_dot)));
    out.max_b_gap = std::max(out.max_b_gap, std::abs(v.b_dot - 2.0 * L.beta() * w.beta_dot));
    s1 = ab_engine.step(std::move(s1), false);
    s2 = ab2_engine.step(std::move(s2), false);
  }
  out.t_end = s1.t;
  out.steps = s1.steps;
  out.final_ab = s1.lattice;
  out.final_alpha_beta = s2.lattice;
  out.equivariance_gap = std::max(std::abs(s1.lattice.a() - s2.lattice.a()),
                                  std::abs(s1.lattice.b() - s2.lattice.b()));
  return out;
}

DecayCheck check_decay_rate(const FlowState& state, const FlowEngine& engine) {
  const TensionSweep sweep = engine.evaluate(state);
  DecayCheck out;
  out.predicted = engine.energy_decay_rate(state, sweep);
  const double e0 = energy(state.moments, state.lattice);
  const FlowState next = engine.advance(state, sweep);
  out.finite_difference = (energy(next.moments, next.lattice) - e0) / next.dt;
  out.relative_error = out.predicted == 0.0
                           ? std::abs(out.finite_difference)
                           : std::abs(out.finite_difference - out.predicted) /
                                 std::abs(out.predicted);
  return out;
}

}  // namespace hmflow
