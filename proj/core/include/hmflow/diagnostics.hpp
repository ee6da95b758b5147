#pragma once

#include <cstdint>

#include "hmflow/flow_engine.hpp"

namespace hmflow {

/// Result of integrating the same initial state with the lattice ODE in
/// (a, b) and in (alpha, beta) coordinates.
struct OdeConsistency {
  /// max over the (a, b) trajectory of |a_dot - (alpha_dot beta + alpha beta_dot)|
  /// and |b_dot - 2 beta beta_dot|, both forms fed the same moments.
  double max_a_gap = 0.0;
  double max_b_gap = 0.0;
  /// max(|a_ab - a_alphabeta|, |b_ab - b_alphabeta|) at the end.
  double equivariance_gap = 0.0;
  double t_end = 0.0;
  std::uint64_t steps = 0;
  LatticeParams final_ab;
  LatticeParams final_alpha_beta;
};

/// Runs both parameterisations with the fixed step `dt` until t >= duration.
OdeConsistency check_ode_consistency(const FlowState& initial, const TargetManifold& target,
                                     double dt, double duration);

struct DecayCheck {
  double finite_difference = 0.0;  ///< (E(t + dt) - E(t)) / dt over one step
  double predicted = 0.0;          ///< energy_decay_rate at t
  double relative_error = 0.0;
};

/// Compares one step of the engine with the predicted energy decay rate.
DecayCheck check_decay_rate(const FlowState& state, const FlowEngine& engine);

}  // namespace hmflow
