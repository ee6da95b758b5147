#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hmflow/fields.hpp"
#include "hmflow/lattice.hpp"
#include "hmflow/target_manifold.hpp"
#include "hmflow/torus_domain.hpp"

namespace hmflow {

/// One row of the trace CSV `t,E,tension_l2,projhopf_l2,a,b,max_density`.
struct TraceRow {
  double t = 0.0;
  double energy = 0.0;
  double tension_l2 = 0.0;
  double projhopf_l2 = 0.0;
  double a = 0.0;
  double b = 0.0;
  double max_density = 0.0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// Full simulator state. `moments` is derived from `u` and kept in sync by
/// make_state() and the stepper.
struct FlowState {
  MapField u;
  LatticeParams lattice;
  double t = 0.0;
  double eta2 = 2.0;
  double dt = 0.0;  ///< size of the most recent step
  std::uint64_t steps = 0;
  double initial_energy = 0.0;
  std::int64_t last_recorded_step = -1;
  std::vector<TraceRow> trace;
  GradientMoments moments;
};

/// Builds a state at t = 0 and records E(0) for the energy guard.
FlowState make_state(MapField u, LatticeParams lattice, double eta2 = 2.0);

struct LatticeVelocity {
  double a_dot = 0.0;
  double b_dot = 0.0;
};

struct AlphaBetaVelocity {
  double alpha_dot = 0.0;
  double beta_dot = 0.0;
};

/// (a_dot, b_dot) = (eta^2/4) (2b (C - aA), -(b^2 - a^2) A + B - 2aC) with
/// A, B, C the integrals of |u_x|^2, |u_y|^2, <u_x, u_y>.
LatticeVelocity lattice_velocity_ab(const GradientMoments& m,
                                    const LatticeParams& lattice, double eta2);
LatticeVelocity lattice_velocity_ab(const MapField& u,
                                    const LatticeParams& lattice, double eta2);

/// The same flow written for (alpha, beta).
AlphaBetaVelocity lattice_velocity_alphabeta(const GradientMoments& m,
                                             const LatticeParams& lattice,
                                             double eta2);
AlphaBetaVelocity lattice_velocity_alphabeta(const MapField& u,
                                             const LatticeParams& lattice,
                                             double eta2);

/// Explicit-Euler bound 0.2 h^2 / ((alpha^2 + beta^2) + 1/beta^2).
double stable_dt(const GridShape& shape, const LatticeParams& lattice);

enum class DtPolicy { cfl, fixed };
enum class LatticeCoordinates { ab, alpha_beta };

struct FlowSettings {
  TargetManifold target = TargetManifold::flat_torus();
  DtPolicy dt_policy = DtPolicy::cfl;
  double cfl_fraction = 1.0;  ///< dt = cfl_fraction * stable_dt
  double fixed_dt = 0.0;
  /// Coordinates in which the lattice ODE is integrated.
  LatticeCoordinates coordinates = LatticeCoordinates::ab;
  /// Per-step energy increase allowed, relative to 1 + E(0).
  double guard_tolerance = 1e-6;
};

struct RunControl {
  double t_max = 10.0;
  double tol_converge = 1e-6;
  std::uint64_t trace_cadence = 100;
  std::uint64_t checkpoint_cadence = 0;  ///< 0 disables periodic checkpoints
};

enum class RunStatus { converged, reached_t_max };

/// Time at which ||tau||_{L^2} + ||P_g Phi||_{L^2} reached a new minimum
/// among recorded rows.
struct GradientMinimum {
  double t = 0.0;
  double value = 0.0;
};

struct RunResult {
  FlowState state;
  RunStatus status = RunStatus::reached_t_max;
  std::vector<GradientMinimum> minima;
};

/// Receives trace rows as they are recorded and states to checkpoint.
class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_row(const TraceRow& /*row*/) {}
  virtual void on_checkpoint(const FlowState& /*state*/) {}
};

/// Coupled flow du/dt = tau_g(u), dg/dt = (eta^2/4) Re(P_g Phi), the latter
/// as an ODE for the lattice parameters.
///
/// A step is explicit Euler for the map followed by nodal re-projection onto
/// the target, then one Heun (RK2) step of the lattice ODE with the map
/// moments frozen at the start of the step. After each step the energy is
/// checked against the previous one; an increase beyond
/// guard_tolerance * (1 + E(0)) aborts with EnergyIncreaseError, and b
/// dropping below kLatticeFloor aborts with LatticeFloorError.
class FlowEngine {
 public:
  explicit FlowEngine(FlowSettings settings);

  const FlowSettings& settings() const noexcept { return settings_; }

  double step_size(const FlowState& state) const;

  /// Tension and per-node diagnostics of the current state.
  TensionSweep evaluate(const FlowState& state) const;

  TraceRow trace_row(const FlowState& state, const TensionSweep& sweep) const;

  /// dE/dt = -||tau||^2 - (eta/4)^2 ||Re(P_g Phi)||^2.
  double energy_decay_rate(const FlowState& state) const;
  double energy_decay_rate(const FlowState& state, const TensionSweep& sweep) const;

  /// One step. When `record` is set the pre-step diagnostics are appended to
  /// the trace.
  FlowState step(FlowState state, bool record = true) const;

  /// One step reusing a sweep already computed for `state`.
  FlowState advance(FlowState state, const TensionSweep& sweep) const;

  /// Steps until ||tau|| + ||P_g Phi|| < tol_converge or t >= t_max. Rows are
  /// recorded every trace_cadence steps and at termination.
  RunResult run(FlowState state, const RunControl& control,
                RunObserver* observer = nullptr) const;

 private:
  std::optional<LatticeParams> advance_lattice(const FlowState& state,
                                               double dt) const;

  /// Advances `state` in place. The new map is assembled in `spare`, which
  /// receives the old map on success; `next` receives the sweep of the new
  /// state. On error `state` is left untouched.
  void advance_in_place(FlowState& state, const TensionSweep& sweep, MapField& spare,
                        TensionSweep& next) const;

  FlowSettings settings_;
};

/// Largest energy contained in a g-geodesic disc of the given radius,
/// scanning centres on every `stride`-th node in each direction.
struct Concentration {
  double energy = 0.0;
  std::size_t row = 0;
  std::size_t col = 0;
};
Concentration concentration_monitor(const MapField& u, const LatticeParams& lattice,
                                    double radius, std::size_t stride = 1);

}  // namespace hmflow
