#include "hmflow/flow_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "hmflow/error.hpp"

namespace hmflow {

FlowState make_state(MapField u, LatticeParams lattice, double eta2) {
  if (!(eta2 >= 0.0) || !std::isfinite(eta2)) {
    throw DomainError("eta2 must be finite and non-negative");
  }
  FlowState s;
  s.moments = gradient_moments(u);
  s.u = std::move(u);
  s.lattice = lattice;
  s.eta2 = eta2;
  s.initial_energy = energy(s.moments, s.lattice);
  return s;
}

LatticeVelocity lattice_velocity_ab(const GradientMoments& m,
                                    const LatticeParams& lattice, double eta2) {
  const double k = 0.25 * eta2;
  const double a = lattice.a();
  const double b = lattice.b();
  return {k * 2.0 * b * (m.xy - a * m.xx),
          k * (-(b * b - a * a) * m.xx + m.yy - 2.0 * a * m.xy)};
}

LatticeVelocity lattice_velocity_ab(const MapField& u,
                                    const LatticeParams& lattice, double eta2) {
  return lattice_velocity_ab(gradient_moments(u), lattice, eta2);
}

AlphaBetaVelocity lattice_velocity_alphabeta(const GradientMoments& m,
                                             const LatticeParams& lattice,
                                             double eta2) {
  const double k = 0.25 * eta2;
  const double al = lattice.alpha();
  const double be = lattice.beta();
  const double be2 = be * be;
  const double beta_dot =
      -k * 0.5 * be *
      ((be2 - al * al) * m.xx - m.yy / be2 + 2.0 * al / be * m.xy);
  const double alpha_dot =
      k * (m.xx * (-1.5 * al * be2 - 0.5 * al * al * al) -
           al / (2.0 * be2) * m.yy + (al * al / be + 2.0 * be) * m.xy);
  return {alpha_dot, beta_dot};
}

AlphaBetaVelocity lattice_velocity_alphabeta(const MapField& u,
                                             const LatticeParams& lattice,
                                             double eta2) {
  return lattice_velocity_alphabeta(gradient_moments(u), lattice, eta2);
}

double stable_dt(const GridShape& shape, const LatticeParams& lattice) {
  const double h = std::min(shape.hx(), shape.hy());
  return 0.2 * h * h / lattice.max_coefficient();
}

FlowEngine::FlowEngine(FlowSettings settings) : settings_(std::move(settings)) {
  if (settings_.dt_policy == DtPolicy::cfl && !(settings_.cfl_fraction > 0.0)) {
    throw DomainError("cfl_fraction must be positive");
  }
  if (settings_.dt_policy == DtPolicy::fixed && !(settings_.fixed_dt > 0.0)) {
    throw DomainError("fixed dt must be positive");
  }
}

double FlowEngine::step_size(const FlowState& state) const {
  if (settings_.dt_policy == DtPolicy::fixed) return settings_.fixed_dt;
  return settings_.cfl_fraction * stable_dt(state.u.shape(), state.lattice);
}

TensionSweep FlowEngine::evaluate(const FlowState& state) const {
  return tension_sweep(state.u, state.lattice, settings_.target);
}

TraceRow FlowEngine::trace_row(const FlowState& state,
                               const TensionSweep& sweep) const {
  return {state.t,
          energy(state.moments, state.lattice),
          sweep.tension_l2,
          constant_qd_l2(hopf_mean(state.moments, state.lattice)),
          state.lattice.a(),
          state.lattice.b(),
          sweep.max_density};
}

double FlowEngine::energy_decay_rate(const FlowState& state,
                                     const TensionSweep& sweep) const {
  // Re(m dz^2) has pointwise squared norm 2|m|^2 on a unit-area torus.
  const double m2 = std::norm(hopf_mean(state.moments, state.lattice));
  const double re_proj_sq = 2.0 * m2;
  return -sweep.tension_l2 * sweep.tension_l2 -
         state.eta2 / 16.0 * re_proj_sq;
}

double FlowEngine::energy_decay_rate(const FlowState& state) const {
  return energy_decay_rate(state, evaluate(state));
}

std::optional<LatticeParams> FlowEngine::advance_lattice(const FlowState& state,
                                                         double dt) const {
  const LatticeParams& l0 = state.lattice;
  const GradientMoments& m = state.moments;
  const double eta2 = state.eta2;
  if (settings_.coordinates == LatticeCoordinates::ab) {
    const LatticeVelocity k1 = lattice_velocity_ab(m, l0, eta2);
    const double b1 = l0.b() + dt * k1.b_dot;
    if (!(b1 >= kLatticeFloor)) return std::nullopt;
    const LatticeParams l1 = LatticeParams::from_ab(l0.a() + dt * k1.a_dot, b1);
    const LatticeVelocity k2 = lattice_velocity_ab(m, l1, eta2);
    const double a = l0.a() + 0.5 * dt * (k1.a_dot + k2.a_dot);
    const double b = l0.b() + 0.5 * dt * (k1.b_dot + k2.b_dot);
    if (!(b >= kLatticeFloor)) return std::nullopt;
    return LatticeParams::from_ab(a, b);
  }
  const AlphaBetaVelocity k1 = lattice_velocity_alphabeta(m, l0, eta2);
  const double beta1 = l0.beta() + dt * k1.beta_dot;
  if (!(beta1 > 0.0) || !(beta1 * beta1 >= kLatticeFloor)) return std::nullopt;
  const LatticeParams l1 =
      LatticeParams::from_alpha_beta(l0.alpha() + dt * k1.alpha_dot, beta1);
  const AlphaBetaVelocity k2 = lattice_velocity_alphabeta(m, l1, eta2);
  const double alpha = l0.alpha() + 0.5 * dt * (k1.alpha_dot + k2.alpha_dot);
  const double beta = l0.beta() + 0.5 * dt * (k1.beta_dot + k2.beta_dot);
  if (!(beta > 0.0) || !(beta * beta >= kLatticeFloor)) return std::nullopt;
  return LatticeParams::from_alpha_beta(alpha, beta);
}

void FlowEngine::advance_in_place(FlowState& state, const TensionSweep& sweep,
                                  MapField& spare, TensionSweep& next) const {
  const double dt = step_size(state);
  const GridShape& g = state.u.shape();
  const std::size_t K = state.u.dim();
  if (!(spare.shape() == g) || spare.dim() != K) spare = MapField(g, K);

  const double* u = state.u.data().data();
  const double* tau = sweep.tension.data().data();
  double* dst = spare.data().data();
  for (std::size_t n = 0; n < g.size(); ++n) {
    double* p = dst + n * K;
    for (std::size_t k = 0; k < K; ++k) p[k] = u[n * K + k] + dt * tau[n * K + k];
    if (!settings_.target.try_project_point(p, p)) {
      const std::size_t i = n / g.cols;
      const std::size_t j = n % g.cols;
      throw FlowAbort("projection undefined at grid node (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") at t = " + std::to_string(state.t) +
                          ": step left the tubular neighbourhood",
                      std::make_shared<const FlowState>(state));
    }
  }

  const std::optional<LatticeParams> updated = advance_lattice(state, dt);
  if (!updated) {
    throw LatticeFloorError("lattice floor reached: b would drop below " +
                                std::to_string(kLatticeFloor) + " after t = " +
                                std::to_string(state.t),
                            std::make_shared<const FlowState>(state));
  }

  tension_sweep_into(spare, *updated, settings_.target, next);
  const double e_old = energy(state.moments, state.lattice);
  const double e_new = energy(next.moments, *updated);
  const double allowed = settings_.guard_tolerance * (1.0 + state.initial_energy);
  if (!(e_new <= e_old + allowed)) {
    throw EnergyIncreaseError("energy increased beyond tolerance: E " + std::to_string(e_old) +
                                  " -> " + std::to_string(e_new) + " at t = " +
                                  std::to_string(state.t) + " (dt = " + std::to_string(dt) +
                                  ")",
                              std::make_shared<const FlowState>(state));
  }

  std::swap(state.u, spare);
  state.lattice = *updated;
  state.moments = next.moments;
  state.t += dt;
  state.dt = dt;
  ++state.steps;
}

FlowState FlowEngine::advance(FlowState state, const TensionSweep& sweep) const {
  MapField spare;
  TensionSweep next;
  advance_in_place(state, sweep, spare, next);
  return state;
}

FlowState FlowEngine::step(FlowState state, bool record) const {
  const TensionSweep sweep = evaluate(state);
  if (record) {
    state.trace.push_back(trace_row(state, sweep));
    state.last_recorded_step = static_cast<std::int64_t>(state.steps);
  }
  return advance(std::move(state), sweep);
}

RunResult FlowEngine::run(FlowState state, const RunControl& control,
                          RunObserver* observer) const {
  if (control.trace_cadence == 0) {
    throw DomainError("trace cadence must be at least 1");
  }
  RunResult result;
  // A resumed run continues the minimum search of the rows it inherited.
  double best = std::numeric_limits<double>::infinity();
  for (const TraceRow& r : state.trace) best = std::min(best, r.tension_l2 + r.projhopf_l2);
  TensionSweep sweep = evaluate(state);
  TensionSweep next;
  MapField spare;
  for (;;) {
    const TraceRow row = trace_row(state, sweep);
    const double gradient = row.tension_l2 + row.projhopf_l2;
    const bool converged = gradient < control.tol_converge;
    const bool stop = converged || state.t >= control.t_max;
    const bool on_cadence = state.steps % control.trace_cadence == 0;
    const bool fresh =
        state.last_recorded_step != static_cast<std::int64_t>(state.steps);

    // An off-cadence terminal row is not part of the checkpointed trace, so
    // a resumed run reproduces the unsplit trace exactly.
    if (stop && !on_cadence && observer) observer->on_checkpoint(state);

    if ((on_cadence || stop) && fresh) {
      state.trace.push_back(row);
      state.last_recorded_step = static_cast<std::int64_t>(state.steps);
      if (observer) observer->on_row(row);
      if (gradient < best) {
        best = gradient;
        result.minima.push_back({row.t, gradient});
      }
    }

    if (stop) {
      if (on_cadence && observer) observer->on_checkpoint(state);
      result.status = converged ? RunStatus::converged : RunStatus::reached_t_max;
      break;
    }
    if (observer && control.checkpoint_cadence > 0 && state.steps > 0 &&
        state.steps % control.checkpoint_cadence == 0) {
      observer->on_checkpoint(state);
    }
    advance_in_place(state, sweep, spare, next);
    std::swap(sweep, next);
  }
  result.state = std::move(state);
  return result;
}

Concentration concentration_monitor(const MapField& u, const LatticeParams& lattice,
                                    double radius, std::size_t stride) {
  if (!(radius > 0.0)) throw DomainError("concentration radius must be positive");
  if (stride == 0) stride = 1;
  const GridShape& g = u.shape();
  const std::vector<double> density = energy_density(u, lattice);

  // Bounding box of the g-disc in (x, y): |dx| <= r sqrt(g^11), |dy| <= r sqrt(g^22).
  const double rx = radius * std::sqrt(lattice.cxx());
  const double ry = radius * std::sqrt(lattice.cyy());
  const auto half_cols = static_cast<long>((g.cols - 1) / 2);
  const auto half_rows = static_cast<long>((g.rows - 1) / 2);
  const long mj = std::min(half_cols, static_cast<long>(std::floor(rx / g.hx())));
  const long mi = std::min(half_rows, static_cast<long>(std::floor(ry / g.hy())));

  struct Offset {
    long di;
    long dj;
  };
  std::vector<Offset> offsets;
  const double r2 = radius * radius;
  for (long di = -mi; di <= mi; ++di) {
    for (long dj = -mj; dj <= mj; ++dj) {
      const double dx = static_cast<double>(dj) * g.hx();
      const double dy = static_cast<double>(di) * g.hy();
      const double len2 = lattice.g11() * dx * dx + 2.0 * lattice.g12() * dx * dy +
                          lattice.g22() * dy * dy;
      if (len2 < r2) offsets.push_back({di, dj});
    }
  }

  const auto rows = static_cast<long>(g.rows);
  const auto cols = static_cast<long>(g.cols);
  Concentration best;
  best.energy = -1.0;
  for (std::size_t i = 0; i < g.rows; i += stride) {
    for (std::size_t j = 0; j < g.cols; j += stride) {
      double sum = 0.0;
      for (const auto& o : offsets) {
        const long ii = ((static_cast<long>(i) + o.di) % rows + rows) % rows;
        const long jj = ((static_cast<long>(j) + o.dj) % cols + cols) % cols;
        sum += density[static_cast<std::size_t>(ii * cols + jj)];
      }
      sum *= g.cell_area();
      if (sum > best.energy) best = {sum, i, j};
    }
  }
  return best;
}

}  // namespace hmflow
