#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "hmflow/fields.hpp"
#include "hmflow/flow_engine.hpp"

namespace hmflow {

/// Flat `key = value` run description. `#` starts a comment; blank lines are
/// ignored. Keys, ranges and defaults:
///
///   target               required  "sphere:K" (3 <= K <= 16 for latlong) or "flat-torus"
///   grid_rows            required  integer in [4, 4096]
///   grid_cols            required  integer in [4, 4096]
///   initial_map          required  covering | latlong | constant
///   degree_p, degree_q   1         integers in [-64, 64]
///   perturbation         0         amplitude in [0, 1)
///   seed                 1         unsigned 64-bit integer
///   lattice_a            0         finite
///   lattice_b            1         > 1e-6
///   eta2                 2         >= 0
///   dt_policy            cfl       cfl | fixed
///   cfl_fraction         1         in (0, 1000]
///   dt                   -         > 0, required when dt_policy = fixed
///   t_max                10        >= 0
///   tol_converge         1e-6      >= 0
///   trace_cadence        100       integer >= 1
///   checkpoint_cadence   0         integer >= 0 (0: only at the end)
///   output_dir           hmflow_out
///   lattice_coordinates  ab        ab | alpha_beta
///   guard_tolerance      1e-6      >= 0
struct RunConfig {
  std::string target;
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  std::string initial_map;
  int degree_p = 1;
  int degree_q = 1;
  double perturbation = 0.0;
  std::uint64_t seed = 1;
  double lattice_a = 0.0;
  double lattice_b = 1.0;
  double eta2 = 2.0;
  DtPolicy dt_policy = DtPolicy::cfl;
  double cfl_fraction = 1.0;
  double dt = 0.0;
  double t_max = 10.0;
  double tol_converge = 1e-6;
  std::uint64_t trace_cadence = 100;
  std::uint64_t checkpoint_cadence = 0;
  std::string output_dir = "hmflow_out";
  LatticeCoordinates lattice_coordinates = LatticeCoordinates::ab;
  double guard_tolerance = 1e-6;

  GridShape grid() const noexcept { return {grid_rows, grid_cols}; }
};

/// Parses and validates. Throws ConfigError listing every problem found:
/// syntax errors, unknown or duplicate keys, missing required keys,
/// unparsable and out-of-range values.
RunConfig parse_config(std::string_view text);

/// Canonical text of a config; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& config);

bool operator==(const RunConfig& l, const RunConfig& r);

FlowSettings flow_settings(const RunConfig& config);
RunControl run_control(const RunConfig& config);

/// Initial map described by the config (generator, degrees, perturbation).
MapField initial_map(const RunConfig& config);

/// make_state for the config's initial map, lattice and eta2.
FlowState initial_state(const RunConfig& config);

}  // namespace hmflow
