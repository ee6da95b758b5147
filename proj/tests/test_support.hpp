#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "hmflow/fields.hpp"
#include "hmflow/flow_engine.hpp"
#include "hmflow/lattice.hpp"
#include "hmflow/map_generators.hpp"

namespace hmflow::testing {

inline constexpr double kPi = std::numbers::pi;

/// Length of the centered difference of t -> (cos 2pi k t, sin 2pi k t)/(2pi)
/// with spacing h: sin(2 pi k h) / (2 pi h).
inline double discrete_speed(int k, double h) {
  return std::sin(2.0 * kPi * k * h) / (2.0 * kPi * h);
}

/// Discrete gradient moments of the degree-(p, q) covering on an n x n grid.
inline GradientMoments covering_moments(int p, int q, std::size_t n) {
  const double h = 1.0 / static_cast<double>(n);
  const double sx = discrete_speed(p, h);
  const double sy = discrete_speed(q, h);
  return {sx * sx, sy * sy, 0.0};
}

inline FlowState covering_state(std::size_t n, int p, int q, double a, double b,
                                 double eta2 = 2.0) {
  return make_state(covering_map({n, n}, p, q), LatticeParams::from_ab(a, b), eta2);
}

}  // namespace hmflow::testing
