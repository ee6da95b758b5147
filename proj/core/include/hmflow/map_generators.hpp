#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "hmflow/fields.hpp"
#include "hmflow/target_manifold.hpp"

namespace hmflow {

/// Samples f(x, y, out) at every node; out has `dim` entries.
MapField sample_map(GridShape shape, std::size_t dim,
                    const std::function<void(double, double, std::span<double>)>& f);

/// Affine covering of degree (p, q) onto the flat torus target:
/// (x, y) -> (cos 2pi p x, sin 2pi p x, cos 2pi q y, sin 2pi q y) / (2 pi).
MapField covering_map(GridShape shape, int p, int q);

/// Longitude-latitude map onto S^{K-1} (first three coordinates):
/// longitude 2 pi p x, colatitude pi (1 - cos 2 pi q y) / 2.
MapField latlong_map(GridShape shape, std::size_t ambient_dim, int p, int q);

MapField constant_map(GridShape shape, const TargetManifold& target);

/// Adds a seeded smooth trigonometric field of sup norm <= amplitude to
/// every component, then projects back onto the target. Throws
/// ProjectionError if the perturbation leaves the tubular neighbourhood.
MapField perturb_map(const MapField& u, const TargetManifold& target,
                     double amplitude, std::uint64_t seed, int max_mode = 2);

/// Smooth non-harmonic test map for trial `index`: a covering (torus) or
/// latitude-longitude map (sphere) with seeded random degrees, lifted
/// through a seeded smooth perturbation.
MapField random_smooth_map(const TargetManifold& target, GridShape shape,
                           std::uint64_t seed, std::uint64_t index);

/// Projects every node onto the target; errors name the offending node.
void project_onto(MapField& u, const TargetManifold& target);

}  // namespace hmflow
