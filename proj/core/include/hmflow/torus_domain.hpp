#pragma once

#include <complex>
#include <span>
#include <vector>

#include "hmflow/fields.hpp"
#include "hmflow/lattice.hpp"
#include "hmflow/target_manifold.hpp"

namespace hmflow {

// Discrete geometry of the genus-one domain. All derivatives are centered
// second-order differences with periodic wrap, all integrals are the
// trapezoidal rule (dmu_g = dx dy because det g = 1), reduced with
// pairwise_sum.

/// Pointwise norm of dz^2 in isothermal coordinates (rho = 1).
inline constexpr double kDz2Norm = 2.0;

/// Integral over the unit square of a nodal scalar.
double integrate(std::span<const double> nodal, const GridShape& shape);

/// Centered first differences along x and y.
VectorField derivative_x(const VectorField& u);
VectorField derivative_y(const VectorField& u);

/// Derivatives in the isothermal frame of L:
/// u_X = beta u_x, u_Y = -alpha u_x + u_y / beta.
struct IsothermalDerivatives {
  VectorField u_X;
  VectorField u_Y;
};
IsothermalDerivatives isothermal_derivatives(const MapField& u,
                                             const LatticeParams& lattice);

/// The three discrete Dirichlet moments of u on the square torus. Energy,
/// the mean Hopf coefficient and both lattice velocities are all linear in
/// these, so computing them once keeps those quantities mutually consistent.
struct GradientMoments {
  double xx = 0.0;  ///< integral of |u_x|^2
  double yy = 0.0;  ///< integral of |u_y|^2
  double xy = 0.0;  ///< integral of <u_x, u_y>
};
GradientMoments gradient_moments(const MapField& u);

/// E(u, g) = 1/2 integral |du|_g^2.
double energy(const GradientMoments& m, const LatticeParams& lattice);
double energy(const MapField& u, const LatticeParams& lattice);

/// Nodal energy density 1/2 |du|_g^2.
std::vector<double> energy_density(const MapField& u, const LatticeParams& lattice);

/// Delta_g = (alpha^2+beta^2) d_xx - (2 alpha/beta) d_xy + (1/beta^2) d_yy,
/// compact second differences for d_xx, d_yy and composed centered first
/// differences for d_xy. Works componentwise for any dimension.
VectorField laplace_beltrami(const VectorField& u, const LatticeParams& lattice);

/// tau_g(u) = Pi_{T_u N}(Delta_g u).
VectorField tension(const MapField& u, const LatticeParams& lattice,
                    const TargetManifold& target);

/// Tension together with the by-products the flow needs from the same
/// stencil sweep.
struct TensionSweep {
  VectorField tension;
  double tension_l2 = 0.0;   ///< ||tau||_{L^2}
  double max_density = 0.0;  ///< max nodal 1/2 |du|_g^2
  GradientMoments moments;   ///< identical to gradient_moments(u)
  /// Per-node integrands, kept so repeated sweeps reuse the storage.
  std::vector<double> scratch;
};
TensionSweep tension_sweep(const MapField& u, const LatticeParams& lattice,
                           const TargetManifold& target);

/// As tension_sweep, reusing the buffers already held by `out`.
void tension_sweep_into(const MapField& u, const LatticeParams& lattice,
                        const TargetManifold& target, TensionSweep& out);

/// phi = |u_X|^2 - |u_Y|^2 - 2i <u_X, u_Y>.
QuadDiffField hopf_differential(const MapField& u, const LatticeParams& lattice);

/// The mean Hopf coefficient, i.e. P_g(Phi), computed from moments.
std::complex<double> hopf_mean(const GradientMoments& m,
                               const LatticeParams& lattice);

/// L^2-orthogonal projection onto holomorphic (constant) quadratic
/// differentials: the area-weighted mean of the coefficient.
std::complex<double> project_holomorphic(const QuadDiffField& phi);

/// psi_zbar = 1/2 (psi_X + i psi_Y) in the isothermal frame of the lattice.
QuadDiffField dbar(const QuadDiffField& psi,
                   const LatticeParams& lattice = LatticeParams{});

/// Norms of the tensor phi dz^2 with |dz^2| = 2.
struct QdNorms {
  double l1 = 0.0;     ///< ||Phi||_{L^1}
  double l2 = 0.0;     ///< ||Phi||_{L^2}
  double re_l2 = 0.0;  ///< ||Re Phi||_{L^2}, Re Phi as a symmetric 2-tensor
};
QdNorms qd_norms(const QuadDiffField& phi);

/// L^2 norm of the constant differential c dz^2.
inline double constant_qd_l2(std::complex<double> c) {
  return kDz2Norm * std::abs(c);
}

/// integral |psi| dmu of the coefficient alone.
double coefficient_l1(const QuadDiffField& psi);

/// theta with d/ds g(s) = Re(theta dz^2) for the lattice path
/// (alpha + s alpha_dot, beta + s beta_dot).
std::complex<double> metric_variation(const LatticeParams& lattice,
                                      double alpha_dot, double beta_dot);

/// sqrt(integral |v|^2) and integral <v, w> for vector fields.
double l2_norm(const VectorField& v);
double l2_inner(const VectorField& v, const VectorField& w);

}  // namespace hmflow
