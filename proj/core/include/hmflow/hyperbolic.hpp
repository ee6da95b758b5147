#pragma once

namespace hmflow::hyperbolic {

/// Standard collar around a closed geodesic of length ell on a hyperbolic
/// surface: the cylinder [-X, X] x S^1 with metric rho(x)^2 (dx^2 + dtheta^2).
struct CollarGeometry {
  double ell = 0.0;
  double half_width = 0.0;  ///< X(ell)
  double width = 0.0;       ///< intrinsic distance w between the collar ends

  static CollarGeometry of(double ell);
};

/// X(ell) = (2 pi / ell)(pi/2 - arctan(sinh(ell/2))). DomainError for ell <= 0.
double collar_halfwidth(double ell);

/// rho(x) = ell / (2 pi cos(ell x / 2 pi)). DomainError for |x| > X(ell).
double collar_density(double x, double ell);

/// w = 2 arcsinh(1 / sinh(ell/2)), i.e. sinh(ell/2) sinh(w/2) = 1.
double collar_width(double ell);

/// phi(ell)/ell with phi(ell) = c^2 (pi/2 - arctan(sinh(ell/2))): the lower
/// bound on the energy of an incompressible map when the domain systole is
/// ell and the target systole is c. Equals (c^2 / 2 pi) X(ell).
double incompressible_energy_bound(double ell, double c);

/// integral_{-X}^{X} rho(x) dx by adaptive Gauss-Kronrod quadrature. Used to
/// cross-check collar_width.
double collar_density_integral(double ell);

}  // namespace hmflow::hyperbolic
