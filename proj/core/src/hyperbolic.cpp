#include "hmflow/hyperbolic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "hmflow/error.hpp"

namespace hmflow::hyperbolic {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_length(double ell) {
  if (!(ell > 0.0) || !std::isfinite(ell)) {
    throw DomainError("geodesic length must be positive and finite, got " +
                      std::to_string(ell));
  }
}

// pi/2 - arctan(s) == arctan(1/s) for s > 0; the atan2 form keeps full
// relative accuracy when s is large.
double complementary_angle(double ell) {
  return std::atan2(1.0, std::sinh(0.5 * ell));
}

}  // namespace

double collar_halfwidth(double ell) {
  require_positive_length(ell);
  return 2.0 * kPi / ell * complementary_angle(ell);
}

double collar_density(double x, double ell) {
  const double X = collar_halfwidth(ell);
  if (!(std::abs(x) <= X)) {
    throw DomainError("collar coordinate " + std::to_string(x) +
                      " outside [-X, X] with X = " + std::to_string(X));
  }
  return ell / (2.0 * kPi * std::cos(ell * x / (2.0 * kPi)));
}

double collar_width(double ell) {
  require_positive_length(ell);
  return 2.0 * std::asinh(1.0 / std::sinh(0.5 * ell));
}

double incompressible_energy_bound(double ell, double c) {
  require_positive_length(ell);
  if (!(c >= 0.0)) {
    throw DomainError("target systole must be non-negative");
  }
  return c * c * complementary_angle(ell) / ell;
}

double collar_density_integral(double ell) {
  const double X = collar_halfwidth(ell);
  auto rho = [ell](double x) {
    return ell / (2.0 * kPi * std::cos(ell * x / (2.0 * kPi)));
  };
  // rho is even and steepest at the ends; integrate [0, X] and double.
  double error = 0.0;
  const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      rho, 0.0, X, 30, 1e-14, &error);
  return 2.0 * half;
}

CollarGeometry CollarGeometry::of(double ell) {
  return {ell, collar_halfwidth(ell), collar_width(ell)};
}

}  // namespace hmflow::hyperbolic
