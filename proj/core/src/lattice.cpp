#include "hmflow/lattice.hpp"

#include <cmath>
#include <string>

#include "hmflow/error.hpp"

namespace hmflow {

LatticeParams LatticeParams::from_alpha_beta(double alpha, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta) || !std::isfinite(alpha)) {
    throw DomainError("lattice requires finite alpha and beta > 0, got beta = " +
                      std::to_string(beta));
  }
  return {alpha, beta, alpha * beta, beta * beta};
}

LatticeParams LatticeParams::from_ab(double a, double b) {
  if (!(b > 0.0) || !std::isfinite(b) || !std::isfinite(a)) {
    throw DomainError("lattice requires finite a and b > 0, got b = " +
                      std::to_string(b));
  }
  const double beta = std::sqrt(b);
  return {a / beta, beta, a, b};
}

LatticeParams LatticeParams::from_stored(double alpha, double beta, double a,
                                         double b) {
  if (!(beta > 0.0) || !(b > 0.0)) {
    throw DomainError("stored lattice has non-positive beta or b");
  }
  return {alpha, beta, a, b};
}

}  // namespace hmflow
