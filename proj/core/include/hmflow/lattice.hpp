#pragma once

namespace hmflow {

/// Smallest b accepted by the flow before it aborts.
inline constexpr double kLatticeFloor = 1e-6;

/// Unit-area flat conformal structure on the square torus [0,1)^2.
///
/// The metric is the pullback of dx^2 + dy^2 under (x, y) -> (x/beta + alpha y,
/// beta y), i.e. the lattice spanned by (1/beta, 0) and (alpha, beta). The
/// equivalent parameterisation (a, b) = (alpha beta, beta^2) describes the
/// same torus rescaled to the lattice spanned by (1, 0) and (a, b).
class LatticeParams {
 public:
  /// Square lattice alpha = 0, beta = 1.
  LatticeParams() = default;

  /// Throws DomainError unless beta > 0.
  static LatticeParams from_alpha_beta(double alpha, double beta);
  /// Throws DomainError unless b > 0.
  static LatticeParams from_ab(double a, double b);
  /// Rebuilds a lattice from all four stored coordinates without rounding,
  /// for checkpoint restore. Throws DomainError unless beta, b > 0.
  static LatticeParams from_stored(double alpha, double beta, double a, double b);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  // Metric coefficients g_ij on the unit square; det g = 1.
  double g11() const noexcept { return 1.0 / (beta_ * beta_); }
  double g12() const noexcept { return alpha_ / beta_; }
  double g22() const noexcept { return alpha_ * alpha_ + beta_ * beta_; }

  // Laplace-Beltrami coefficients:
  // Delta_g = cxx d_xx + cxy d_xy + cyy d_yy.
  double cxx() const noexcept { return alpha_ * alpha_ + beta_ * beta_; }
  double cxy() const noexcept { return -2.0 * alpha_ / beta_; }
  double cyy() const noexcept { return 1.0 / (beta_ * beta_); }

  /// (alpha^2 + beta^2) + 1/beta^2, used by the explicit stability bound.
  double max_coefficient() const noexcept { return cxx() + cyy(); }

  friend bool operator==(const LatticeParams&, const LatticeParams&) = default;

 private:
  LatticeParams(double alpha, double beta, double a, double b)
      : alpha_(alpha), beta_(beta), a_(a), b_(b) {}

  double alpha_ = 0.0;
  double beta_ = 1.0;
  double a_ = 0.0;
  double b_ = 1.0;
};

}  // namespace hmflow
