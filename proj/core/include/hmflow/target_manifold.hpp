#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hmflow {

enum class TargetKind { sphere, flat_torus };

/// A compact target manifold isometrically embedded in R^K.
///
/// Two targets are built in: the unit sphere S^{K-1} in R^K, and the flat
/// square torus realised in R^4 as the product of two circles of radius
/// 1/(2 pi), so that (x, y) -> (cos 2pi x, sin 2pi x, cos 2pi y, sin 2pi y)/(2pi)
/// is an isometry from the unit square torus.
///
/// Everything here is a pure function of its arguments.
class TargetManifold {
 public:
  static constexpr double kCircleRadius = 1.0 / (2.0 * std::numbers::pi);
  static constexpr double kOnManifoldTolerance = 1e-8;
  static constexpr std::size_t kMaxAmbientDim = 16;

  static TargetManifold sphere(std::size_t ambient_dim);
  static TargetManifold flat_torus();
  /// "sphere:K" or "flat-torus".
  static TargetManifold from_name(std::string_view name);

  TargetKind kind() const noexcept { return kind_; }
  std::size_t ambient_dim() const noexcept { return dim_; }
  std::string name() const;

  /// Half-width of the tubular neighbourhood on which closest-point
  /// projection is accepted: 0.5 for the sphere, 0.4/(2 pi) per circle for
  /// the torus.
  double tubular_radius() const noexcept;

  /// Euclidean distance from p to the manifold.
  double distance(std::span<const double> p) const;

  /// Nearest point of N. Throws ProjectionError outside the tubular
  /// neighbourhood.
  std::vector<double> project_point(std::span<const double> p) const;

  /// Orthogonal projection of v onto T_pN. Throws ContractViolation if p is
  /// further than kOnManifoldTolerance from N.
  std::vector<double> project_tangent(std::span<const double> p,
                                      std::span<const double> v) const;

  /// Orthonormal basis of the normal space at an on-manifold point.
  std::vector<std::vector<double>> normal_basis(std::span<const double> p) const;

  /// A fixed point of N, used for constant maps.
  std::vector<double> base_point() const;

  // Unchecked pointwise kernels for grid loops. Pointers address
  // ambient_dim() doubles.

  /// Writes the nearest point into out; returns false outside the tubular
  /// neighbourhood (out is then unspecified). out may alias p.
  bool try_project_point(const double* p, double* out) const noexcept {
    if (kind_ == TargetKind::sphere) {
      double r2 = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) r2 += p[k] * p[k];
      const double r = std::sqrt(r2);
      if (!(std::abs(r - 1.0) < kSphereTube)) return false;
      const double inv = 1.0 / r;
      for (std::size_t k = 0; k < dim_; ++k) out[k] = p[k] * inv;
      return true;
    }
    for (std::size_t c = 0; c < 4; c += 2) {
      const double r = std::sqrt(p[c] * p[c] + p[c + 1] * p[c + 1]);
      if (!(std::abs(r - kCircleRadius) < kTorusTube)) return false;
      const double s = kCircleRadius / r;
      out[c] = p[c] * s;
      out[c + 1] = p[c + 1] * s;
    }
    return true;
  }

  /// Removes the normal component of v at the on-manifold point p.
  void project_tangent_unchecked(const double* p, const double* v,
                                 double* out) const noexcept {
    if (kind_ == TargetKind::sphere) {
      double pv = 0.0;
      double pp = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) {
        pv += p[k] * v[k];
        pp += p[k] * p[k];
      }
      const double s = pv / pp;
      for (std::size_t k = 0; k < dim_; ++k) out[k] = v[k] - s * p[k];
      return;
    }
    for (std::size_t c = 0; c < 4; c += 2) {
      const double pv = p[c] * v[c] + p[c + 1] * v[c + 1];
      const double pp = p[c] * p[c] + p[c + 1] * p[c + 1];
      const double s = pv / pp;
      out[c] = v[c] - s * p[c];
      out[c + 1] = v[c + 1] - s * p[c + 1];
    }
  }

  friend bool operator==(const TargetManifold&, const TargetManifold&) = default;

 private:
  static constexpr double kSphereTube = 0.5;
  static constexpr double kTorusTube = 0.4 * kCircleRadius;

  TargetManifold(TargetKind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  TargetKind kind_;
  std::size_t dim_;
};

}  // namespace hmflow
