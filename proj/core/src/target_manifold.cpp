#include "hmflow/target_manifold.hpp"

#include <charconv>

#include "hmflow/error.hpp"

namespace hmflow {

TargetManifold TargetManifold::sphere(std::size_t ambient_dim) {
  if (ambient_dim < 2 || ambient_dim > kMaxAmbientDim) {
    throw DomainError("sphere target needs ambient dimension in [2, 16], got " +
                      std::to_string(ambient_dim));
  }
  return {TargetKind::sphere, ambient_dim};
}

TargetManifold TargetManifold::flat_torus() {
  return {TargetKind::flat_torus, 4};
}

TargetManifold TargetManifold::from_name(std::string_view name) {
  if (name == "flat-torus") return flat_torus();
  constexpr std::string_view prefix = "sphere:";
  if (name.starts_with(prefix)) {
    const std::string_view digits = name.substr(prefix.size());
    std::size_t k = 0;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() &&
        !digits.empty()) {
      return sphere(k);
    }
  }
  throw DomainError("unknown target '" + std::string(name) +
                    "' (expected 'sphere:K' or 'flat-torus')");
}

std::string TargetManifold::name() const {
  if (kind_ == TargetKind::flat_torus) return "flat-torus";
  return "sphere:" + std::to_string(dim_);
}

double TargetManifold::tubular_radius() const noexcept {
  return kind_ == TargetKind::sphere ? kSphereTube : kTorusTube;
}

namespace {

void check_dim(std::span<const double> p, std::size_t dim) {
  if (p.size() != dim) {
    throw ContractViolation("expected a vector in R^" + std::to_string(dim) +
                            ", got length " + std::to_string(p.size()));
  }
}

}  // namespace

double TargetManifold::distance(std::span<const double> p) const {
  check_dim(p, dim_);
  if (kind_ == TargetKind::sphere) {
    double r2 = 0.0;
    for (double x : p) r2 += x * x;
    return std::abs(std::sqrt(r2) - 1.0);
  }
  const double d1 = std::hypot(p[0], p[1]) - kCircleRadius;
  const double d2 = std::hypot(p[2], p[3]) - kCircleRadius;
  return std::hypot(d1, d2);
}

std::vector<double> TargetManifold::project_point(
    std::span<const double> p) const {
  check_dim(p, dim_);
  std::vector<double> out(dim_);
  if (!try_project_point(p.data(), out.data())) {
    throw ProjectionError("projection undefined: point is outside the "
                          "tubular neighbourhood of " + name());
  }
  return out;
}

std::vector<double> TargetManifold::project_tangent(
    std::span<const double> p, std::span<const double> v) const {
  check_dim(p, dim_);
  check_dim(v, dim_);
  if (distance(p) > kOnManifoldTolerance) {
    throw ContractViolation("tangent projection at a point off " + name());
  }
  std::vector<double> out(dim_);
  project_tangent_unchecked(p.data(), v.data(), out.data());
  return out;
}

std::vector<std::vector<double>> TargetManifold::normal_basis(
    std::span<const double> p) const {
  check_dim(p, dim_);
  if (distance(p) > kOnManifoldTolerance) {
    throw ContractViolation("normal space requested at a point off " + name());
  }
  std::vector<std::vector<double>> basis;
  if (kind_ == TargetKind::sphere) {
    double r2 = 0.0;
    for (double x : p) r2 += x * x;
    const double r = std::sqrt(r2);
    std::vector<double> n(p.begin(), p.end());
    for (double& x : n) x /= r;
    basis.push_back(std::move(n));
    return basis;
  }
  for (std::size_t c = 0; c < 4; c += 2) {
    const double r = std::hypot(p[c], p[c + 1]);
    std::vector<double> n(4, 0.0);
    n[c] = p[c] / r;
    n[c + 1] = p[c + 1] / r;
    basis.push_back(std::move(n));
  }
  return basis;
}

std::vector<double> TargetManifold::base_point() const {
  std::vector<double> p(dim_, 0.0);
  if (kind_ == TargetKind::sphere) {
    p[dim_ - 1] = 1.0;
  } else {
    p[0] = kCircleRadius;
    p[2] = kCircleRadius;
  }
  return p;
}

}  // namespace hmflow
