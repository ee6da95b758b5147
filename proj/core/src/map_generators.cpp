#include "hmflow/map_generators.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "hmflow/error.hpp"
#include "hmflow/numerics.hpp"

namespace hmflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Random real trigonometric polynomial with modes |m1|, |m2| <= max_mode,
/// coefficients scaled so the sup norm is at most one.
class TrigField {
 public:
  TrigField(std::mt19937_64& rng, int max_mode) {
    double total = 0.0;
    for (int m1 = -max_mode; m1 <= max_mode; ++m1) {
      for (int m2 = 0; m2 <= max_mode; ++m2) {
        if (m2 == 0 && m1 <= 0) continue;
        const double decay = 1.0 / (1.0 + m1 * m1 + m2 * m2);
        const double amp = uniform(rng, -1.0, 1.0) * decay;
        const double phase = uniform(rng, 0.0, kTwoPi);
        terms_.push_back({m1, m2, amp, phase});
        total += std::abs(amp);
      }
    }
    if (total > 0.0) {
      for (auto& t : terms_) t.amp /= total;
    }
  }

  double operator()(double x, double y) const {
    double v = 0.0;
    for (const auto& t : terms_) {
      v += t.amp * std::cos(kTwoPi * (t.m1 * x + t.m2 * y) + t.phase);
    }
    return v;
  }

 private:
  struct Term {
    int m1;
    int m2;
    double amp;
    double phase;
  };
  std::vector<Term> terms_;
};

void torus_point(double theta1, double theta2, std::span<double> out) {
  constexpr double r = TargetManifold::kCircleRadius;
  out[0] = r * std::cos(theta1);
  out[1] = r * std::sin(theta1);
  out[2] = r * std::cos(theta2);
  out[3] = r * std::sin(theta2);
}

void latlong_point(double x, double y, int p, int q, std::span<double> out) {
  const double lon = kTwoPi * p * x;
  const double colat = 0.5 * std::numbers::pi * (1.0 - std::cos(kTwoPi * q * y));
  std::fill(out.begin(), out.end(), 0.0);
  out[0] = std::sin(colat) * std::cos(lon);
  out[1] = std::sin(colat) * std::sin(lon);
  out[2] = std::cos(colat);
}

}  // namespace

MapField sample_map(GridShape shape, std::size_t dim,
                    const std::function<void(double, double, std::span<double>)>& f) {
  MapField u(shape, dim);
  for (std::size_t i = 0; i < shape.rows; ++i) {
    for (std::size_t j = 0; j < shape.cols; ++j) {
      f(shape.x(j), shape.y(i), u.at(i, j));
    }
  }
  return u;
}

MapField covering_map(GridShape shape, int p, int q) {
  return sample_map(shape, 4, [p, q](double x, double y, std::span<double> out) {
    torus_point(kTwoPi * p * x, kTwoPi * q * y, out);
  });
}

MapField latlong_map(GridShape shape, std::size_t ambient_dim, int p, int q) {
  if (ambient_dim < 3) {
    throw DomainError("latitude-longitude map needs a sphere in R^K with K >= 3");
  }
  return sample_map(shape, ambient_dim,
                    [p, q](double x, double y, std::span<double> out) {
                      latlong_point(x, y, p, q, out);
                    });
}

MapField constant_map(GridShape shape, const TargetManifold& target) {
  const std::vector<double> base = target.base_point();
  return sample_map(shape, target.ambient_dim(),
                    [&base](double, double, std::span<double> out) {
                      std::copy(base.begin(), base.end(), out.begin());
                    });
}

void project_onto(MapField& u, const TargetManifold& target) {
  const GridShape& g = u.shape();
  for (std::size_t i = 0; i < g.rows; ++i) {
    for (std::size_t j = 0; j < g.cols; ++j) {
      auto node = u.at(i, j);
      if (!target.try_project_point(node.data(), node.data())) {
        throw ProjectionError("projection undefined at grid node (" +
                                  std::to_string(i) + ", " + std::to_string(j) +
                                  "): point left the tubular neighbourhood of " +
                                  target.name(),
                              ProjectionError::GridIndex{i, j});
      }
    }
  }
}

MapField perturb_map(const MapField& u, const TargetManifold& target,
                     double amplitude, std::uint64_t seed, int max_mode) {
  MapField out = u;
  if (amplitude == 0.0) return out;
  auto rng = make_rng(seed, 0);
  std::vector<TrigField> fields;
  for (std::size_t k = 0; k < u.dim(); ++k) fields.emplace_back(rng, max_mode);
  const GridShape& g = u.shape();
  for (std::size_t i = 0; i < g.rows; ++i) {
    for (std::size_t j = 0; j < g.cols; ++j) {
      auto node = out.at(i, j);
      for (std::size_t k = 0; k < u.dim(); ++k) {
        node[k] += amplitude * fields[k](g.x(j), g.y(i));
      }
    }
  }
  project_onto(out, target);
  return out;
}

MapField random_smooth_map(const TargetManifold& target, GridShape shape,
                           std::uint64_t seed, std::uint64_t index) {
  auto rng = make_rng(seed, index);
  const int p = 1 + static_cast<int>(rng() % 2);
  const int q = 1 + static_cast<int>(rng() % 2);
  if (target.kind() == TargetKind::flat_torus) {
    const TrigField f1(rng, 2);
    const TrigField f2(rng, 2);
    const double amp = uniform(rng, 0.2, 0.8);
    return sample_map(shape, 4, [&](double x, double y, std::span<double> out) {
      torus_point(kTwoPi * p * x + amp * f1(x, y),
                  kTwoPi * q * y + amp * f2(x, y), out);
    });
  }
  std::vector<TrigField> fields;
  for (std::size_t k = 0; k < target.ambient_dim(); ++k) {
    fields.emplace_back(rng, 2);
  }
  // Ambient norm of the perturbation stays below 0.45, inside the 0.5 tube.
  const double amp = uniform(rng, 0.2, 0.45) /
                     std::sqrt(static_cast<double>(target.ambient_dim()));
  MapField u = sample_map(
      shape, target.ambient_dim(), [&](double x, double y, std::span<double> out) {
        if (target.ambient_dim() >= 3) {
          latlong_point(x, y, p, q, out);
        } else {
          out[0] = std::cos(kTwoPi * p * x);
          out[1] = std::sin(kTwoPi * p * x);
        }
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += amp * fields[k](x, y);
      });
  project_onto(u, target);
  return u;
}

}  // namespace hmflow
