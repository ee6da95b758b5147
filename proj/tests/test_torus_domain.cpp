#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "hmflow/map_generators.hpp"
#include "hmflow/numerics.hpp"
#include "hmflow/torus_domain.hpp"
#include "test_support.hpp"

namespace hmflow {
namespace {

using testing::covering_moments;
using testing::discrete_speed;
using testing::kPi;
using cd = std::complex<double>;

const auto kTorus = TargetManifold::flat_torus();

VectorField scalar_field(GridShape g, double (*f)(double, double)) {
  VectorField v(g, 1);
  for (std::size_t i = 0; i < g.rows; ++i)
    for (std::size_t j = 0; j < g.cols; ++j) v.at(i, j)[0] = f(g.x(j), g.y(i));
  return v;
}

QuadDiffField qd_field(GridShape g, cd (*f)(double, double)) {
  QuadDiffField q(g);
  for (std::size_t i = 0; i < g.rows; ++i)
    for (std::size_t j = 0; j < g.cols; ++j) q.at(i, j) = f(g.x(j), g.y(i));
  return q;
}

QuadDiffField random_qd(GridShape g, std::uint64_t seed) {
  auto rng = make_rng(seed);
  QuadDiffField q(g);
  for (auto& v : q.data()) v = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
  return q;
}

TEST(Integrate, TrapezoidExactOnTrigPolynomials) {
  const GridShape g{32, 48};
  const auto f = scalar_field(g, [](double x, double y) {
    return 2.5 + std::cos(2 * kPi * 3 * x) * std::sin(2 * kPi * 5 * y);
  });
  EXPECT_NEAR(integrate(f.data(), g), 2.5, 1e-14);
}

TEST(IsothermalDerivatives, IdentityLattice) {
  const auto u = random_smooth_map(kTorus, {32, 32}, 1, 0);
  const auto iso = isothermal_derivatives(u, LatticeParams{});
  EXPECT_EQ(iso.u_X, derivative_x(u));
  EXPECT_EQ(iso.u_Y, derivative_y(u));
}

TEST(IsothermalDerivatives, DegreeTwoOneCovering) {
  const std::size_t n = 64;
  const double h = 1.0 / n;
  const auto u = covering_map({n, n}, 2, 1);
  const auto iso = isothermal_derivatives(u, LatticeParams{});
  const double sx = discrete_speed(2, h);
  const double sy = discrete_speed(1, h);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double xx = 0, yy = 0;
      for (int k = 0; k < 4; ++k) {
        xx += iso.u_X.at(i, j)[k] * iso.u_X.at(i, j)[k];
        yy += iso.u_Y.at(i, j)[k] * iso.u_Y.at(i, j)[k];
      }
      ASSERT_NEAR(xx, sx * sx, 1e-12);
      ASSERT_NEAR(yy, sy * sy, 1e-12);
      // Continuum values 4 and 1 up to O(h^2).
      ASSERT_NEAR(xx, 4.0, 4.0 * 2 * std::pow(2 * kPi * 2 * h, 2) / 6);
      ASSERT_NEAR(yy, 1.0, 2 * std::pow(2 * kPi * h, 2) / 6);
    }
  }
}

TEST(IsothermalDerivatives, ShearWithNoXDependence) {
  const auto u = covering_map({16, 16}, 0, 1);
  const auto iso = isothermal_derivatives(u, LatticeParams::from_alpha_beta(1, 1));
  const auto uy = derivative_y(u);
  for (std::size_t n = 0; n < iso.u_X.data().size(); ++n) {
    EXPECT_NEAR(iso.u_X.data()[n], 0.0, 1e-15);
    EXPECT_NEAR(iso.u_Y.data()[n], uy.data()[n], 1e-15);
  }
}

TEST(IsothermalDerivatives, GeneralLatticeFormula) {
  const auto u = random_smooth_map(kTorus, {16, 24}, 3, 1);
  const auto l = LatticeParams::from_alpha_beta(0.7, 1.3);
  const auto iso = isothermal_derivatives(u, l);
  const auto ux = derivative_x(u);
  const auto uy = derivative_y(u);
  for (std::size_t n = 0; n < ux.data().size(); ++n) {
    EXPECT_NEAR(iso.u_X.data()[n], 1.3 * ux.data()[n], 1e-12);
    EXPECT_NEAR(iso.u_Y.data()[n], -0.7 * ux.data()[n] + uy.data()[n] / 1.3, 1e-12);
  }
}

TEST(Energy, CoveringClosedForms) {
  const std::size_t n = 128;
  EXPECT_NEAR(energy(covering_map({n, n}, 1, 1), LatticeParams{}), 1.0, 1e-3);
  EXPECT_NEAR(energy(covering_map({n, n}, 2, 1), LatticeParams{}), 2.5, 1e-2);
  EXPECT_EQ(energy(constant_map({n, n}, kTorus), LatticeParams{}), 0.0);

  // Exact discrete oracle: E = 1/2 (cxx A + cyy B) with the discrete speeds.
  for (const double beta : {0.5, 1.0, 1.7}) {
    const auto l = LatticeParams::from_alpha_beta(0.0, beta);
    const auto m = covering_moments(2, 1, n);
    const double want = 0.5 * (beta * beta * m.xx + m.yy / (beta * beta));
    EXPECT_NEAR(energy(covering_map({n, n}, 2, 1), l), want, 1e-12);
  }
}

TEST(Energy, NonnegativeAndDensityIntegratesToEnergy) {
  auto rng = make_rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto target = t % 2 ? kTorus : TargetManifold::sphere(3);
    const auto u = random_smooth_map(target, {32, 40}, 4, t);
    const auto l = LatticeParams::from_alpha_beta(uniform(rng, -1, 1), uniform(rng, 0.5, 2));
    const double e = energy(u, l);
    EXPECT_GE(e, 0.0);
    const auto d = energy_density(u, l);
    EXPECT_NEAR(integrate(d, u.shape()), e, 1e-12 * (1 + e));
  }
}

TEST(LaplaceBeltrami, AnnihilatesConstants) {
  const auto c = scalar_field({16, 16}, [](double, double) { return 3.25; });
  const auto lap = laplace_beltrami(c, LatticeParams::from_alpha_beta(0.4, 1.2));
  for (double v : lap.data()) EXPECT_NEAR(v, 0.0, 1e-11);
}

TEST(LaplaceBeltrami, SineEigenfunctions) {
  const std::size_t n = 64;
  const double h = 1.0 / n;
  const double symbol = -std::pow(2.0 / h * std::sin(kPi * h), 2);
  const GridShape g{n, n};

  const auto sx = scalar_field(g, [](double x, double) { return std::sin(2 * kPi * x); });
  const auto lx = laplace_beltrami(sx, LatticeParams{});
  const auto sy = scalar_field(g, [](double, double y) { return std::sin(2 * kPi * y); });
  const auto ly = laplace_beltrami(sy, LatticeParams::from_alpha_beta(0.0, 2.0));
  for (std::size_t n2 = 0; n2 < g.size(); ++n2) {
    EXPECT_NEAR(lx.data()[n2], symbol * sx.data()[n2], 1e-9);
    EXPECT_NEAR(lx.data()[n2], -4 * kPi * kPi * sx.data()[n2], 4 * kPi * kPi * 5e-3);
    EXPECT_NEAR(ly.data()[n2], 0.25 * symbol * sy.data()[n2], 1e-9);
    EXPECT_NEAR(ly.data()[n2], -kPi * kPi * sy.data()[n2], kPi * kPi * 5e-3);
  }
}

TEST(LaplaceBeltrami, MixedTermSecondOrder) {
  // f = sin(2pi x) sin(2pi y): Delta_g f = -4pi^2 (cxx + cyy) f + 4pi^2 cxy cos cos.
  const auto l = LatticeParams::from_alpha_beta(0.5, 1.25);
  double err_prev = 0;
  for (const std::size_t n : {32u, 64u}) {
    const GridShape g{n, n};
    const auto f = scalar_field(g, [](double x, double y) {
      return std::sin(2 * kPi * x) * std::sin(2 * kPi * y);
    });
    const auto lap = laplace_beltrami(f, l);
    double err = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double x = g.x(j), y = g.y(i);
        const double want =
            -4 * kPi * kPi * (l.cxx() + l.cyy()) * std::sin(2 * kPi * x) * std::sin(2 * kPi * y) +
            4 * kPi * kPi * l.cxy() * std::cos(2 * kPi * x) * std::cos(2 * kPi * y);
        err = std::max(err, std::abs(lap.at(i, j)[0] - want));
      }
    }
    if (err_prev > 0) {
      EXPECT_NEAR(err_prev / err, 4.0, 0.1);
    }
    err_prev = err;
  }
}

TEST(Tension, HarmonicAndConstantMapsAreTensionFree) {
  for (const auto& l : {LatticeParams{}, LatticeParams::from_ab(0.3, 1.4)}) {
    const auto cov = tension(covering_map({32, 32}, 2, 1), l, kTorus);
    for (double v : cov.data()) EXPECT_NEAR(v, 0.0, 1e-11);
    const auto cst = tension(constant_map({32, 32}, kTorus), l, kTorus);
    for (double v : cst.data()) EXPECT_EQ(v, 0.0);
  }
}

TEST(Tension, PointwiseTangent) {
  const auto s2 = TargetManifold::sphere(3);
  const auto u = random_smooth_map(s2, {32, 32}, 2, 0);
  const auto tau = tension(u, LatticeParams::from_ab(0.2, 0.9), s2);
  for (std::size_t n = 0; n < u.shape().size(); ++n) {
    double dot = 0;
    for (int k = 0; k < 3; ++k) dot += tau.data()[3 * n + k] * u.data()[3 * n + k];
    EXPECT_NEAR(dot, 0.0, 1e-10);
  }
}

TEST(Tension, SweepAgreesWithSeparateOperators) {
  for (const auto& target : {kTorus, TargetManifold::sphere(3), TargetManifold::sphere(5)}) {
    const auto u = random_smooth_map(target, {24, 40}, 6, 2);
    const auto l = LatticeParams::from_ab(-0.3, 0.8);
    const auto sweep = tension_sweep(u, l, target);
    const auto tau = tension(u, l, target);
    EXPECT_EQ(sweep.tension, tau);
    EXPECT_NEAR(sweep.tension_l2, l2_norm(tau), 1e-13 * sweep.tension_l2);
    const auto m = gradient_moments(u);
    EXPECT_EQ(sweep.moments.xx, m.xx);
    EXPECT_EQ(sweep.moments.yy, m.yy);
    EXPECT_EQ(sweep.moments.xy, m.xy);
    const auto d = energy_density(u, l);
    EXPECT_EQ(sweep.max_density, *std::max_element(d.begin(), d.end()));
  }
}

TEST(Tension, SmallNormalPerturbationScalesLinearly) {
  const std::size_t n = 64;
  const auto l = LatticeParams{};
  const auto base = covering_map({n, n}, 1, 1);
  double prev = 0;
  for (const double amp : {1e-3, 2e-3, 4e-3}) {
    const auto u = perturb_map(base, kTorus, amp, 8);
    const double t = l2_norm(tension(u, l, kTorus));
    if (prev > 0) {
      EXPECT_NEAR(t / prev, 2.0, 0.02);
    }
    prev = t;
  }
}

class GradientConsistency : public ::testing::TestWithParam<const char*> {};

TEST_P(GradientConsistency, EnergyDerivativeIsMinusTensionPairing) {
  // The energy uses centered first differences and the tension the compact
  // Laplacian, so the two agree up to O(h^2): check the gap shrinks fourfold.
  const auto target = TargetManifold::from_name(GetParam());
  const auto l = LatticeParams::from_ab(0.25, 1.1);
  for (int trial = 0; trial < 2; ++trial) {
    double prev_gap = 0;
    for (const std::size_t n : {64u, 128u}) {
      const auto u = random_smooth_map(target, {n, n}, 21, trial);
      // Smooth tangent direction: tangent part of a random smooth ambient field.
      const auto w = random_smooth_map(target, {n, n}, 22, trial);
      MapField v(u.shape(), u.dim());
      for (std::size_t k = 0; k < u.shape().size(); ++k) {
        target.project_tangent_unchecked(&u.data()[k * u.dim()], &w.data()[k * u.dim()],
                                         &v.data()[k * u.dim()]);
      }
      const double predicted = -l2_inner(tension(u, l, target), v);
      const double eps = 1e-6;
      MapField up = u, um = u;
      for (std::size_t k = 0; k < u.data().size(); ++k) {
        up.data()[k] += eps * v.data()[k];
        um.data()[k] -= eps * v.data()[k];
      }
      project_onto(up, target);
      project_onto(um, target);
      const double fd = (energy(up, l) - energy(um, l)) / (2 * eps);
      const double gap = std::abs(fd - predicted) / std::abs(predicted);
      EXPECT_LT(gap, 0.15) << trial << " " << n;
      if (prev_gap > 0) {
        EXPECT_NEAR(prev_gap / gap, 4.0, 0.6) << trial;
      }
      prev_gap = gap;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Targets, GradientConsistency,
                         ::testing::Values("flat-torus", "sphere:3"));

TEST(HopfDifferential, ConformalCoveringVanishes) {
  const auto phi = hopf_differential(covering_map({32, 32}, 1, 1), LatticeParams{});
  for (const auto& v : phi.data()) EXPECT_LT(std::abs(v), 1e-10);
}

TEST(HopfDifferential, DegreeTwoOneIsRealConstant) {
  const std::size_t n = 64;
  const auto m = covering_moments(2, 1, n);
  const auto u = covering_map({n, n}, 2, 1);
  for (const double beta : {0.6, 1.0, 1.5}) {
    const auto phi = hopf_differential(u, LatticeParams::from_alpha_beta(0.0, beta));
    const double want = beta * beta * m.xx - m.yy / (beta * beta);
    for (const auto& v : phi.data()) {
      ASSERT_NEAR(v.real(), want, 1e-11);
      ASSERT_NEAR(v.imag(), 0.0, 1e-11);
    }
    // Continuum closed form 4 beta^2 - 1/beta^2 up to O(h^2).
    EXPECT_NEAR(want, 4 * beta * beta - 1 / (beta * beta), 0.02 * (4 * beta * beta + 1 / (beta * beta)));
  }
}

TEST(HopfDifferential, ZeroAtConformalStructure) {
  // Continuum root beta^2 = 1/2; on the grid the root is sqrt(B/A).
  const std::size_t n = 64;
  const auto u = covering_map({n, n}, 2, 1);
  const auto m = covering_moments(2, 1, n);
  const double b_star = std::sqrt(m.yy / m.xx);
  EXPECT_NEAR(b_star, 0.5, 0.02);
  const auto phi = hopf_differential(u, LatticeParams::from_ab(0.0, b_star));
  for (const auto& v : phi.data()) ASSERT_LT(std::abs(v), 1e-10);
  const auto phi_c = hopf_differential(u, LatticeParams::from_ab(0.0, 0.5));
  for (const auto& v : phi_c.data()) ASSERT_LT(std::abs(v), 0.05);
}

TEST(HopfMean, MatchesProjectionOfField) {
  for (int t = 0; t < 5; ++t) {
    const auto u = random_smooth_map(kTorus, {32, 32}, 30, t);
    const auto l = LatticeParams::from_ab(0.1 * t - 0.2, 0.7 + 0.2 * t);
    const cd direct = project_holomorphic(hopf_differential(u, l));
    const cd from_moments = hopf_mean(gradient_moments(u), l);
    EXPECT_NEAR(std::abs(direct - from_moments), 0.0, 1e-11 * (1 + std::abs(direct)));
  }
}

TEST(ProjectHolomorphic, Examples) {
  const GridShape g{32, 32};
  EXPECT_NEAR(std::abs(project_holomorphic(qd_field(g, [](double, double) {
                         return cd(2.0, -1.5);
                       })) - cd(2.0, -1.5)),
              0.0, 1e-14);
  EXPECT_LT(std::abs(project_holomorphic(qd_field(g, [](double x, double) {
              return std::exp(cd(0, 2 * kPi * x));
            }))),
            1e-14);
  EXPECT_NEAR(std::abs(project_holomorphic(qd_field(g, [](double, double y) {
                         return 3.0 + std::exp(cd(0, 2 * kPi * y));
                       })) - 3.0),
              0.0, 1e-14);
}

TEST(ProjectHolomorphic, IdempotentAndOrthogonal) {
  const GridShape g{24, 32};
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto phi = random_qd(g, s);
    const cd p = project_holomorphic(phi);
    QuadDiffField constant(g);
    for (auto& v : constant.data()) v = p;
    EXPECT_NEAR(std::abs(project_holomorphic(constant) - p), 0.0, 1e-14);
    QuadDiffField rest(g);
    for (std::size_t n = 0; n < g.size(); ++n) rest.data()[n] = phi.data()[n] - p;
    EXPECT_LT(std::abs(project_holomorphic(rest)), 1e-14);
    // Orthogonality to every constant c reduces to a zero mean of the residual.
    const cd c(0.3, -1.1);
    QuadDiffField paired(g);
    for (std::size_t n = 0; n < g.size(); ++n) paired.data()[n] = rest.data()[n] * std::conj(c);
    EXPECT_LT(std::abs(project_holomorphic(paired)), 1e-14);
  }
}

TEST(Dbar, ConstantVanishes) {
  const auto d = dbar(qd_field({16, 16}, [](double, double) { return cd(1, 2); }),
                      LatticeParams::from_ab(0.4, 0.8));
  for (const auto& v : d.data()) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(Dbar, FourierModeSymbol) {
  const std::size_t n = 64;
  const double h = 1.0 / n;
  const GridShape g{n, n};
  const auto psi = qd_field(g, [](double x, double) { return std::exp(cd(0, 2 * kPi * x)); });
  const auto d = dbar(psi);
  const double sinc = std::sin(2 * kPi * h) / (2 * kPi * h);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const cd want = cd(0, kPi * sinc) * psi.data()[k];
    ASSERT_LT(std::abs(d.data()[k] - want), 1e-12);
    ASSERT_LT(std::abs(d.data()[k] - cd(0, kPi) * psi.data()[k]), kPi * 3e-3);
  }
}

TEST(QdNorms, Examples) {
  const GridShape g{16, 16};
  const auto one = qd_norms(qd_field(g, [](double, double) { return cd(1, 0); }));
  EXPECT_NEAR(one.l1, 2.0, 1e-14);
  const auto imag = qd_norms(qd_field(g, [](double, double) { return cd(0, 1); }));
  EXPECT_NEAR(imag.re_l2 * imag.re_l2, 0.5 * imag.l2 * imag.l2, 1e-14);
  const auto wave =
      qd_norms(qd_field(g, [](double x, double) { return std::exp(cd(0, 2 * kPi * x)); }));
  EXPECT_NEAR(wave.l2 * wave.l2, 4.0, 1e-13);
  EXPECT_NEAR(constant_qd_l2(cd(3, 4)), 10.0, 1e-15);
}

TEST(QdNorms, RealPartCarriesHalfTheMass) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto q = qd_norms(random_qd({20, 12}, s));
    EXPECT_NEAR(q.l2 * q.l2, 2 * q.re_l2 * q.re_l2, 1e-12 * q.l2 * q.l2);
  }
}

TEST(MetricVariation, Examples) {
  EXPECT_EQ(metric_variation(LatticeParams{}, 0, 0), cd(0, 0));
  EXPECT_EQ(metric_variation(LatticeParams{}, 0, 1), cd(-2, 0));
  EXPECT_EQ(metric_variation(LatticeParams{}, 1, 0), cd(0, -1));
  // Purely real when alpha beta_dot / beta^2 + alpha_dot / beta = 0.
  const auto l = LatticeParams::from_alpha_beta(0.6, 1.5);
  const double beta_dot = 0.8;
  const double alpha_dot = -0.6 * beta_dot / 1.5;
  EXPECT_NEAR(metric_variation(l, alpha_dot, beta_dot).imag(), 0.0, 1e-15);
}

TEST(MetricVariation, MatchesFiniteDifferenceOfMetricFamily) {
  auto rng = make_rng(77);
  for (int t = 0; t < 20; ++t) {
    const double alpha = uniform(rng, -1, 1);
    const double beta = uniform(rng, 0.4, 2);
    const double ad = uniform(rng, -1, 1);
    const double bd = uniform(rng, -1, 1);
    const auto metric = [&](double s) {
      const auto l = LatticeParams::from_alpha_beta(alpha + s * ad, beta + s * bd);
      return std::array<double, 3>{l.g11(), l.g12(), l.g22()};
    };
    const double s = 1e-6;
    const auto gp = metric(s), gm = metric(-s);
    const double d11 = (gp[0] - gm[0]) / (2 * s);
    const double d12 = (gp[1] - gm[1]) / (2 * s);
    const double d22 = (gp[2] - gm[2]) / (2 * s);
    // Express dg in the isothermal frame d/dX = beta d/dx, d/dY = -alpha d/dx + d/dy / beta.
    const double e1[2] = {beta, 0};
    const double e2[2] = {-alpha, 1 / beta};
    const auto form = [&](const double* v, const double* w) {
      return d11 * v[0] * w[0] + d12 * (v[0] * w[1] + v[1] * w[0]) + d22 * v[1] * w[1];
    };
    const cd theta = metric_variation(LatticeParams::from_alpha_beta(alpha, beta), ad, bd);
    // Re(theta dz^2) = Re(theta)(dX^2 - dY^2) - Im(theta)(dX dY + dY dX).
    EXPECT_NEAR(form(e1, e1), theta.real(), 1e-7);
    EXPECT_NEAR(form(e2, e2), -theta.real(), 1e-7);
    EXPECT_NEAR(form(e1, e2), -theta.imag(), 1e-7);
  }
}

TEST(CoefficientL1, ModulusIntegral) {
  const auto q = qd_field({16, 16}, [](double x, double) { return 3.0 * std::exp(cd(0, 2 * kPi * x)); });
  EXPECT_NEAR(coefficient_l1(q), 3.0, 1e-14);
  EXPECT_NEAR(qd_norms(q).l1, 6.0, 1e-14);
}

}  // namespace
}  // namespace hmflow
