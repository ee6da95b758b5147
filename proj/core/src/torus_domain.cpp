#include "hmflow/torus_domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "hmflow/error.hpp"
#include "hmflow/numerics.hpp"
#include "stencil.hpp"

namespace hmflow {

using detail::dispatch_dim;
using detail::for_each_stencil;
using detail::Stencil;

double integrate(std::span<const double> nodal, const GridShape& shape) {
  return pairwise_sum(nodal) * shape.cell_area();
}

namespace {

VectorField centered_difference(const VectorField& u, bool along_x) {
  VectorField out(u.shape(), u.dim());
  const std::size_t dim = u.dim();
  const double scale =
      along_x ? 0.5 / u.shape().hx() : 0.5 / u.shape().hy();
  double* dst = out.data().data();
  for_each_stencil(u, [&](std::size_t idx, const Stencil& st) {
    const double* plus = along_x ? st.e : st.n;
    const double* minus = along_x ? st.w : st.s;
    for (std::size_t k = 0; k < dim; ++k) {
      dst[idx * dim + k] = (plus[k] - minus[k]) * scale;
    }
  });
  return out;
}

}  // namespace

VectorField derivative_x(const VectorField& u) {
  return centered_difference(u, true);
}

VectorField derivative_y(const VectorField& u) {
  return centered_difference(u, false);
}

IsothermalDerivatives isothermal_derivatives(const MapField& u,
                                             const LatticeParams& lattice) {
  VectorField ux = derivative_x(u);
  VectorField uy = derivative_y(u);
  const double alpha = lattice.alpha();
  const double beta = lattice.beta();
  IsothermalDerivatives out{VectorField(u.shape(), u.dim()),
                            VectorField(u.shape(), u.dim())};
  for (std::size_t n = 0; n < ux.data().size(); ++n) {
    out.u_X.data()[n] = beta * ux.data()[n];
    out.u_Y.data()[n] = -alpha * ux.data()[n] + uy.data()[n] / beta;
  }
  return out;
}

namespace {

/// Gradient integrands |u_x|^2, |u_y|^2, <u_x, u_y> at one node. Components
/// are accumulated in two interleaved lanes (even and odd k) that are added
/// at the end; the vectorised sweep uses the same order, so every path that
/// produces moments agrees bit for bit.
struct NodeGradient {
  double xx;
  double yy;
  double xy;
};

NodeGradient node_gradient(const Stencil& st, std::size_t K, double sx, double sy) {
  double a[2] = {0.0, 0.0};
  double b[2] = {0.0, 0.0};
  double m[2] = {0.0, 0.0};
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t l = k & 1u;
    const double dx = (st.e[k] - st.w[k]) * sx;
    const double dy = (st.n[k] - st.s[k]) * sy;
    a[l] += dx * dx;
    b[l] += dy * dy;
    m[l] += dx * dy;
  }
  return {a[0] + a[1], b[0] + b[1], m[0] + m[1]};
}

}  // namespace

GradientMoments gradient_moments(const MapField& u) {
  const GridShape& g = u.shape();
  std::vector<double> xx(g.size());
  std::vector<double> yy(g.size());
  std::vector<double> xy(g.size());
  const double sx = 0.5 / g.hx();
  const double sy = 0.5 / g.hy();
  const std::size_t K = u.dim();
  for_each_stencil(u, [&](std::size_t idx, const Stencil& st) {
    const NodeGradient d = node_gradient(st, K, sx, sy);
    xx[idx] = d.xx;
    yy[idx] = d.yy;
    xy[idx] = d.xy;
  });
  return {integrate(xx, g), integrate(yy, g), integrate(xy, g)};
}

double energy(const GradientMoments& m, const LatticeParams& lattice) {
  return 0.5 * (lattice.cxx() * m.xx + lattice.cyy() * m.yy +
                lattice.cxy() * m.xy);
}

double energy(const MapField& u, const LatticeParams& lattice) {
  return energy(gradient_moments(u), lattice);
}

std::vector<double> energy_density(const MapField& u,
                                   const LatticeParams& lattice) {
  const GridShape& g = u.shape();
  std::vector<double> density(g.size());
  const double sx = 0.5 / g.hx();
  const double sy = 0.5 / g.hy();
  const double cxx = lattice.cxx();
  const double cxy = lattice.cxy();
  const double cyy = lattice.cyy();
  const std::size_t K = u.dim();
  for_each_stencil(u, [&](std::size_t idx, const Stencil& st) {
    const NodeGradient d = node_gradient(st, K, sx, sy);
    density[idx] = 0.5 * (cxx * d.xx + cyy * d.yy + cxy * d.xy);
  });
  return density;
}

namespace {

/// Shared Laplace-Beltrami stencil; writes Delta_g u at one node into lap.
struct LaplaceStencil {
  double wxx;  // cxx / hx^2
  double wyy;  // cyy / hy^2
  double wxy;  // cxy / (4 hx hy)

  LaplaceStencil(const GridShape& g, const LatticeParams& lattice)
      : wxx(lattice.cxx() / (g.hx() * g.hx())),
        wyy(lattice.cyy() / (g.hy() * g.hy())),
        wxy(lattice.cxy() / (4.0 * g.hx() * g.hy())) {}

  template <std::size_t K>
  void apply(const Stencil& st, std::size_t dim, double* lap) const {
    const std::size_t n = K == 0 ? dim : K;
    for (std::size_t k = 0; k < n; ++k) {
      const double c2 = 2.0 * st.c[k];
      const double uxx = st.e[k] - c2 + st.w[k];
      const double uyy = st.n[k] - c2 + st.s[k];
      const double uxy = (st.ne[k] - st.nw[k]) - (st.se[k] - st.sw[k]);
      lap[k] = wxx * uxx + wyy * uyy + wxy * uxy;
    }
  }
};

}  // namespace

VectorField laplace_beltrami(const VectorField& u, const LatticeParams& lattice) {
  VectorField out(u.shape(), u.dim());
  const LaplaceStencil stencil(u.shape(), lattice);
  double* dst = out.data().data();
  dispatch_dim(u.dim(), [&](auto kc) {
    constexpr std::size_t KC = decltype(kc)::value;
    const std::size_t dim = u.dim();
    for_each_stencil(u, [&](std::size_t idx, const Stencil& st) {
      stencil.apply<KC>(st, dim, dst + idx * dim);
    });
  });
  return out;
}

namespace {

/// Per-node outputs of the fused tension sweep.
struct SweepBuffers {
  double* __restrict tau;
  double* __restrict tau_sq;
  double* __restrict xx;
  double* __restrict yy;
  double* __restrict xy;
};

struct SweepConstants {
  double wxx;  // cxx / hx^2
  double wyy;  // cyy / hy^2
  double wxy;  // cxy / (4 hx hy)
  double sx;
  double sy;
  double cxx;
  double cxy;
  double cyy;

  SweepConstants(const GridShape& g, const LatticeParams& lattice)
      : wxx(lattice.cxx() / (g.hx() * g.hx())),
        wyy(lattice.cyy() / (g.hy() * g.hy())),
        wxy(lattice.cxy() / (4.0 * g.hx() * g.hy())),
        sx(0.5 / g.hx()),
        sy(0.5 / g.hy()),
        cxx(lattice.cxx()),
        cxy(lattice.cxy()),
        cyy(lattice.cyy()) {}
};

/// Fused sweep for sphere targets: Laplace-Beltrami, tangent projection,
/// |tau|^2, gradient integrands and the maximal energy density. Arithmetic
/// matches LaplaceStencil::apply, project_tangent_unchecked and
/// node_gradient. K = 0 means a runtime dimension.
template <std::size_t KC>
double sphere_sweep(const VectorField& u, const LatticeParams& lattice, SweepBuffers out) {
  const GridShape g = u.shape();
  const std::size_t K = KC == 0 ? u.dim() : KC;
  const SweepConstants k_(g, lattice);
  const LaplaceStencil stencil(g, lattice);
  double max_density = 0.0;
  for_each_stencil(u, [&](std::size_t idx, const Stencil& st) {
    double lap[detail::kMaxDim];
    stencil.apply<KC>(st, K, lap);
    const NodeGradient d = node_gradient(st, K, k_.sx, k_.sy);
    double* tau = out.tau + idx * K;
    double pv = 0.0;
    double pp = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      pv += st.c[k] * lap[k];
      pp += st.c[k] * st.c[k];
    }
    const double s = pv / pp;
    double t2 = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      tau[k] = lap[k] - s * st.c[k];
      t2 += tau[k] * tau[k];
    }
    out.tau_sq[idx] = t2;
    out.xx[idx] = d.xx;
    out.yy[idx] = d.yy;
    out.xy[idx] = d.xy;
    max_density = std::max(max_density, 0.5 * (k_.cxx * d.xx + k_.cyy * d.yy + k_.cxy * d.xy));
  });
  return max_density;
}

// Two-lane vectors: one lane per coordinate of a circle factor. Lane-wise
// IEEE arithmetic gives the same results as the scalar code.
using v2d = double __attribute__((vector_size(16)));

inline v2d load2(const double* p) {
  v2d v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void store2(double* p, v2d v) { std::memcpy(p, &v, sizeof v); }

inline v2d splat(double x) { return v2d{x, x}; }

/// The same fused sweep specialised to the flat torus target in R^4. Each
/// circle factor (coordinates 2q, 2q + 1) is one two-lane vector.
double torus_sweep(const VectorField& u, const LatticeParams& lattice, SweepBuffers out) {
  const GridShape g = u.shape();
  constexpr std::size_t K = 4;
  const std::size_t stride = g.cols * K;
  const detail::Wrap rows(g.rows);
  const detail::Wrap cols(g.cols);
  const SweepConstants k_(g, lattice);
  const v2d wxx = splat(k_.wxx);
  const v2d wyy = splat(k_.wyy);
  const v2d wxy = splat(k_.wxy);
  const v2d sx = splat(k_.sx);
  const v2d sy = splat(k_.sy);
  const v2d two = splat(2.0);
  const double* base = u.data().data();
  double max_density = 0.0;

  for (std::size_t i = 0; i < g.rows; ++i) {
    const double* rc = base + i * stride;
    const double* rn = base + rows.next[i] * stride;
    const double* rs = base + rows.prev[i] * stride;
    for (std::size_t j = 0; j < g.cols; ++j) {
      const std::size_t jc = j * K;
      const std::size_t je = cols.next[j] * K;
      const std::size_t jw = cols.prev[j] * K;
      const std::size_t idx = i * g.cols + j;
      v2d a = splat(0.0);
      v2d b = splat(0.0);
      v2d m = splat(0.0);
      v2d t = splat(0.0);
      for (std::size_t q = 0; q < K; q += 2) {
        const v2d c = load2(rc + jc + q);
        const v2d e = load2(rc + je + q);
        const v2d w = load2(rc + jw + q);
        const v2d n = load2(rn + jc + q);
        const v2d s = load2(rs + jc + q);
        const v2d c2 = two * c;
        const v2d uxx = e - c2 + w;
        const v2d uyy = n - c2 + s;
        const v2d uxy = (load2(rn + je + q) - load2(rn + jw + q)) -
                        (load2(rs + je + q) - load2(rs + jw + q));
        const v2d lap = wxx * uxx + wyy * uyy + wxy * uxy;
        const v2d dx = (e - w) * sx;
        const v2d dy = (n - s) * sy;
        a += dx * dx;
        b += dy * dy;
        m += dx * dy;
        const v2d cl = c * lap;
        const v2d cc = c * c;
        const double ratio = (cl[0] + cl[1]) / (cc[0] + cc[1]);
        const v2d tau = lap - splat(ratio) * c;
        store2(out.tau + idx * K + q, tau);
        t += tau * tau;
      }
      const double xx = a[0] + a[1];
      const double yy = b[0] + b[1];
      const double xy = m[0] + m[1];
      out.tau_sq[idx] = t[0] + t[1];
      out.xx[idx] = xx;
      out.yy[idx] = yy;
      out.xy[idx] = xy;
      max_density = std::max(max_density, 0.5 * (k_.cxx * xx + k_.cyy * yy + k_.cxy * xy));
    }
  }
  return max_density;
}

}  // namespace

void tension_sweep_into(const MapField& u, const LatticeParams& lattice,
                        const TargetManifold& target, TensionSweep& out) {
  if (u.dim() != target.ambient_dim()) {
    throw ContractViolation("map dimension does not match target " +
                            target.name());
  }
  const GridShape& g = u.shape();
  const std::size_t N = g.size();
  if (!(out.tension.shape() == g) || out.tension.dim() != u.dim()) {
    out.tension = VectorField(g, u.dim());
  }
  out.scratch.resize(4 * N);
  double* tau_sq = out.scratch.data();
  const SweepBuffers buffers{out.tension.data().data(), tau_sq, tau_sq + N, tau_sq + 2 * N,
                             tau_sq + 3 * N};
  if (target.kind() == TargetKind::flat_torus) {
    out.max_density = torus_sweep(u, lattice, buffers);
  } else if (u.dim() == 3) {
    out.max_density = sphere_sweep<3>(u, lattice, buffers);
  } else {
    out.max_density = sphere_sweep<0>(u, lattice, buffers);
  }
  out.tension_l2 = std::sqrt(integrate({buffers.tau_sq, N}, g));
  out.moments = {integrate({buffers.xx, N}, g), integrate({buffers.yy, N}, g),
                 integrate({buffers.xy, N}, g)};
}

TensionSweep tension_sweep(const MapField& u, const LatticeParams& lattice,
                           const TargetManifold& target) {
  TensionSweep out;
  tension_sweep_into(u, lattice, target, out);
  return out;
}

VectorField tension(const MapField& u, const LatticeParams& lattice,
                    const TargetManifold& target) {
  return tension_sweep(u, lattice, target).tension;
}

QuadDiffField hopf_differential(const MapField& u, const LatticeParams& lattice) {
  const auto [uX, uY] = isothermal_derivatives(u, lattice);
  QuadDiffField phi(u.shape());
  const std::size_t K = u.dim();
  for (std::size_t n = 0; n < u.shape().size(); ++n) {
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double a = uX.data()[n * K + k];
      const double b = uY.data()[n * K + k];
      xx += a * a;
      yy += b * b;
      xy += a * b;
    }
    phi.data()[n] = {xx - yy, -2.0 * xy};
  }
  return phi;
}

std::complex<double> hopf_mean(const GradientMoments& m,
                               const LatticeParams& lattice) {
  const double alpha = lattice.alpha();
  const double beta = lattice.beta();
  const double iso_xx = beta * beta * m.xx;
  const double iso_yy = alpha * alpha * m.xx + m.yy / (beta * beta) -
                        2.0 * alpha * m.xy / beta;
  const double iso_xy = -alpha * beta * m.xx + m.xy;
  return {iso_xx - iso_yy, -2.0 * iso_xy};
}

std::complex<double> project_holomorphic(const QuadDiffField& phi) {
  const GridShape& g = phi.shape();
  std::vector<double> re(g.size());
  std::vector<double> im(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    re[n] = phi.data()[n].real();
    im[n] = phi.data()[n].imag();
  }
  return {integrate(re, g), integrate(im, g)};
}

QuadDiffField dbar(const QuadDiffField& psi, const LatticeParams& lattice) {
  const GridShape& g = psi.shape();
  QuadDiffField out(g);
  const detail::Wrap rows(g.rows);
  const detail::Wrap cols(g.cols);
  const double sx = 0.5 / g.hx();
  const double sy = 0.5 / g.hy();
  const double alpha = lattice.alpha();
  const double beta = lattice.beta();
  for (std::size_t i = 0; i < g.rows; ++i) {
    for (std::size_t j = 0; j < g.cols; ++j) {
      const std::complex<double> px =
          (psi.at(i, cols.next[j]) - psi.at(i, cols.prev[j])) * sx;
      const std::complex<double> py =
          (psi.at(rows.next[i], j) - psi.at(rows.prev[i], j)) * sy;
      const std::complex<double> pX = beta * px;
      const std::complex<double> pY = -alpha * px + py / beta;
      out.at(i, j) = 0.5 * (pX + std::complex<double>(0.0, 1.0) * pY);
    }
  }
  return out;
}

QdNorms qd_norms(const QuadDiffField& phi) {
  const GridShape& g = phi.shape();
  std::vector<double> l1(g.size());
  std::vector<double> l2(g.size());
  std::vector<double> re2(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const std::complex<double> v = phi.data()[n];
    l1[n] = kDz2Norm * std::abs(v);
    l2[n] = kDz2Norm * kDz2Norm * std::norm(v);
    // Re(phi dz^2) = Re(phi)(dx^2 - dy^2) - Im(phi)(dx dy + dy dx); sum the
    // squares of its four Cartesian components.
    const double h11 = v.real();
    const double h22 = -v.real();
    const double h12 = -v.imag();
    re2[n] = h11 * h11 + h22 * h22 + 2.0 * h12 * h12;
  }
  return {integrate(l1, g), std::sqrt(integrate(l2, g)),
          std::sqrt(integrate(re2, g))};
}

double coefficient_l1(const QuadDiffField& psi) {
  const GridShape& g = psi.shape();
  std::vector<double> mod(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) mod[n] = std::abs(psi.data()[n]);
  return integrate(mod, g);
}

std::complex<double> metric_variation(const LatticeParams& lattice,
                                      double alpha_dot, double beta_dot) {
  const double alpha = lattice.alpha();
  const double beta = lattice.beta();
  return {-2.0 * beta_dot / beta,
          -(alpha * beta_dot / (beta * beta) + alpha_dot / beta)};
}

double l2_inner(const VectorField& v, const VectorField& w) {
  if (v.shape() != w.shape() || v.dim() != w.dim()) {
    throw ContractViolation("l2_inner: field shapes differ");
  }
  const GridShape& g = v.shape();
  const std::size_t K = v.dim();
  std::vector<double> dot(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      s += v.data()[n * K + k] * w.data()[n * K + k];
    }
    dot[n] = s;
  }
  return integrate(dot, g);
}

double l2_norm(const VectorField& v) { return std::sqrt(l2_inner(v, v)); }

}  // namespace hmflow
