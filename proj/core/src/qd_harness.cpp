#include "hmflow/qd_harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hmflow/error.hpp"
#include "hmflow/map_generators.hpp"
#include "hmflow/numerics.hpp"
#include "hmflow/torus_domain.hpp"

namespace hmflow::harness {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerate = 1e-14;

std::vector<std::pair<int, int>> build_mode_table() {
  constexpr int kReach = 12;
  std::vector<std::pair<int, int>> modes;
  for (int k1 = -kReach; k1 <= kReach; ++k1) {
    for (int k2 = -kReach; k2 <= kReach; ++k2) {
      if (k1 != 0 || k2 != 0) modes.emplace_back(k1, k2);
    }
  }
  auto angle = [](const std::pair<int, int>& k) {
    const double a = std::atan2(static_cast<double>(k.second),
                                static_cast<double>(k.first));
    return a < 0.0 ? a + 2.0 * kPi : a;
  };
  std::sort(modes.begin(), modes.end(), [&](const auto& l, const auto& r) {
    const int nl = l.first * l.first + l.second * l.second;
    const int nr = r.first * r.first + r.second * r.second;
    if (nl != nr) return nl < nr;
    return angle(l) < angle(r);
  });
  // Only modes strictly inside the reach are complete shells.
  std::erase_if(modes, [](const auto& k) {
    return k.first * k.first + k.second * k.second > kReach * kReach;
  });
  return modes;
}

const std::vector<std::pair<int, int>>& mode_table() {
  static const std::vector<std::pair<int, int>> table = build_mode_table();
  return table;
}

std::complex<double> random_unit_box(std::mt19937_64& rng) {
  const double re = uniform(rng, -1.0, 1.0);
  const double im = uniform(rng, -1.0, 1.0);
  return {re, im};
}

void validate(const TrialSpec& spec) {
  if (spec.grid.rows < 3 || spec.grid.cols < 3) {
    throw DomainError("trial grid must be at least 3 x 3");
  }
  if (spec.modes < 0 || static_cast<std::size_t>(spec.modes) > mode_table().size()) {
    throw DomainError("number of modes out of range: " + std::to_string(spec.modes));
  }
  if (!(spec.amp_min >= 0.0) || !(spec.amp_max >= spec.amp_min)) {
    throw DomainError("amplitude range must satisfy 0 <= amp_min <= amp_max");
  }
  if (spec.trials < 0) throw DomainError("trial count must be non-negative");
}

void tally(TrialSummary& summary, TrialRecord record) {
  ++summary.trials;
  if (!record.ratio) {
    ++summary.skipped;
  } else {
    summary.max_ratio = std::max(summary.max_ratio, *record.ratio);
    if (record.violated) ++summary.violations;
  }
  summary.records.push_back(record);
}

}  // namespace

std::pair<int, int> fourier_mode(int n) {
  const auto& table = mode_table();
  if (n < 0 || static_cast<std::size_t>(n) >= table.size()) {
    throw DomainError("Fourier mode index out of range: " + std::to_string(n));
  }
  return table[static_cast<std::size_t>(n)];
}

QuadDiffField generate_differential(const TrialSpec& spec, std::uint64_t k) {
  validate(spec);
  auto rng = make_rng(spec.seed, k);
  const std::complex<double> c0 = random_unit_box(rng);

  struct Term {
    int k1;
    int k2;
    std::complex<double> coeff;
  };
  std::vector<Term> terms;
  for (int n = 0; n < spec.modes; ++n) {
    const auto [k1, k2] = fourier_mode(n);
    const double amp = uniform(rng, spec.amp_min, spec.amp_max);
    const double phase = uniform(rng, 0.0, 2.0 * kPi);
    terms.push_back({k1, k2, std::polar(amp, phase)});
  }

  QuadDiffField psi(spec.grid);
  for (std::size_t i = 0; i < spec.grid.rows; ++i) {
    for (std::size_t j = 0; j < spec.grid.cols; ++j) {
      const double x = spec.grid.x(j);
      const double y = spec.grid.y(i);
      std::complex<double> v = c0;
      for (const Term& t : terms) {
        v += t.coeff * std::polar(1.0, 2.0 * kPi * (t.k1 * x + t.k2 * y));
      }
      psi.at(i, j) = v;
    }
  }
  return psi;
}

std::optional<double> poincare_ratio(const QuadDiffField& psi,
                                     const LatticeParams& lattice) {
  const double den = coefficient_l1(dbar(psi, lattice));
  if (!(den >= kDegenerate)) return std::nullopt;
  const std::complex<double> mean = project_holomorphic(psi);
  QuadDiffField rest(psi.shape());
  for (std::size_t n = 0; n < psi.data().size(); ++n) {
    rest.data()[n] = psi.data()[n] - mean;
  }
  return coefficient_l1(rest) / den;
}

// --- Unit disc ----------------------------------------------------------------

namespace {

// integral of sqrt(R^2 - u^2) du from 0 to u.
double chord_antiderivative(double u, double R) {
  const double s = std::sqrt(std::max(0.0, R * R - u * u));
  const double ratio = std::clamp(u / R, -1.0, 1.0);
  return 0.5 * (u * s + R * R * std::asin(ratio));
}

}  // namespace

double rect_disc_overlap(double x0, double x1, double y0, double y1, double R) {
  if (!(R > 0.0)) throw DomainError("disc radius must be positive");
  const double lo = std::max(x0, -R);
  const double hi = std::min(x1, R);
  if (!(lo < hi) || !(y0 < y1)) return 0.0;

  // Between consecutive breakpoints the upper boundary is either y1 or the
  // arc +s(u) and the lower one either y0 or -s(u), with s = sqrt(R^2 - u^2).
  std::vector<double> cuts{lo, hi};
  for (double yv : {y0, y1}) {
    if (std::abs(yv) < R) {
      const double u = std::sqrt(R * R - yv * yv);
      for (double c : {-u, u}) {
        if (c > lo && c < hi) cuts.push_back(c);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());

  double area = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double p = cuts[k];
    const double q = cuts[k + 1];
    if (!(q > p)) continue;
    const double mid = 0.5 * (p + q);
    const double s = std::sqrt(std::max(0.0, R * R - mid * mid));
    const bool top_is_line = y1 < s;
    const bool bottom_is_line = y0 > -s;
    const double top_mid = top_is_line ? y1 : s;
    const double bottom_mid = bottom_is_line ? y0 : -s;
    if (!(top_mid > bottom_mid)) continue;
    const double arc = chord_antiderivative(q, R) - chord_antiderivative(p, R);
    const double top = top_is_line ? y1 * (q - p) : arc;
    const double bottom = bottom_is_line ? y0 * (q - p) : -arc;
    area += top - bottom;
  }
  return area;
}

DiscGrid::DiscGrid(std::size_t n) : n_(n), h_(0.0) {
  if (n < 4) throw DomainError("disc grid needs at least 4 cells per diameter");
  h_ = 2.0 / static_cast<double>(n);
  const std::size_t m = side();
  disc_.assign(m * m, 0.0);
  half_.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::complex<double> c = point(i, j);
      const double x0 = c.real() - 0.5 * h_;
      const double x1 = c.real() + 0.5 * h_;
      const double y0 = c.imag() - 0.5 * h_;
      const double y1 = c.imag() + 0.5 * h_;
      disc_[i * m + j] = rect_disc_overlap(x0, x1, y0, y1, 1.0);
      half_[i * m + j] = rect_disc_overlap(x0, x1, y0, y1, 0.5);
    }
  }
}

std::complex<double> DiscGrid::point(std::size_t i, std::size_t j) const noexcept {
  const double shift = static_cast<double>(kMargin);
  const double x = -1.0 + (static_cast<double>(j) - shift + 0.5) * h_;
  const double y = -1.0 + (static_cast<double>(i) - shift + 0.5) * h_;
  return {x, y};
}

DiscField sample_disc(const DiscGrid& grid,
                      const std::function<std::complex<double>(std::complex<double>)>& f) {
  DiscField field{&grid, {}};
  const std::size_t m = grid.side();
  field.values.resize(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      field.values[i * m + j] = f(grid.point(i, j));
    }
  }
  return field;
}

DiscField generate_disc_function(const DiscGrid& grid, std::uint64_t seed,
                                 std::uint64_t trial, int degree) {
  if (degree < 1) throw DomainError("polynomial degree must be at least 1");
  auto rng = make_rng(seed, trial);
  struct Term {
    int j;
    int k;
    std::complex<double> c;
  };
  std::vector<Term> terms;
  for (int total = 0; total <= degree; ++total) {
    for (int k = 0; k <= total; ++k) {
      terms.push_back({total - k, k, random_unit_box(rng)});
    }
  }
  return sample_disc(grid, [&terms](std::complex<double> z) {
    const std::complex<double> zb = std::conj(z);
    std::complex<double> v = 0.0;
    for (const Term& t : terms) {
      v += t.c * std::pow(z, t.j) * std::pow(zb, t.k);
    }
    return v;
  });
}

Mollifier::Mollifier(double eps, double h) : eps_(eps) {
  if (!(eps > 0.0) || !(eps <= 0.5)) {
    throw DomainError("mollification radius must lie in (0, 1/2], got " +
                      std::to_string(eps));
  }
  if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
  const int reach = static_cast<int>(std::ceil(eps / h));
  double mass = 0.0;
  for (int di = -reach; di <= reach; ++di) {
    for (int dj = -reach; dj <= reach; ++dj) {
      const double r = h * std::hypot(static_cast<double>(di), static_cast<double>(dj));
      if (r >= eps) continue;
      const double w = 1.0 + std::cos(kPi * r / eps);
      taps_.push_back({di, dj, w});
      mass += w;
    }
  }
  for (Tap& t : taps_) t.weight /= mass;
}

std::optional<double> mollification_ratio(const DiscField& psi, double eps) {
  if (psi.grid == nullptr) throw ContractViolation("disc field has no grid");
  const DiscGrid& grid = *psi.grid;
  const Mollifier kernel(eps, grid.h());
  const std::size_t m = grid.side();
  const double h = grid.h();

  std::vector<double> dbar_terms;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    for (std::size_t j = 1; j + 1 < m; ++j) {
      const double w = grid.disc_weight(i, j);
      if (w == 0.0) continue;
      const std::complex<double> dx = (psi.at(i, j + 1) - psi.at(i, j - 1)) / (2.0 * h);
      const std::complex<double> dy = (psi.at(i + 1, j) - psi.at(i - 1, j)) / (2.0 * h);
      const std::complex<double> dz = 0.5 * (dx + std::complex<double>(0.0, 1.0) * dy);
      dbar_terms.push_back(w * std::abs(dz));
    }
  }
  const double den = eps * pairwise_sum(dbar_terms);
  if (!(den >= kDegenerate)) return std::nullopt;

  std::vector<double> diff_terms;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w = grid.half_weight(i, j);
      if (w == 0.0) continue;
      std::complex<double> smooth = 0.0;
      for (const auto& t : kernel.taps()) {
        smooth += t.weight * psi.at(i + t.di, j + t.dj);
      }
      diff_terms.push_back(w * std::abs(psi.at(i, j) - smooth));
    }
  }
  return pairwise_sum(diff_terms) / den;
}

// --- Hopf identities --------------------------------------------------------

HopfCheck hopf_check(const MapField& u, const LatticeParams& lattice,
                     const TargetManifold& target) {
  const GridShape shape = u.shape();
  const auto sweep = tension_sweep(u, lattice, target);
  const auto d = isothermal_derivatives(u, lattice);
  const QuadDiffField phi_zbar = dbar(hopf_differential(u, lattice), lattice);
  const std::size_t K = u.dim();

  std::vector<double> residual(shape.size());
  std::vector<double> magnitude(shape.size());
  const auto& tau = sweep.tension.data();
  const auto& uX = d.u_X.data();
  const auto& uY = d.u_Y.data();
  for (std::size_t n = 0; n < shape.size(); ++n) {
    double tx = 0.0;
    double ty = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
      tx += tau[n * K + c] * uX[n * K + c];
      ty += tau[n * K + c] * uY[n * K + c];
    }
    const std::complex<double> rhs(tx, -ty);
    residual[n] = std::abs(phi_zbar.data()[n] - rhs);
    magnitude[n] = std::abs(phi_zbar.data()[n]);
  }

  HopfCheck out;
  out.residual = integrate(residual, shape);
  out.dbar_l1 = integrate(magnitude, shape);
  out.tension_l2 = sweep.tension_l2;
  out.energy = energy(u, lattice);
  out.bound = std::sqrt(2.0) * out.tension_l2 * std::sqrt(out.energy);
  return out;
}

double hopf_dbar_residual(const MapField& u, const LatticeParams& lattice,
                          const TargetManifold& target) {
  return hopf_check(u, lattice, target).residual;
}

// --- Batched trials -----------------------------------------------------------

TrialSummary run_poincare_trials(const TrialSpec& spec, const LatticeParams& lattice) {
  validate(spec);
  TrialSummary summary;
  for (int k = 0; k < spec.trials; ++k) {
    const auto index = static_cast<std::uint64_t>(k);
    TrialRecord rec{index, poincare_ratio(generate_differential(spec, index), lattice),
                    false};
    rec.violated = rec.ratio && !std::isfinite(*rec.ratio);
    tally(summary, rec);
  }
  return summary;
}

TrialSummary run_mollify_trials(const MollifySpec& spec) {
  if (spec.trials < 0) throw DomainError("trial count must be non-negative");
  if (spec.eps.empty()) throw DomainError("at least one mollification radius is required");
  for (double eps : spec.eps) Mollifier(eps, 2.0 / static_cast<double>(spec.cells));
  const DiscGrid grid(spec.cells);
  TrialSummary summary;
  for (int k = 0; k < spec.trials; ++k) {
    const auto index = static_cast<std::uint64_t>(k);
    const DiscField psi = generate_disc_function(grid, spec.seed, index, spec.degree);
    for (double eps : spec.eps) {
      TrialRecord rec{index, mollification_ratio(psi, eps), false};
      rec.violated = rec.ratio && !(*rec.ratio <= kMollifierConstant);
      tally(summary, rec);
    }
  }
  return summary;
}

HopfSummary run_hopf_trials(const TargetManifold& target, const LatticeParams& lattice,
                            GridShape grid, std::uint64_t seed, int trials) {
  if (trials < 0) throw DomainError("trial count must be non-negative");
  HopfSummary summary;
  for (int k = 0; k < trials; ++k) {
    const auto index = static_cast<std::uint64_t>(k);
    const MapField u = random_smooth_map(target, grid, seed, index);
    HopfTrialRecord rec{index, hopf_check(u, lattice, target), false};
    rec.violated = rec.check.dbar_l1 > rec.check.bound;
    if (rec.check.bound > 0.0) {
      summary.max_ratio = std::max(summary.max_ratio, rec.check.dbar_l1 / rec.check.bound);
    }
    if (rec.violated) ++summary.violations;
    summary.records.push_back(rec);
  }
  return summary;
}

}  // namespace hmflow::harness
