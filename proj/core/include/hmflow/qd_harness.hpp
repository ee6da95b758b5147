#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hmflow/fields.hpp"
#include "hmflow/lattice.hpp"
#include "hmflow/target_manifold.hpp"

namespace hmflow::harness {

// Randomised empirical checks of the quadratic-differential estimates.
// Every trial is a pure function of (seed, trial index).

/// Parameters of a batch of random differentials on the torus.
struct TrialSpec {
  std::uint64_t seed = 1;
  GridShape grid{64, 64};
  int modes = 6;  ///< number of Fourier modes in the perturbation
  double amp_min = 0.1;
  double amp_max = 1.0;
  int trials = 100;
};

/// The n-th nonzero Fourier mode, ordered by |k|^2 then by angle from the
/// positive x axis; mode 0 is (1, 0).
std::pair<int, int> fourier_mode(int n);

/// psi = c0 + sum_n A_n e^{i theta_n} e^{2 pi i (k1 x + k2 y)} with c0,
/// A_n in [amp_min, amp_max] and theta_n drawn from the trial's generator.
QuadDiffField generate_differential(const TrialSpec& spec, std::uint64_t k);

/// ||psi dz^2 - P_g(psi dz^2)||_{L^1} / ||dbar(psi dz^2)||_{L^1}. Both norms
/// carry the same weight |dz^2| = 2, so the ratio equals the ratio of the
/// coefficient integrals. nullopt when the denominator is below 1e-14.
std::optional<double> poincare_ratio(const QuadDiffField& psi,
                                     const LatticeParams& lattice);

// --- Unit disc ---------------------------------------------------------------

/// Area of [x0, x1] x [y0, y1] intersected with the disc of radius R about 0.
double rect_disc_overlap(double x0, double x1, double y0, double y1, double R);

/// Uniform Cartesian grid of n x n cells covering [-1, 1]^2, padded by a
/// margin of cells on every side. Nodes are cell centres; each carries the
/// exact overlap area of its cell with the unit disc and with D_{1/2}.
class DiscGrid {
 public:
  static constexpr std::size_t kMargin = 2;

  explicit DiscGrid(std::size_t n);

  std::size_t cells() const noexcept { return n_; }
  std::size_t side() const noexcept { return n_ + 2 * kMargin; }
  double h() const noexcept { return h_; }
  std::complex<double> point(std::size_t i, std::size_t j) const noexcept;
  double disc_weight(std::size_t i, std::size_t j) const noexcept {
    return disc_[i * side() + j];
  }
  double half_weight(std::size_t i, std::size_t j) const noexcept {
    return half_[i * side() + j];
  }

 private:
  std::size_t n_;
  double h_;
  std::vector<double> disc_;
  std::vector<double> half_;
};

/// Complex samples of psi on a DiscGrid, row-major over side() x side().
struct DiscField {
  const DiscGrid* grid = nullptr;
  std::vector<std::complex<double>> values;

  std::complex<double> at(std::size_t i, std::size_t j) const {
    return values[i * grid->side() + j];
  }
};

DiscField sample_disc(const DiscGrid& grid,
                      const std::function<std::complex<double>(std::complex<double>)>& f);

/// Random polynomial sum_{j + k <= degree} c_jk z^j zbar^k for trial k.
DiscField generate_disc_function(const DiscGrid& grid, std::uint64_t seed,
                                 std::uint64_t trial, int degree = 4);

/// Radial cosine bump (1 + cos(pi r / eps)) on r < eps, normalised to unit
/// mass by the grid quadrature itself.
class Mollifier {
 public:
  Mollifier(double eps, double h);

  double eps() const noexcept { return eps_; }
  struct Tap {
    int di;
    int dj;
    double weight;
  };
  const std::vector<Tap>& taps() const noexcept { return taps_; }

 private:
  double eps_;
  std::vector<Tap> taps_;
};

/// ||psi - psi^eps||_{L^1(D_1/2)} / (eps ||psi_zbar||_{L^1(D)}), psi_zbar by
/// centered differences. nullopt when the denominator is below 1e-14.
/// DomainError unless eps is in (0, 1/2].
std::optional<double> mollification_ratio(const DiscField& psi, double eps);

/// Constant C = 2 in ||psi - psi^eps||_{L^1(D_1/2)} <= C eps ||psi_zbar||_{L^1(D)}
/// for any radial probability kernel supported in D_eps: averaging the
/// Cauchy-Pompeiu formula over circles gives the pointwise bound
/// |psi - psi^eps|(w) <= (1/pi) int_{D_eps(w)} |psi_zbar| / |z - w|, and
/// integrating in w contributes 2 pi eps.
inline constexpr double kMollifierConstant = 2.0;

// --- Hopf identities --------------------------------------------------------

struct HopfCheck {
  double residual = 0.0;   ///< integral |phi_zbar - 2 <tau, u_z>|
  double dbar_l1 = 0.0;    ///< integral |phi_zbar|
  double bound = 0.0;      ///< sqrt(2) ||tau||_{L^2} E^{1/2}
  double tension_l2 = 0.0;
  double energy = 0.0;
};

/// Evaluates both sides of phi_zbar = 2 <tau, u_z> (rho = 1 in isothermal
/// coordinates) and of ||dbar Phi||_{L^1} <= sqrt(2) ||tau||_{L^2} E^{1/2}.
HopfCheck hopf_check(const MapField& u, const LatticeParams& lattice,
                     const TargetManifold& target);

/// integral |dbar(hopf) - 2 <tau, u_z>|.
double hopf_dbar_residual(const MapField& u, const LatticeParams& lattice,
                          const TargetManifold& target);

// --- Batched trials -----------------------------------------------------------

struct TrialRecord {
  std::uint64_t index = 0;
  std::optional<double> ratio;  ///< nullopt: skipped as degenerate
  bool violated = false;
};

struct TrialSummary {
  std::vector<TrialRecord> records;
  double max_ratio = 0.0;
  int trials = 0;
  int skipped = 0;
  int violations = 0;
};

TrialSummary run_poincare_trials(const TrialSpec& spec, const LatticeParams& lattice);

struct MollifySpec {
  std::uint64_t seed = 1;
  std::size_t cells = 96;  ///< disc grid resolution across [-1, 1]
  int degree = 4;
  int trials = 100;
  std::vector<double> eps{0.05, 0.1, 0.2};
};

/// One record per (trial, eps) pair, in trial-major order. A violation is a
/// ratio above kMollifierConstant.
TrialSummary run_mollify_trials(const MollifySpec& spec);

struct HopfTrialRecord {
  std::uint64_t index = 0;
  HopfCheck check;
  bool violated = false;  ///< dbar_l1 > bound
};

struct HopfSummary {
  std::vector<HopfTrialRecord> records;
  double max_ratio = 0.0;  ///< max dbar_l1 / bound
  int violations = 0;
};

HopfSummary run_hopf_trials(const TargetManifold& target, const LatticeParams& lattice,
                            GridShape grid, std::uint64_t seed, int trials);

}  // namespace hmflow::harness
