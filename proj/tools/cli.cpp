#include "cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hmflow/diagnostics.hpp"
#include "hmflow/error.hpp"
#include "hmflow/flow_engine.hpp"
#include "hmflow/hyperbolic.hpp"
#include "hmflow/map_generators.hpp"
#include "hmflow/qd_harness.hpp"
#include "hmflow/run_config.hpp"
#include "hmflow/serialization.hpp"

namespace hmflow::cli {

namespace {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot read config file '" + path.string() + "'"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Streams trace rows to trace.csv (flushed per row) and writes checkpoints.
class OutputWriter : public RunObserver {
 public:
  OutputWriter(const fs::path& dir, std::string config_text)
      : dir_(dir), config_text_(std::move(config_text)) {
    trace_.open(dir_ / "trace.csv", std::ios::trunc);
    if (!trace_) throw Error("cannot open " + (dir_ / "trace.csv").string());
    trace_ << kTraceHeader << '\n';
  }

  void on_row(const TraceRow& row) override {
    trace_ << trace_csv_line(row) << '\n';
    trace_.flush();
  }

  void on_checkpoint(const FlowState& state) override {
    save_checkpoint(dir_ / "checkpoint.bin", state, config_text_);
  }

 private:
  fs::path dir_;
  std::string config_text_;
  std::ofstream trace_;
};

int run_flow(const RunConfig& config, FlowState state, std::ostream& out,
             std::ostream& err) {
  const std::string config_text = format_config(config);
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  atomic_write(dir / "config.cfg", [&](std::ostream& o) { o << config_text; });

  const FlowSettings settings = flow_settings(config);
  const FlowEngine engine(settings);
  OutputWriter writer(dir, config_text);
  // Rows inherited from a checkpoint come first so a resumed trace matches
  // the unsplit one.
  for (const TraceRow& row : state.trace) writer.on_row(row);

  RunResult result;
  try {
    result = engine.run(std::move(state), run_control(config), &writer);
  } catch (const FlowAbort& e) {
    fmt::print(err, "runtime abort: {}\n", e.what());
    if (e.last_state()) {
      const fs::path dump = dir / "abort_state.bin";
      save_checkpoint(dump, *e.last_state(), config_text);
      fmt::print(err, "last accepted state written to {}\n", dump.string());
    }
    return kRuntimeAbort;
  }

  const FlowState& s = result.state;
  atomic_write(dir / "final_map.bin",
               [&](std::ostream& o) { write_map(o, s.u, settings.target.name()); });
  atomic_write(dir / "minima.csv", [&](std::ostream& o) {
    o << "t,gradient_norm\n";
    for (const auto& m : result.minima) fmt::print(o, "{:.17g},{:.17g}\n", m.t, m.value);
  });

  const QdNorms hopf = qd_norms(hopf_differential(s.u, s.lattice));
  const TraceRow& last = s.trace.back();
  fmt::print(out,
             "status={} t={:.17g} steps={} E={:.17g} a={:.17g} b={:.17g} "
             "tension_l2={:.17g} projhopf_l2={:.17g} hopf_l1={:.17g}\n",
             result.status == RunStatus::converged ? "converged" : "t_max", s.t, s.steps,
             last.energy, s.lattice.a(), s.lattice.b(), last.tension_l2, last.projhopf_l2,
             hopf.l1);
  return kSuccess;
}

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
            const std::optional<std::string>& out_dir, std::ostream& out,
            std::ostream& err) {
  RunConfig config = parse_config(read_text(config_path));
  if (seed) config.seed = *seed;
  if (out_dir) config.output_dir = *out_dir;
  FlowState state = initial_state(config);
  return run_flow(config, std::move(state), out, err);
}

int cmd_resume(const std::string& checkpoint_path,
               const std::optional<std::string>& config_path,
               const std::optional<std::string>& out_dir, std::ostream& out,
               std::ostream& err) {
  Checkpoint ckpt = [&] {
    try {
      return load_checkpoint(checkpoint_path);
    } catch (const Error& e) {
      throw ConfigError({std::string("cannot resume: ") + e.what()});
    }
  }();
  RunConfig config = parse_config(config_path ? read_text(*config_path) : ckpt.config_text);
  if (out_dir) config.output_dir = *out_dir;

  std::vector<std::string> mismatch;
  if (!(config.grid() == ckpt.state.u.shape())) {
    mismatch.push_back("config grid does not match the checkpoint map");
  }
  if (TargetManifold::from_name(config.target).ambient_dim() != ckpt.state.u.dim()) {
    mismatch.push_back("config target does not match the checkpoint map");
  }
  if (!mismatch.empty()) throw ConfigError(std::move(mismatch));
  return run_flow(config, std::move(ckpt.state), out, err);
}

int cmd_verify_collar(std::ostream& out) {
  const double ells[] = {0.01, 0.1, 0.5, 1.0, 2.0, 5.0};
  bool ok = true;
  fmt::print(out, "ell,X,w,integral,bound,width_gap,bound_gap\n");
  for (double ell : ells) {
    const auto geo = hyperbolic::CollarGeometry::of(ell);
    const double integral = hyperbolic::collar_density_integral(ell);
    const double bound = hyperbolic::incompressible_energy_bound(ell, 1.0);
    const double width_gap = std::abs(integral - geo.width);
    const double bound_gap = std::abs(bound - geo.half_width / (2.0 * std::numbers::pi));
    ok = ok && width_gap < 1e-8 && bound_gap < 1e-12;
    fmt::print(out, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.3g},{:.3g}\n", ell,
               geo.half_width, geo.width, integral, bound, width_gap, bound_gap);
  }
  const double small = 1e-3;
  const double ratio =
      hyperbolic::incompressible_energy_bound(small, 1.0) * small / (std::numbers::pi / 2.0);
  const bool divergence_ok = ratio >= 0.99 && ratio <= 1.01;
  fmt::print(out, "small_systole ell={} bound*ell/(pi/2)={:.17g}\n", small, ratio);
  fmt::print(out, "collar identities: {}\n", ok && divergence_ok ? "ok" : "FAILED");
  return ok && divergence_ok ? kSuccess : kVerificationFailed;
}

void print_summary(std::ostream& out, const harness::TrialSummary& s) {
  fmt::print(out, "max_ratio={:.17g} trials={} skipped={}\n", s.max_ratio, s.trials, s.skipped);
}

const char* status_of(const harness::TrialRecord& r) {
  if (!r.ratio) return "skipped";
  return r.violated ? "violated" : "ok";
}

std::string format_ratio(const std::optional<double>& r) {
  return r ? fmt::format("{:.17g}", *r) : std::string("nan");
}

struct PoincareOptions {
  harness::TrialSpec spec;
  std::size_t grid = 64;
  double lattice_a = 0.0;
  double lattice_b = 1.0;
};

int cmd_verify_poincare(PoincareOptions o, std::ostream& out) {
  o.spec.grid = {o.grid, o.grid};
  const auto summary =
      harness::run_poincare_trials(o.spec, LatticeParams::from_ab(o.lattice_a, o.lattice_b));
  fmt::print(out, "trial,ratio,status\n");
  for (const auto& r : summary.records) {
    fmt::print(out, "{},{},{}\n", r.index, format_ratio(r.ratio), status_of(r));
  }
  print_summary(out, summary);
  return summary.violations == 0 ? kSuccess : kVerificationFailed;
}

int cmd_verify_mollify(const harness::MollifySpec& spec, std::ostream& out) {
  const auto summary = harness::run_mollify_trials(spec);
  fmt::print(out, "trial,eps,ratio,status\n");
  for (std::size_t k = 0; k < summary.records.size(); ++k) {
    const auto& r = summary.records[k];
    fmt::print(out, "{},{},{},{}\n", r.index, spec.eps[k % spec.eps.size()],
               format_ratio(r.ratio), status_of(r));
  }
  print_summary(out, summary);
  return summary.violations == 0 ? kSuccess : kVerificationFailed;
}

struct HopfOptions {
  std::uint64_t seed = 1;
  int trials = 100;
  std::size_t grid = 64;
  std::string target = "flat-torus";
  double lattice_a = 0.0;
  double lattice_b = 1.0;
};

int cmd_verify_hopf(const HopfOptions& o, std::ostream& out) {
  const TargetManifold target = TargetManifold::from_name(o.target);
  const LatticeParams lattice = LatticeParams::from_ab(o.lattice_a, o.lattice_b);
  const GridShape grid{o.grid, o.grid};
  const auto summary = harness::run_hopf_trials(target, lattice, grid, o.seed, o.trials);
  fmt::print(out, "trial,residual,dbar_l1,bound,status\n");
  for (const auto& r : summary.records) {
    fmt::print(out, "{},{:.17g},{:.17g},{:.17g},{}\n", r.index, r.check.residual,
               r.check.dbar_l1, r.check.bound, r.violated ? "violated" : "ok");
  }
  const MapField coarse = random_smooth_map(target, grid, o.seed, 0);
  const MapField fine = random_smooth_map(target, {2 * o.grid, 2 * o.grid}, o.seed, 0);
  const double r1 = harness::hopf_dbar_residual(coarse, lattice, target);
  const double r2 = harness::hopf_dbar_residual(fine, lattice, target);
  fmt::print(out, "residual_{}={:.6g} residual_{}={:.6g} refinement_ratio={:.6g}\n", o.grid,
             r1, 2 * o.grid, r2, r1 / r2);
  fmt::print(out, "max_ratio={:.17g} trials={} skipped=0\n", summary.max_ratio,
             summary.records.size());
  return summary.violations == 0 ? kSuccess : kVerificationFailed;
}

struct OdeOptions {
  std::size_t grid = 32;
  std::size_t decay_grid = 128;
  double duration = 1.0;
  std::uint64_t seed = 1;
};

int cmd_verify_odes(const OdeOptions& o, std::ostream& out) {
  const TargetManifold torus = TargetManifold::flat_torus();
  const LatticeParams start = LatticeParams::from_ab(0.3, 1.4);

  const GridShape grid{o.grid, o.grid};
  const MapField u = perturb_map(covering_map(grid, 2, 1), torus, 0.05, o.seed);
  const FlowState initial = make_state(u, start);
  const double dt = 0.05 * grid.hx() * grid.hx();
  const OdeConsistency c = check_ode_consistency(initial, torus, dt, o.duration);
  const bool cross_ok = c.max_a_gap < 1e-10 && c.max_b_gap < 1e-10;
  const bool equiv_ok = c.equivariance_gap < 1e-8;
  fmt::print(out, "cross_consistency max_a_gap={:.3g} max_b_gap={:.3g} steps={} {}\n",
             c.max_a_gap, c.max_b_gap, c.steps, cross_ok ? "ok" : "FAILED");
  fmt::print(out, "equivariance t={:.6g} gap={:.3g} {}\n", c.t_end, c.equivariance_gap,
             equiv_ok ? "ok" : "FAILED");

  FlowSettings settings;
  settings.target = torus;
  settings.cfl_fraction = 0.1;
  const FlowEngine engine(settings);
  const GridShape fine{o.decay_grid, o.decay_grid};
  const DecayCheck d = check_decay_rate(make_state(covering_map(fine, 2, 1), start), engine);
  const bool decay_ok = d.relative_error < 0.05;
  fmt::print(out, "decay_rate finite_difference={:.17g} predicted={:.17g} rel_error={:.3g} {}\n",
             d.finite_difference, d.predicted, d.relative_error, decay_ok ? "ok" : "FAILED");
  return cross_ok && equiv_ok && decay_ok ? kSuccess : kVerificationFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coupled harmonic map and conformal structure flow on the torus"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "integrate the flow described by a config file");
  run->add_option("--config", config_path, "run configuration")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_dir, "override the output directory");

  std::string checkpoint_path;
  std::optional<std::string> resume_config;
  auto* resume = app.add_subcommand("resume", "continue a run from a checkpoint");
  resume->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  resume->add_option("--config", resume_config,
                     "replacement config (stop criteria, cadences, dt policy)");
  resume->add_option("--out", out_dir, "override the output directory");

  app.add_subcommand("verify-collar", "check the collar identities");

  PoincareOptions poincare;
  auto* vp = app.add_subcommand("verify-poincare", "randomised Poincare-type inequality");
  vp->add_option("--seed", poincare.spec.seed);
  vp->add_option("--trials", poincare.spec.trials)->check(CLI::NonNegativeNumber);
  vp->add_option("--grid", poincare.grid)->check(CLI::Range(4, 4096));
  vp->add_option("--modes", poincare.spec.modes)->check(CLI::NonNegativeNumber);
  vp->add_option("--amp-min", poincare.spec.amp_min);
  vp->add_option("--amp-max", poincare.spec.amp_max);
  vp->add_option("--lattice-a", poincare.lattice_a);
  vp->add_option("--lattice-b", poincare.lattice_b);

  harness::MollifySpec mollify;
  auto* vm = app.add_subcommand("verify-mollify", "randomised mollification estimate on the disc");
  vm->add_option("--seed", mollify.seed);
  vm->add_option("--trials", mollify.trials)->check(CLI::NonNegativeNumber);
  vm->add_option("--cells", mollify.cells)->check(CLI::Range(4, 4096));
  vm->add_option("--degree", mollify.degree)->check(CLI::Range(1, 16));
  vm->add_option("--eps", mollify.eps, "mollification radii")->delimiter(',');

  HopfOptions hopf;
  auto* vh = app.add_subcommand("verify-hopf-identity", "Hopf dbar identity and L1 bound");
  vh->add_option("--seed", hopf.seed);
  vh->add_option("--trials", hopf.trials)->check(CLI::NonNegativeNumber);
  vh->add_option("--grid", hopf.grid)->check(CLI::Range(4, 2048));
  vh->add_option("--target", hopf.target);
  vh->add_option("--lattice-a", hopf.lattice_a);
  vh->add_option("--lattice-b", hopf.lattice_b);

  OdeOptions odes;
  auto* vo = app.add_subcommand("verify-odes", "lattice ODE consistency and energy decay rate");
  vo->add_option("--grid", odes.grid)->check(CLI::Range(4, 1024));
  vo->add_option("--decay-grid", odes.decay_grid)->check(CLI::Range(4, 1024));
  vo->add_option("--duration", odes.duration)->check(CLI::NonNegativeNumber);
  vo->add_option("--seed", odes.seed);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, seed, out_dir, out, err);
    if (*resume) return cmd_resume(checkpoint_path, resume_config, out_dir, out, err);
    if (app.got_subcommand("verify-collar")) return cmd_verify_collar(out);
    if (*vp) return cmd_verify_poincare(poincare, out);
    if (*vm) return cmd_verify_mollify(mollify, out);
    if (*vh) return cmd_verify_hopf(hopf, out);
    if (*vo) return cmd_verify_odes(odes, out);
  } catch (const ConfigError& e) {
    fmt::print(err, "{}\n", e.what());
    return kConfigError;
  } catch (const DomainError& e) {
    fmt::print(err, "invalid argument: {}\n", e.what());
    return kConfigError;
  } catch (const FlowAbort& e) {
    fmt::print(err, "runtime abort: {}\n", e.what());
    return kRuntimeAbort;
  } catch (const ProjectionError& e) {
    fmt::print(err, "runtime abort: {}\n", e.what());
    return kRuntimeAbort;
  }
  return kConfigError;
}

}  // namespace hmflow::cli
