#include "hmflow/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "hmflow/error.hpp"
#include "hmflow/map_generators.hpp"
#include "hmflow/target_manifold.hpp"

namespace hmflow {

namespace {

const std::set<std::string, std::less<>>& known_keys() {
  static const std::set<std::string, std::less<>> keys{
      "target",       "grid_rows",        "grid_cols",    "initial_map",
      "degree_p",     "degree_q",         "perturbation", "seed",
      "lattice_a",    "lattice_b",        "eta2",         "dt_policy",
      "cfl_fraction", "dt",               "t_max",        "tol_converge",
      "trace_cadence", "checkpoint_cadence", "output_dir", "lattice_coordinates",
      "guard_tolerance"};
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, std::string, std::less<>> entries)
      : entries_(std::move(entries)) {}

  std::vector<std::string>& violations() { return violations_; }

  bool has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

  void require(std::string_view key) {
    if (!has(key)) violations_.push_back("missing required key '" + std::string(key) + "'");
  }

  void text(std::string_view key, std::string& out) {
    if (auto it = entries_.find(key); it != entries_.end()) out = it->second;
  }

  template <class Int>
  void integer(std::string_view key, Int& out, Int lo, Int hi) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    const std::string& s = it->second;
    Int v{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) {
      violations_.push_back("'" + std::string(key) + "': not an integer: '" + s + "'");
      return;
    }
    if (v < lo || v > hi) {
      violations_.push_back("'" + std::string(key) + "' = " + s + " out of range [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return;
    }
    out = v;
  }

  /// `ok` receives the parsed value and returns the violation text or "".
  template <class Check>
  void real(std::string_view key, double& out, Check ok) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    const std::string& s = it->second;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v)) {
      violations_.push_back("'" + std::string(key) + "': not a finite number: '" + s + "'");
      return;
    }
    if (const std::string why = ok(v); !why.empty()) {
      violations_.push_back("'" + std::string(key) + "' = " + s + " out of range: " + why);
      return;
    }
    out = v;
  }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
  std::vector<std::string> violations_;
};

auto at_least(double lo) {
  return [lo](double v) { return v >= lo ? std::string{} : "must be >= " + fmt_double(lo); };
}
auto above(double lo) {
  return [lo](double v) { return v > lo ? std::string{} : "must be > " + fmt_double(lo); };
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  std::vector<std::string> violations;
  std::map<std::string, std::string, std::less<>> entries;

  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      violations.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      violations.push_back("line " + std::to_string(line_no) + ": empty key");
      continue;
    }
    if (!known_keys().contains(key)) {
      violations.push_back("unknown key '" + key + "'");
      continue;
    }
    if (value.empty()) {
      violations.push_back("'" + key + "': empty value");
      continue;
    }
    if (!entries.emplace(key, value).second) {
      violations.push_back("duplicate key '" + key + "'");
    }
  }

  RunConfig c;
  Reader r(std::move(entries));
  for (const char* key : {"target", "grid_rows", "grid_cols", "initial_map"}) r.require(key);

  r.text("target", c.target);
  std::optional<TargetManifold> target;
  if (r.has("target")) {
    try {
      target = TargetManifold::from_name(c.target);
    } catch (const Error& e) {
      r.violations().push_back("'target': " + std::string(e.what()));
    }
  }
  r.integer<std::size_t>("grid_rows", c.grid_rows, 4, 4096);
  r.integer<std::size_t>("grid_cols", c.grid_cols, 4, 4096);

  r.text("initial_map", c.initial_map);
  if (r.has("initial_map")) {
    if (c.initial_map != "covering" && c.initial_map != "latlong" &&
        c.initial_map != "constant") {
      r.violations().push_back("'initial_map' must be covering, latlong or constant, got '" +
                               c.initial_map + "'");
    } else if (target) {
      if (c.initial_map == "covering" && target->kind() != TargetKind::flat_torus) {
        r.violations().push_back("'initial_map' = covering requires target flat-torus");
      }
      if (c.initial_map == "latlong" &&
          (target->kind() != TargetKind::sphere || target->ambient_dim() < 3)) {
        r.violations().push_back("'initial_map' = latlong requires target sphere:K with K >= 3");
      }
    }
  }
  r.integer<int>("degree_p", c.degree_p, -64, 64);
  r.integer<int>("degree_q", c.degree_q, -64, 64);
  r.real("perturbation", c.perturbation, [](double v) {
    return v >= 0.0 && v < 1.0 ? std::string{} : std::string("must lie in [0, 1)");
  });
  r.integer<std::uint64_t>("seed", c.seed, 0, std::numeric_limits<std::uint64_t>::max());
  r.real("lattice_a", c.lattice_a, [](double) { return std::string{}; });
  r.real("lattice_b", c.lattice_b, above(kLatticeFloor));
  r.real("eta2", c.eta2, at_least(0.0));

  std::string policy = "cfl";
  r.text("dt_policy", policy);
  if (policy == "cfl") {
    c.dt_policy = DtPolicy::cfl;
  } else if (policy == "fixed") {
    c.dt_policy = DtPolicy::fixed;
  } else {
    r.violations().push_back("'dt_policy' must be cfl or fixed, got '" + policy + "'");
  }
  r.real("cfl_fraction", c.cfl_fraction, [](double v) {
    return v > 0.0 && v <= 1000.0 ? std::string{} : std::string("must lie in (0, 1000]");
  });
  r.real("dt", c.dt, above(0.0));
  if (policy == "fixed" && !r.has("dt")) {
    r.violations().push_back("'dt' is required when dt_policy = fixed");
  }
  r.real("t_max", c.t_max, at_least(0.0));
  r.real("tol_converge", c.tol_converge, at_least(0.0));
  r.integer<std::uint64_t>("trace_cadence", c.trace_cadence, 1,
                           std::numeric_limits<std::uint64_t>::max());
  r.integer<std::uint64_t>("checkpoint_cadence", c.checkpoint_cadence, 0,
                           std::numeric_limits<std::uint64_t>::max());
  r.text("output_dir", c.output_dir);

  std::string coords = "ab";
  r.text("lattice_coordinates", coords);
  if (coords == "ab") {
    c.lattice_coordinates = LatticeCoordinates::ab;
  } else if (coords == "alpha_beta") {
    c.lattice_coordinates = LatticeCoordinates::alpha_beta;
  } else {
    r.violations().push_back("'lattice_coordinates' must be ab or alpha_beta, got '" +
                             coords + "'");
  }
  r.real("guard_tolerance", c.guard_tolerance, at_least(0.0));

  violations.insert(violations.end(), r.violations().begin(), r.violations().end());
  if (!violations.empty()) throw ConfigError(std::move(violations));
  return c;
}

std::string format_config(const RunConfig& c) {
  std::string s;
  auto line = [&s](const char* key, const std::string& value) {
    s += key;
    s += " = ";
    s += value;
    s += '\n';
  };
  line("target", c.target);
  line("grid_rows", std::to_string(c.grid_rows));
  line("grid_cols", std::to_string(c.grid_cols));
  line("initial_map", c.initial_map);
  line("degree_p", std::to_string(c.degree_p));
  line("degree_q", std::to_string(c.degree_q));
  line("perturbation", fmt_double(c.perturbation));
  line("seed", std::to_string(c.seed));
  line("lattice_a", fmt_double(c.lattice_a));
  line("lattice_b", fmt_double(c.lattice_b));
  line("eta2", fmt_double(c.eta2));
  line("dt_policy", c.dt_policy == DtPolicy::cfl ? "cfl" : "fixed");
  line("cfl_fraction", fmt_double(c.cfl_fraction));
  if (c.dt_policy == DtPolicy::fixed || c.dt > 0.0) line("dt", fmt_double(c.dt));
  line("t_max", fmt_double(c.t_max));
  line("tol_converge", fmt_double(c.tol_converge));
  line("trace_cadence", std::to_string(c.trace_cadence));
  line("checkpoint_cadence", std::to_string(c.checkpoint_cadence));
  line("output_dir", c.output_dir);
  line("lattice_coordinates",
       c.lattice_coordinates == LatticeCoordinates::ab ? "ab" : "alpha_beta");
  line("guard_tolerance", fmt_double(c.guard_tolerance));
  return s;
}

bool operator==(const RunConfig& l, const RunConfig& r) {
  return format_config(l) == format_config(r);
}

FlowSettings flow_settings(const RunConfig& c) {
  FlowSettings s;
  s.target = TargetManifold::from_name(c.target);
  s.dt_policy = c.dt_policy;
  s.cfl_fraction = c.cfl_fraction;
  s.fixed_dt = c.dt;
  s.coordinates = c.lattice_coordinates;
  s.guard_tolerance = c.guard_tolerance;
  return s;
}

RunControl run_control(const RunConfig& c) {
  return {c.t_max, c.tol_converge, c.trace_cadence, c.checkpoint_cadence};
}

MapField initial_map(const RunConfig& c) {
  const TargetManifold target = TargetManifold::from_name(c.target);
  MapField u;
  if (c.initial_map == "covering") {
    u = covering_map(c.grid(), c.degree_p, c.degree_q);
  } else if (c.initial_map == "latlong") {
    u = latlong_map(c.grid(), target.ambient_dim(), c.degree_p, c.degree_q);
  } else {
    u = constant_map(c.grid(), target);
  }
  if (c.perturbation > 0.0) u = perturb_map(u, target, c.perturbation, c.seed);
  return u;
}

FlowState initial_state(const RunConfig& c) {
  return make_state(initial_map(c), LatticeParams::from_ab(c.lattice_a, c.lattice_b), c.eta2);
}

}  // namespace hmflow
