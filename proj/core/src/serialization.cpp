#include "hmflow/serialization.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hmflow/error.hpp"

namespace hmflow {

namespace {

static_assert(std::numeric_limits<double>::is_iec559, "IEEE-754 doubles required");

// Large enough for any grid the engine can step in reasonable time, small
// enough that a corrupted header cannot trigger a huge allocation.
constexpr std::uint64_t kMaxValues = std::uint64_t{1} << 32;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
  out.write(bytes.data(), bytes.size());
}

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> bytes{};
  for (int k = 0; k < 4; ++k) bytes[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_values(std::ostream& out, const std::vector<double>& values) {
  for (double v : values) put_f64(out, v);
}

std::uint64_t get_u64(std::istream& in, const char* what) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw FormatError(std::string("truncated file while reading ") + what);
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  return v;
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw FormatError(std::string("truncated file while reading ") + what);
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes[k]) << (8 * k);
  return v;
}

double get_f64(std::istream& in, const char* what) {
  return std::bit_cast<double>(get_u64(in, what));
}

std::vector<double> get_values(std::istream& in, std::uint64_t count) {
  std::vector<double> values(count);
  for (auto& v : values) v = get_f64(in, "field values");
  return values;
}

std::uint64_t checked_count(std::uint64_t rows, std::uint64_t cols, std::uint64_t dim) {
  if (rows == 0 || cols == 0 || dim == 0) throw FormatError("empty map dimensions");
  if (rows > kMaxValues / cols || rows * cols > kMaxValues / dim) {
    throw FormatError("map dimensions too large");
  }
  return rows * cols * dim;
}

}  // namespace

std::string trace_csv_line(const TraceRow& r) {
  char buf[7 * 32];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.t,
                r.energy, r.tension_l2, r.projhopf_l2, r.a, r.b, r.max_density);
  return buf;
}

void write_map(std::ostream& out, const MapField& u, const std::string& target_name) {
  if (target_name.find_first_of(" \n") != std::string::npos || target_name.empty()) {
    throw ContractViolation("target name must be a single non-empty token");
  }
  const GridShape& g = u.shape();
  out << "hmflow-map 1 " << g.rows << ' ' << g.cols << ' ' << u.dim() << ' '
      << target_name << '\n';
  put_values(out, u.data());
  if (!out) throw Error("failed to write map");
}

LoadedMap read_map(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("missing map header");
  std::istringstream fields(header);
  std::string tag;
  int version = 0;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::uint64_t dim = 0;
  std::string target;
  if (!(fields >> tag >> version >> rows >> cols >> dim >> target) || tag != "hmflow-map") {
    throw FormatError("malformed map header: " + header);
  }
  if (version != 1) throw FormatError("unsupported map version " + std::to_string(version));
  const std::uint64_t count = checked_count(rows, cols, dim);
  MapField u(GridShape{rows, cols}, dim);
  u.data() = get_values(in, count);
  return {std::move(u), target};
}

void write_checkpoint(std::ostream& out, const FlowState& state,
                      const std::string& config_text) {
  out.write(kCheckpointMagic, 8);
  put_u32(out, kCheckpointVersion);
  put_u64(out, config_text.size());
  out.write(config_text.data(), static_cast<std::streamsize>(config_text.size()));

  const GridShape& g = state.u.shape();
  put_u64(out, g.rows);
  put_u64(out, g.cols);
  put_u64(out, state.u.dim());
  put_values(out, state.u.data());

  for (double v : {state.t, state.eta2, state.dt, state.lattice.alpha(),
                   state.lattice.beta(), state.lattice.a(), state.lattice.b(),
                   state.initial_energy}) {
    put_f64(out, v);
  }
  put_u64(out, state.steps);
  put_u64(out, static_cast<std::uint64_t>(state.last_recorded_step));
  put_u64(out, state.trace.size());
  for (const TraceRow& r : state.trace) {
    for (double v : {r.t, r.energy, r.tension_l2, r.projhopf_l2, r.a, r.b, r.max_density}) {
      put_f64(out, v);
    }
  }
  if (!out) throw Error("failed to write checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[8] = {};
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw FormatError("not a checkpoint file (bad magic)");
  }
  const std::uint32_t version = get_u32(in, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint64_t text_len = get_u64(in, "config length");
  if (text_len > (std::uint64_t{1} << 24)) throw FormatError("embedded config too large");
  std::string text(text_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(text_len));
  if (!in) throw FormatError("truncated file while reading embedded config");

  const std::uint64_t rows = get_u64(in, "rows");
  const std::uint64_t cols = get_u64(in, "cols");
  const std::uint64_t dim = get_u64(in, "dim");
  const std::uint64_t count = checked_count(rows, cols, dim);
  MapField u(GridShape{rows, cols}, dim);
  u.data() = get_values(in, count);

  const double t = get_f64(in, "t");
  const double eta2 = get_f64(in, "eta2");
  const double dt = get_f64(in, "dt");
  const double alpha = get_f64(in, "alpha");
  const double beta = get_f64(in, "beta");
  const double a = get_f64(in, "a");
  const double b = get_f64(in, "b");
  const double e0 = get_f64(in, "initial energy");

  FlowState state;
  try {
    state = make_state(std::move(u), LatticeParams::from_stored(alpha, beta, a, b), eta2);
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid checkpoint contents: ") + e.what());
  }
  state.t = t;
  state.dt = dt;
  state.initial_energy = e0;
  state.steps = get_u64(in, "steps");
  state.last_recorded_step = static_cast<std::int64_t>(get_u64(in, "last recorded step"));
  const std::uint64_t n_rows = get_u64(in, "trace length");
  if (n_rows > kMaxValues) throw FormatError("trace too long");
  state.trace.reserve(n_rows);
  for (std::uint64_t k = 0; k < n_rows; ++k) {
    TraceRow r;
    r.t = get_f64(in, "trace");
    r.energy = get_f64(in, "trace");
    r.tension_l2 = get_f64(in, "trace");
    r.projhopf_l2 = get_f64(in, "trace");
    r.a = get_f64(in, "trace");
    r.b = get_f64(in, "trace");
    r.max_density = get_f64(in, "trace");
    state.trace.push_back(r);
  }
  return {std::move(state), std::move(text)};
}

void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& fill) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    fill(out);
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_checkpoint(const std::filesystem::path& path, const FlowState& state,
                     const std::string& config_text) {
  atomic_write(path, [&](std::ostream& out) { write_checkpoint(out, state, config_text); });
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace hmflow
