#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include "hmflow/fields.hpp"
#include "hmflow/flow_engine.hpp"

namespace hmflow {

// Binary formats. All integers and doubles are little-endian; doubles are
// stored as their IEEE-754 bit patterns, so a save/load round trip is exact.
//
// Map file:
//   text line  "hmflow-map 1 <rows> <cols> <dim> <target>\n"
//   rows*cols*dim float64 values, row-major, node components contiguous.
//
// Checkpoint file:
//   8 bytes    magic "HMFLOWCK"
//   u32        format version (1)
//   u64 + text configuration the run was started with
//   u64 x3     rows, cols, dim, then rows*cols*dim float64 map values
//   f64 x8     t, eta2, dt, alpha, beta, a, b, initial_energy
//   u64        steps
//   i64        last_recorded_step
//   u64        number of trace rows, then 7 float64 per row
//              (t, E, tension_l2, projhopf_l2, a, b, max_density)
//
// Gradient moments are not stored; they are recomputed from the map, which is
// deterministic.

inline constexpr char kCheckpointMagic[9] = "HMFLOWCK";
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Trace CSV header and one data line (no newline); values use %.17g.
inline constexpr const char* kTraceHeader = "t,E,tension_l2,projhopf_l2,a,b,max_density";
std::string trace_csv_line(const TraceRow& row);

void write_map(std::ostream& out, const MapField& u, const std::string& target_name);

struct LoadedMap {
  MapField u;
  std::string target_name;
};
LoadedMap read_map(std::istream& in);

struct Checkpoint {
  FlowState state;
  std::string config_text;
};

void write_checkpoint(std::ostream& out, const FlowState& state,
                      const std::string& config_text);
Checkpoint read_checkpoint(std::istream& in);

/// Writes through `fill` into a temporary sibling file, then renames it over
/// `path`, so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& fill);

void save_checkpoint(const std::filesystem::path& path, const FlowState& state,
                     const std::string& config_text);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hmflow
