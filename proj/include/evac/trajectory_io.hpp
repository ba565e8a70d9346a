#pragma once

// Trajectory file format (all integers little-endian):
//
//   offset  size  field
//   0       8     magic "EVACTRJ1"
//   8       4     version (1)
//   12      4     node_count
//   16      4     timesteps (frames = timesteps + 1)
//   20      4     flags (bit 0: payload of per-step payoffs follows)
//   24      8     seed
//   32      8     config digest
//   40      ...   frames: ceil(node_count / 8) bytes each; node i is bit
//                 (i % 8) of byte (i / 8), 1 = Evacuate
//   ...     ...   optional payoffs: frames x node_count IEEE-754 doubles

#include <filesystem>
#include <iosfwd>

#include "evac/dynamics.hpp"

namespace evac {

void write_trajectory(const Trajectory& trajectory, std::ostream& out);
Trajectory read_trajectory(std::istream& in);

void save_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);
Trajectory load_trajectory(const std::filesystem::path& path);

}  // namespace evac
