#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "fragkin/integrator.hpp"

namespace fragkin {

/// Binary checkpoint, little-endian:
///   "FRAGKINv1"
///   u32 dim, f64 L, u32 n, f64 xi_min, f64 xi_max, u32 m
///   f64 t, u64 step_count, f64 underflow, f64 overflow
///   f64 values[cells * m]   (space-major, size-minor)
///   u32 CRC32 of every preceding byte
void write_checkpoint(const RunState& state, std::ostream& out);
void write_checkpoint(const RunState& state, const std::string& path);

/// Throws CorruptionError on a bad magic, short file or CRC mismatch; no
/// partial state is ever returned.
RunState read_checkpoint(std::istream& in);
RunState read_checkpoint(const std::string& path);

}  // namespace fragkin
