#pragma once

#include <iosfwd>
#include <string>

#include "fragkin/config.hpp"
#include "fragkin/diagnostics.hpp"

namespace fragkin {

/// NDJSON stream: a header {"config_hash", "norm_set", "config"}, then one
/// record per sample {"t", "mass", "number", "norms", "posmin", "underflow",
/// "overflow"}, then {"abort": t} when the run stopped on blow-up.  Numbers
/// are shortest round-trip decimals, so re-emitting a series is byte-identical.
void write_series_header(std::ostream& out, const RunConfiguration& config, const std::vector<NormSpec>& norm_set);
void write_series_record(std::ostream& out, const DiagnosticsSeries& series, std::size_t k);
void write_series_abort(std::ostream& out, const DiagnosticsSeries& series);
void emit_series(std::ostream& out, const RunConfiguration& config, const DiagnosticsSeries& series);

struct StoredSeries {
  std::string config_hash;
  RunConfiguration config;
  DiagnosticsSeries series;
};

/// Reads a stream written by emit_series; throws CorruptionError on malformed input.
StoredSeries read_series(std::istream& in);

/// Flat CSV: t, mass, number, posmin, underflow, overflow, then one column per norm key.
void emit_series_csv(std::ostream& out, const DiagnosticsSeries& series);

}  // namespace fragkin
