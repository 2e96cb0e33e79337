/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "pacer/trace.hpp"

namespace pacer {

/// Parse failure with the 1-based line number of the offending input line.
class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct TraceFile {
  CurrentTrace trace;
  /// Ground truth carried in a comment line when the trace came from the simulator.
  std::optional<double> true_completion_s;
};

/// Writes `time_s,voltage_v,current_a,state` rows. Values are printed with enough
/// digits that a re-import is value-exact. Ground truth, when given, is embedded
/// as a `# true_completion_s=...` comment, which readers treat as metadata.
void write_trace_csv(std::ostream& out, const CurrentTrace& t,
                     std::optional<double> true_completion_s = std::nullopt);

/// Reads the format produced by write_trace_csv. Comment lines (leading '#') are
/// skipped; sample times must increase uniformly by the sampling period.
TraceFile read_trace_csv(std::istream& in);

TraceFile read_trace_csv_file(const std::string& path);
void write_trace_csv_file(const std::string& path, const CurrentTrace& t,
                          std::optional<double> true_completion_s = std::nullopt);

}  // namespace pacer
