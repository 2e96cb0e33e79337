/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pacer/harness.hpp"

namespace pacer {

/// JSON document for a single experiment (stable key order, reproducible bytes).
std::string report_to_json(const BenchmarkReport& report);

/// One published-style results table: stage rows against control, detector and
/// optional detector+IODVS columns.
struct ResultsTable {
  std::string device;
  std::string detector;
  BenchmarkReport control;
  BenchmarkReport treatment;
  std::optional<BenchmarkReport> treatment_iodvs;
};

/// Renders `Stage,Control,<detector>,Diff.[,<detector>+IODVS,Diff.]` rows with
/// latencies in ms and energies in uJ.
void write_results_csv(std::ostream& out, const ResultsTable& table);

/// Human-oriented rendering of a diff table for standard output.
void print_diff_table(std::ostream& out, const DiffTable& table);

}  // namespace pacer
