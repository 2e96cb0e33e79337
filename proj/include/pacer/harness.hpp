/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pacer/detectors.hpp"
#include "pacer/devices.hpp"
#include "pacer/power.hpp"

namespace pacer {

enum class DetectorKind { Control, PacerT, PacerE, PacerC };

const char* to_string(DetectorKind k);
DetectorKind detector_kind_from_string(const std::string& label);

struct DetectorParams {
  double threshold_factor = 1.10;
  /// 0 resolves to half the smallest plausible completion time of the device.
  double min_latency_s = 0.0;
  double resolution_s = 10e-6;
  double widen_factor = 2.0;
  int pass_probe_streak = 0;
  std::size_t filter_window = 50;
};

/// Completion-time scale applied from a given trial onward (last entry wins).
struct DriftEvent {
  int from_trial = 0;
  double completion_scale = 1.0;
};

struct ExperimentConfig {
  std::string device;
  /// Custom model; when absent `device` names a builtin.
  std::optional<DeviceModel> model;
  /// Empty mix falls back to the model's default mix.
  std::vector<std::pair<std::string, int>> operation_mix;
  DetectorKind detector = DetectorKind::Control;
  DetectorParams params;
  std::optional<IODVSPolicy> iodvs;
  std::optional<OverheadModel> overhead;  // absent -> model default (or none)
  int trials = 50;
  int warmup = 20;  // trials excluded from statistics
  std::uint64_t seed = 1;
  std::vector<DriftEvent> drift;
  double poll_period_s = 100e-6;

  void validate() const;  // throws std::invalid_argument naming the field
};

struct TrialResult {
  double wait_latency_s = 0.0;
  double all_latency_s = 0.0;
  double wait_energy_j = 0.0;
  double all_energy_j = 0.0;
  bool passed = false;
  bool fail_extended = false;  // detector under-predicted; fallback polling engaged
  bool clamped = false;
};

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

struct BenchmarkReport {
  std::string device;
  std::string detector;  // control | pacer_t | pacer_e | pacer_c
  bool iodvs = false;
  std::vector<std::pair<std::string, int>> operation_mix;
  int trials = 0;
  int warmup = 0;
  std::uint64_t seed = 0;
  /// Latency rows are suppressed in comparisons for median-poll baselines.
  bool latency_reported = true;
  Stats wait_latency_s;
  Stats all_latency_s;
  Stats wait_energy_j;
  Stats all_energy_j;
  long clamp_count = 0;
  long fail_extension_count = 0;
  long widen_count = 0;
  std::vector<TrialResult> trial_log;
  /// Statistics are means over post-warmup trials; flags notable conditions
  /// (non-deterministic device under a successive-approximation detector,
  /// placeholder overhead power, ...).
  std::vector<std::string> notes;
};

/// Per-operation detector state, threaded through the trials of an experiment.
struct DetectorBank {
  std::map<std::string, TimingHeuristicState> timing;
  std::map<std::string, EnergyHeuristicState> energy;
  std::map<std::string, CurrentHeuristicState> current;
  long widen_events() const;
};

/// Runs one trial (the full operation mix once) and folds the results into the
/// detector bank. Every trial verifies Pass: when a detector under-predicts,
/// the host falls back to polling until the device reports completion.
TrialResult run_trial(const ExperimentConfig& cfg, const DeviceModel& model, DetectorBank& bank,
                      int trial_index);

BenchmarkReport run_experiment(const ExperimentConfig& cfg);

/// Resolves cfg.device / cfg.model to the model the experiment runs against.
DeviceModel resolve_model(const ExperimentConfig& cfg);

struct DiffRow {
  std::string stage;  // "wait" | "all"
  std::string metric;  // "latency_ms" | "energy_uj"
  double control = 0.0;
  double treatment = 0.0;
  double diff_pct = 0.0;  // (control - treatment) / control * 100
};

struct DiffTable {
  std::string device;
  std::string detector;
  bool iodvs = false;
  bool latency_reported = true;
  std::vector<DiffRow> rows;
};

/// Emits the wait/all x latency/energy diff grid. Only energy rows are emitted
/// for median-poll devices. Throws std::invalid_argument when the reports do
/// not share a device and operation mix.
DiffTable compare_reports(const BenchmarkReport& treatment, const BenchmarkReport& control);

struct ConvergenceRecord {
  int trial = 0;
  std::string op;
  double guess = 0.0;   // seconds (timing detector) or joules (energy detector)
  double issued = 0.0;  // delay actually issued, after scheduler quantization
  VerifyResult result = VerifyResult::Pass;
  double width_after = 0.0;
  bool widen_event = false;
};

/// Runs max_trials and logs every adaptation step of the detector.
std::vector<ConvergenceRecord> run_convergence_study(const ExperimentConfig& cfg,
                                                     int max_trials);

}  // namespace pacer
