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
#include <variant>
#include <vector>

#include "pacer/detectors.hpp"
#include "pacer/power.hpp"
#include "pacer/trace.hpp"

namespace pacer {

// Wait-phase current profiles. The activity feature ends at the true
// completion instant, after which the current sits at the idle level.
//   Constant: no completion feature (time/energy heuristics only).
//   Decaying: excess current ramps down, meeting the 110% idle threshold
//             exactly at completion (capacitive charge-style profile).
//   Stepped:  busy current until completion, then a step down to idle.
enum class WaitShape { Constant, Decaying, Stepped };

const char* to_string(WaitShape s);
WaitShape wait_shape_from_string(const std::string& label);

struct Deterministic {
  double t_s = 0.0;
};
struct NormalDist {
  double mean_s = 0.0;
  double stddev_s = 0.0;
};
struct BimodalDist {
  double t_hit_s = 0.0;
  double t_miss_s = 0.0;
  double p_miss = 0.0;
};
using CompletionDist = std::variant<Deterministic, NormalDist, BimodalDist>;

struct StateCurrents {
  double idle_a = 0.0;
  double active_a = 0.0;
  double wait_a = 0.0;
  double verify_a = 0.0;
};

struct OperationSpec {
  double worst_case_wait_s = 0.0;  // manufacturer mandatory delay
  CompletionDist actual_completion;
  double active_phase_s = 0.0;
  StateCurrents currents;
  WaitShape wait_shape = WaitShape::Stepped;
  /// Busy amplitude for the slow (cache-miss) branch of a bimodal operation;
  /// 0 means same amplitude as the fast branch.
  double wait_miss_current_a = 0.0;
  double noise_stddev_a = 0.0;
  /// Completion draws are clamped into [floor, worst_case]; clamps are counted.
  double completion_floor_s = 1e-6;
};

/// How a naive host schedules its mandatory delay for this device.
enum class ControlPolicy { WorstCase, MedianPoll };

const char* to_string(ControlPolicy p);
ControlPolicy control_policy_from_string(const std::string& label);

struct DeviceModel {
  std::string name;
  std::map<std::string, OperationSpec> operations;
  double idle_current_a = 0.0;  // reference for the current heuristic, > 0
  double supply_voltage_v = 3.3;
  double verify_phase_s = 0.0;
  double idle_lead_s = 500e-6;  // pre-operation idle window in synthesized traces
  /// Timer slop a scheduler adds to each naive worst-case delay.
  double control_quantum_s = 0.0;
  ControlPolicy control_policy = ControlPolicy::WorstCase;
  double sample_period_s = 1e-6;
  std::vector<std::pair<std::string, int>> default_mix;
  std::optional<IODVSPolicy> default_iodvs;
  std::optional<OverheadModel> default_overhead;

  const OperationSpec& operation(const std::string& op) const;
};

struct OperationOutcome {
  CurrentTrace trace;
  /// Ground truth, measured from the start of the wait phase.
  double true_completion_s = 0.0;
  bool clamped = false;
  bool miss_branch = false;
  /// Sample index of the first wait-phase sample.
  std::size_t wait_begin_index = 0;
};

/// Draws the completion time for one operation instance.
double draw_completion(const OperationSpec& op, std::uint64_t seed, bool* clamped = nullptr,
                       bool* miss_branch = nullptr);

/// Synthesizes the four-phase trace for one operation. The wait phase lasts
/// exactly host_delay (the host's choice), regardless of when the device
/// actually finished. Identical arguments give bit-identical outcomes, and a
/// shorter host_delay reproduces the longer trace's prefix sample for sample.
OperationOutcome simulate_operation(const DeviceModel& model, const std::string& op,
                                    double host_delay_s, std::uint64_t seed);

/// Status-register read at wait-phase time t.
PollStatus poll_status(const OperationOutcome& outcome, double t_s);

/// Read-back verification: passes iff the host waited out the true completion.
VerifyResult verify_operation(const OperationOutcome& outcome, double issued_wait_s);

/// Median of the completion distribution (the naive baseline for cached media).
double median_completion_s(const OperationSpec& op);

/// Conservative smallest plausible completion, used to derive minimum-latency
/// defaults for the current heuristic.
double min_completion_s(const OperationSpec& op);

/// Applies a completion-time scale factor (drift injection) to a copy.
OperationSpec scale_completion(OperationSpec op, double factor);

/// Published control-stage figures the builtin models are calibrated against.
/// Zero fields are not reported for that device.
struct CalibrationTargets {
  double control_wait_ms = 0.0;
  double control_all_ms = 0.0;
  double control_wait_uj = 0.0;
  double control_all_uj = 0.0;
};

/// Calibrated model families: serial EEPROM, NOR flash, NAND-style serial
/// flash, four micro-SD cards, and an I2C environmental sensor.
std::vector<DeviceModel> builtin_models();
const DeviceModel& builtin_model(const std::string& name);
std::vector<std::string> builtin_model_names();
const CalibrationTargets& builtin_calibration_targets(const std::string& name);

}  // namespace pacer
