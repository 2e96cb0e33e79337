/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <optional>

#include "pacer/trace.hpp"

namespace pacer {

/// Outcome of the read-back check after the host stopped waiting.
enum class VerifyResult { Pass, Fail };

/// Status-register answer while an operation is in flight.
enum class PollStatus { Busy, Complete };

/// PACER-C per-sample verdict.
enum class CompletionMark { Ongoing, Complete };

/// Re-expansion policy for collapsed intervals, used to track slow drift.
struct DriftPolicy {
  double resolution_s = 10e-6;  // interval width below which the search has settled
  double widen_factor = 2.0;
  /// Consecutive passes on a collapsed interval before probing downward.
  /// 0 disables the probe (each probe costs a guaranteed fallback poll).
  int pass_probe_streak = 0;
};

// ---------------------------------------------------------------------------
// PACER-T: successive approximation over wait time.
// ---------------------------------------------------------------------------

/// Adaptive bounds of the timing search. lower <= upper <= worst_case holds
/// after every operation.
struct TimingHeuristicState {
  double lower_s = 0.0;
  double upper_s = 0.0;
  double worst_case_s = 0.0;
  int consecutive_passes = 0;
  long widen_events = 0;
};

TimingHeuristicState pacer_t_init(double worst_case_s);

/// Delay to issue for the next operation: the interval midpoint.
double pacer_t_next_guess(const TimingHeuristicState& s);

/// Folds one trial result into the bounds.
///   Pass: the upper half of the interval is discarded (upper := issued guess).
///   Fail: lower := issued guess; when the host kept waiting and observed the
///         actual completion, the upper bound tightens to it. An observation
///         above a stale upper bound rebuilds the bracket (drift recovery).
/// Throws std::logic_error when a Fail reports completion before the issued
/// guess expired, which polling cannot produce.
TimingHeuristicState pacer_t_update(TimingHeuristicState s, double issued_guess_s,
                                    VerifyResult result,
                                    std::optional<double> observed_completion_s = std::nullopt);

/// Re-opens a collapsed interval: upward after a Fail (bounded by worst case),
/// downward after a sustained pass streak when the policy enables probing.
TimingHeuristicState pacer_t_widen(TimingHeuristicState s, const DriftPolicy& policy,
                                   VerifyResult last_result);

// ---------------------------------------------------------------------------
// PACER-E: the same mechanics over accumulated energy.
// ---------------------------------------------------------------------------

struct EnergyHeuristicState {
  double lower_j = 0.0;
  double upper_j = 0.0;
  double accumulator_j = 0.0;  // running trial integral, nondecreasing
  int consecutive_passes = 0;
  long widen_events = 0;
};

/// worst_case_energy_j comes from one full-length calibration trial.
EnergyHeuristicState pacer_e_init(double worst_case_energy_j);

double pacer_e_next_guess(const EnergyHeuristicState& s);

/// Clears the accumulator at the start of a trial.
EnergyHeuristicState pacer_e_begin_trial(EnergyHeuristicState s);

struct EnergyStepResult {
  EnergyHeuristicState state;
  bool reached;  // accumulator crossed the current guess; stop waiting and verify
};

/// Multiply-accumulates one sample into the trial integral.
EnergyStepResult pacer_e_step(EnergyHeuristicState s, const Sample& sample,
                              double sample_period_s);

EnergyHeuristicState pacer_e_update(EnergyHeuristicState s, double issued_guess_j,
                                    VerifyResult result,
                                    std::optional<double> observed_energy_j = std::nullopt);

EnergyHeuristicState pacer_e_widen(EnergyHeuristicState s, const DriftPolicy& policy,
                                   double resolution_j, VerifyResult last_result);

// ---------------------------------------------------------------------------
// PACER-C: return-to-idle recognition.
// ---------------------------------------------------------------------------

struct CurrentHeuristicState {
  double ict_a = 0.0;  // idle current threshold
  double threshold_factor = 1.10;
  double min_latency_s = 0.0;
};

/// ICT = idle measurement * threshold factor. Throws std::invalid_argument for a
/// non-positive idle measurement or a factor <= 1.
CurrentHeuristicState pacer_c_init(double idle_current_a, double threshold_factor,
                                   double min_latency_s);

/// Complete iff the minimum latency has elapsed and the filtered current has
/// returned to the threshold. t_s is time since the operation was issued.
CompletionMark pacer_c_step(const CurrentHeuristicState& s, double filtered_current_a,
                            double t_s);

}  // namespace pacer
