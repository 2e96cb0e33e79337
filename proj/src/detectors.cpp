/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "pacer/detectors.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace pacer {

namespace {

struct Interval {
  double lower;
  double upper;
  int consecutive_passes;
};

// Shared successive-approximation update for the timing and energy searches.
Interval interval_update(Interval iv, double issued, VerifyResult result,
                         std::optional<double> observed, const char* unit) {
  if (result == VerifyResult::Pass) {
    iv.upper = std::max(iv.lower, issued);
    iv.consecutive_passes += 1;
    return iv;
  }
  if (observed && *observed < issued - 1e-15) {
    throw std::logic_error(std::string("observed completion below the issued guess (") + unit +
                           "): polling cannot complete before the guess expired");
  }
  if (issued >= iv.upper) {
    // Failed at or above the upper bound: the bracket went stale (drift). The
    // observed completion, when available, rebuilds it directly.
    iv.lower = std::max(iv.lower, issued);
    iv.upper = observed ? std::max(iv.lower, *observed) : iv.lower;
  } else {
    iv.lower = std::max(iv.lower, issued);
    // The observation caps the true completion only when it tightens; a
    // poll-quantized observation above the bound proves nothing new.
    if (observed) iv.upper = std::max(iv.lower, std::min(iv.upper, *observed));
  }
  iv.consecutive_passes = 0;
  return iv;
}

struct WidenScratch {
  double lower;
  double upper;
  int consecutive_passes;
  long widen_events;
};

WidenScratch interval_widen(WidenScratch w, double upper_cap, double resolution,
                            double widen_factor, int pass_probe_streak,
                            VerifyResult last_result) {
  const double width = w.upper - w.lower;
  if (resolution <= 0.0 || width >= resolution) return w;
  const double step = std::max(width, resolution) * widen_factor;
  if (last_result == VerifyResult::Fail) {
    w.upper = std::min(upper_cap, w.upper + step);
    w.widen_events += 1;
  } else if (pass_probe_streak > 0 && w.consecutive_passes >= pass_probe_streak) {
    w.lower = std::max(0.0, w.lower - step);
    w.consecutive_passes = 0;
    w.widen_events += 1;
  }
  return w;
}

}  // namespace

TimingHeuristicState pacer_t_init(double worst_case_s) {
  if (!(worst_case_s > 0.0)) throw std::invalid_argument("worst-case wait must be positive");
  TimingHeuristicState s;
  s.lower_s = 0.0;
  s.upper_s = worst_case_s;
  s.worst_case_s = worst_case_s;
  return s;
}

double pacer_t_next_guess(const TimingHeuristicState& s) {
  return 0.5 * (s.lower_s + s.upper_s);
}

TimingHeuristicState pacer_t_update(TimingHeuristicState s, double issued_guess_s,
                                    VerifyResult result,
                                    std::optional<double> observed_completion_s) {
  Interval iv{s.lower_s, s.upper_s, s.consecutive_passes};
  iv = interval_update(iv, issued_guess_s, result, observed_completion_s, "s");
  s.lower_s = iv.lower;
  s.upper_s = iv.upper;
  s.consecutive_passes = iv.consecutive_passes;
  return s;
}

TimingHeuristicState pacer_t_widen(TimingHeuristicState s, const DriftPolicy& policy,
                                   VerifyResult last_result) {
  const WidenScratch w =
      interval_widen({s.lower_s, s.upper_s, s.consecutive_passes, s.widen_events},
                     s.worst_case_s, policy.resolution_s, policy.widen_factor,
                     policy.pass_probe_streak, last_result);
  s.lower_s = w.lower;
  s.upper_s = w.upper;
  s.consecutive_passes = w.consecutive_passes;
  s.widen_events = w.widen_events;
  return s;
}

EnergyHeuristicState pacer_e_init(double worst_case_energy_j) {
  if (!(worst_case_energy_j > 0.0)) {
    throw std::invalid_argument("worst-case trial energy must be positive");
  }
  EnergyHeuristicState s;
  s.lower_j = 0.0;
  s.upper_j = worst_case_energy_j;
  return s;
}

double pacer_e_next_guess(const EnergyHeuristicState& s) {
  return 0.5 * (s.lower_j + s.upper_j);
}

EnergyHeuristicState pacer_e_begin_trial(EnergyHeuristicState s) {
  s.accumulator_j = 0.0;
  return s;
}

EnergyStepResult pacer_e_step(EnergyHeuristicState s, const Sample& sample,
                              double sample_period_s) {
  s.accumulator_j += sample.voltage_v * sample.current_a * sample_period_s;
  const bool reached = s.accumulator_j >= pacer_e_next_guess(s);
  return {s, reached};
}

EnergyHeuristicState pacer_e_update(EnergyHeuristicState s, double issued_guess_j,
                                    VerifyResult result,
                                    std::optional<double> observed_energy_j) {
  Interval iv{s.lower_j, s.upper_j, s.consecutive_passes};
  iv = interval_update(iv, issued_guess_j, result, observed_energy_j, "J");
  s.lower_j = iv.lower;
  s.upper_j = iv.upper;
  s.consecutive_passes = iv.consecutive_passes;
  return s;
}

EnergyHeuristicState pacer_e_widen(EnergyHeuristicState s, const DriftPolicy& policy,
                                   double resolution_j, VerifyResult last_result) {
  // No hard energy cap: a drifting device may need more than the calibration trial.
  const WidenScratch w =
      interval_widen({s.lower_j, s.upper_j, s.consecutive_passes, s.widen_events},
                     std::numeric_limits<double>::infinity(), resolution_j, policy.widen_factor,
                     policy.pass_probe_streak, last_result);
  s.lower_j = w.lower;
  s.upper_j = w.upper;
  s.consecutive_passes = w.consecutive_passes;
  s.widen_events = w.widen_events;
  return s;
}

CurrentHeuristicState pacer_c_init(double idle_current_a, double threshold_factor,
                                   double min_latency_s) {
  if (!(idle_current_a > 0.0)) {
    throw std::invalid_argument("idle current measurement must be positive");
  }
  if (!(threshold_factor > 1.0)) {
    throw std::invalid_argument("threshold factor must exceed 1");
  }
  if (min_latency_s < 0.0) throw std::invalid_argument("minimum latency must be >= 0");
  CurrentHeuristicState s;
  s.ict_a = idle_current_a * threshold_factor;
  s.threshold_factor = threshold_factor;
  s.min_latency_s = min_latency_s;
  return s;
}

CompletionMark pacer_c_step(const CurrentHeuristicState& s, double filtered_current_a,
                            double t_s) {
  if (t_s >= s.min_latency_s && filtered_current_a <= s.ict_a) return CompletionMark::Complete;
  return CompletionMark::Ongoing;
}

}  // namespace pacer
