/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pacer {

/// Activity phase of the peripheral, attached to every sample.
enum class DeviceState : std::uint8_t { Idle = 0, Active = 1, Wait = 2, Verify = 3 };

inline constexpr std::size_t kDeviceStateCount = 4;

const char* to_string(DeviceState s);
DeviceState device_state_from_string(const std::string& label);

/// One ADC sample: supply voltage, drawn current, annotated device state.
/// Raw current may carry noise excursions below zero; filtered current does not.
struct Sample {
  double voltage_v = 0.0;
  double current_a = 0.0;
  DeviceState state = DeviceState::Idle;
};

/// Uniformly sampled voltage/current trace. Sample n sits at time n * sample_period_s,
/// with no gaps. Immutable by convention once built; safe to share read-only.
struct CurrentTrace {
  double sample_period_s = 1e-6;  // 1 MSPS
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double time_at(std::size_t n) const { return static_cast<double>(n) * sample_period_s; }
  double duration_s() const { return time_at(samples.size()); }
};

/// Streaming windowed mean over the current channel. The warm-up prefix averages
/// over the partial window, so the filter never fabricates a low-current start.
/// Single-owner accumulator; not thread safe.
class MovingAverageFilter {
 public:
  explicit MovingAverageFilter(std::size_t window);

  /// Pushes one value and returns the mean of the most recent
  /// min(pushed, window) inputs.
  double push(double x);

  std::size_t window() const { return window_; }
  std::size_t count() const { return count_; }
  void reset();

 private:
  std::size_t window_;
  std::vector<double> ring_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  double sum_ = 0.0;
  std::size_t refresh_in_;
};

/// P = V * I for a single sample.
double instantaneous_power_w(const Sample& s);

/// Energy of the half-open sample range [begin, end): sum of V_n * I_n * T_s with
/// compensated accumulation, so results are independent of chunking to ~1e-16.
/// Empty range yields 0. Throws std::out_of_range when the range leaves the trace.
double energy_integrate_j(const CurrentTrace& t, std::size_t begin, std::size_t end);

/// Energy over the whole trace.
double energy_integrate_j(const CurrentTrace& t);

/// Per-state energy partition. total_j always equals the sum of the four parts.
struct StateEnergy {
  double idle_j = 0.0;
  double active_j = 0.0;
  double wait_j = 0.0;
  double verify_j = 0.0;
  double total_j = 0.0;

  double by_state(DeviceState s) const;
};

StateEnergy energy_by_state(const CurrentTrace& t);

/// Windowed-mean filter over the current channel; voltage and state pass through.
/// Throws std::invalid_argument for window == 0.
CurrentTrace filter_moving_average(const CurrentTrace& t, std::size_t window);

}  // namespace pacer
