/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "pacer/trace.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pacer {

const char* to_string(DeviceState s) {
  switch (s) {
    case DeviceState::Idle:
      return "idle";
    case DeviceState::Active:
      return "active";
    case DeviceState::Wait:
      return "wait";
    case DeviceState::Verify:
      return "verify";
  }
  return "?";
}

DeviceState device_state_from_string(const std::string& label) {
  if (label == "idle") return DeviceState::Idle;
  if (label == "active") return DeviceState::Active;
  if (label == "wait") return DeviceState::Wait;
  if (label == "verify") return DeviceState::Verify;
  throw std::invalid_argument("unknown device state label: '" + label + "'");
}

MovingAverageFilter::MovingAverageFilter(std::size_t window)
    : window_(window), refresh_in_(window) {
  if (window == 0) throw std::invalid_argument("moving-average window must be >= 1");
  ring_.assign(window_, 0.0);
}

void MovingAverageFilter::reset() {
  ring_.assign(window_, 0.0);
  head_ = 0;
  count_ = 0;
  sum_ = 0.0;
  refresh_in_ = window_;
}

double MovingAverageFilter::push(double x) {
  if (count_ < window_) {
    ring_[head_] = x;
    sum_ += x;
    ++count_;
  } else {
    sum_ += x - ring_[head_];
    ring_[head_] = x;
  }
  head_ = (head_ + 1) % window_;
  // Re-sum periodically to keep the running sum free of add/subtract drift.
  if (--refresh_in_ == 0) {
    sum_ = std::accumulate(ring_.begin(), ring_.begin() + static_cast<long>(count_), 0.0);
    refresh_in_ = window_;
  }
  return sum_ / static_cast<double>(count_);
}

double instantaneous_power_w(const Sample& s) { return s.voltage_v * s.current_a; }

namespace {

// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double term) {
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

}  // namespace

double energy_integrate_j(const CurrentTrace& t, std::size_t begin, std::size_t end) {
  if (begin > end || end > t.samples.size()) {
    throw std::out_of_range("energy range [" + std::to_string(begin) + ", " +
                            std::to_string(end) + ") exceeds trace of " +
                            std::to_string(t.samples.size()) + " samples");
  }
  CompensatedSum acc;
  for (std::size_t n = begin; n < end; ++n) {
    const Sample& s = t.samples[n];
    acc.add(s.voltage_v * s.current_a * t.sample_period_s);
  }
  return acc.value();
}

double energy_integrate_j(const CurrentTrace& t) {
  return energy_integrate_j(t, 0, t.samples.size());
}

double StateEnergy::by_state(DeviceState s) const {
  switch (s) {
    case DeviceState::Idle:
      return idle_j;
    case DeviceState::Active:
      return active_j;
    case DeviceState::Wait:
      return wait_j;
    case DeviceState::Verify:
      return verify_j;
  }
  return 0.0;
}

StateEnergy energy_by_state(const CurrentTrace& t) {
  CompensatedSum acc[kDeviceStateCount];
  for (const Sample& s : t.samples) {
    acc[static_cast<std::size_t>(s.state)].add(s.voltage_v * s.current_a * t.sample_period_s);
  }
  StateEnergy e;
  e.idle_j = acc[0].value();
  e.active_j = acc[1].value();
  e.wait_j = acc[2].value();
  e.verify_j = acc[3].value();
  e.total_j = e.idle_j + e.active_j + e.wait_j + e.verify_j;
  return e;
}

CurrentTrace filter_moving_average(const CurrentTrace& t, std::size_t window) {
  if (window == 0) throw std::invalid_argument("filter window must be >= 1");
  CurrentTrace out;
  out.sample_period_s = t.sample_period_s;
  out.samples.reserve(t.samples.size());
  MovingAverageFilter filter(window);
  for (const Sample& s : t.samples) {
    Sample f = s;
    f.current_a = filter.push(s.current_a);
    out.samples.push_back(f);
  }
  return out;
}

}  // namespace pacer
