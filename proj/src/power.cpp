/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "pacer/power.hpp"

#include <cmath>
#include <stdexcept>

namespace pacer {

void IODVSPolicy::validate() const {
  if (!(v_nominal_v > 0.0) || !(v_wait_v > 0.0) || v_wait_v > v_nominal_v) {
    throw std::invalid_argument("IODVS requires 0 < v_wait_v <= v_nominal_v");
  }
  if (!(wait_current_scale > 0.0) || wait_current_scale > 1.0) {
    throw std::invalid_argument("IODVS wait_current_scale must be in (0, 1]");
  }
  if (transition_energy_j < 0.0) {
    throw std::invalid_argument("IODVS transition energy must be >= 0");
  }
}

namespace {

std::size_t index_for_time(const CurrentTrace& t, double time_s) {
  const auto idx = static_cast<long long>(std::llround(time_s / t.sample_period_s));
  if (idx < 0) return 0;
  const auto n = static_cast<std::size_t>(idx);
  return n > t.samples.size() ? t.samples.size() : n;
}

}  // namespace

EnergyBreakdown worst_case_energy(const CurrentTrace& t, double t_op_s, double t_slack_end_s) {
  if (t_op_s < 0.0 || t_op_s > t_slack_end_s || t_slack_end_s > t.duration_s() + 0.5 * t.sample_period_s) {
    throw std::invalid_argument("worst_case_energy requires 0 <= t_op <= t_slack_end <= duration");
  }
  const std::size_t n_op = index_for_time(t, t_op_s);
  const std::size_t n_end = index_for_time(t, t_slack_end_s);
  EnergyBreakdown e;
  e.operation_j = energy_integrate_j(t, 0, n_op);
  e.slack_j = energy_integrate_j(t, n_op, n_end);
  e.total_j = e.operation_j + e.slack_j;
  return e;
}

double signaled_energy_j(const CurrentTrace& t, const OverheadModel& overhead, double t_op_s) {
  if (t_op_s < 0.0 || t_op_s > t.duration_s() + 0.5 * t.sample_period_s) {
    throw std::invalid_argument("signaled_energy requires 0 <= t_op <= trace duration");
  }
  const std::size_t n_op = index_for_time(t, t_op_s);
  return energy_integrate_j(t, 0, n_op) + overhead.total_power_w() * t_op_s;
}

CurrentTrace apply_iodvs(const CurrentTrace& t, const IODVSPolicy& policy) {
  policy.validate();
  CurrentTrace out = t;
  for (Sample& s : out.samples) {
    if (s.state == DeviceState::Wait) {
      s.voltage_v = policy.v_wait_v;
      s.current_a *= policy.wait_current_scale;
    }
  }
  return out;
}

}  // namespace pacer
