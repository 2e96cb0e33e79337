/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include "pacer/trace.hpp"

namespace pacer {

/// Cost of keeping the host/device signalling path alive while polling for
/// completion. The communications term is c * f * Vdd^2.
struct OverheadModel {
  double p_mcu_w = 0.0;
  double p_mcd_w = 0.0;
  double p_match_w = 0.0;
  double p_dev_w = 0.0;
  double comm_capacitance_f = 0.0;
  double comm_frequency_hz = 0.0;
  double comm_vdd_v = 0.0;

  double comm_power_w() const {
    return comm_capacitance_f * comm_frequency_hz * comm_vdd_v * comm_vdd_v;
  }
  double total_power_w() const {
    return p_mcu_w + p_mcd_w + p_match_w + p_dev_w + comm_power_w();
  }
};

/// Voltage-domain policy applied while the device sits in its
/// voltage-independent wait state.
struct IODVSPolicy {
  double v_nominal_v = 3.3;
  double v_wait_v = 3.3;
  /// Device current at the scaled voltage relative to nominal, in (0, 1].
  double wait_current_scale = 1.0;
  /// Optional per-transition surcharge for the regulator swing (down + up).
  double transition_energy_j = 0.0;

  void validate() const;
};

struct EnergyBreakdown {
  double operation_j = 0.0;
  double slack_j = 0.0;
  double total_j = 0.0;
};

/// Splits the trace energy at the moment the operation actually completed:
/// [0, t_op) is the operation part, [t_op, t_slack_end) the slack spent
/// waiting out the worst-case figure. Requires 0 <= t_op <= t_slack_end
/// <= trace duration.
EnergyBreakdown worst_case_energy(const CurrentTrace& t, double t_op_s, double t_slack_end_s);

/// Energy of a signalled (polled) operation: trace energy over [0, t_op) plus
/// the overhead power burned for the whole of t_op.
double signaled_energy_j(const CurrentTrace& t, const OverheadModel& overhead, double t_op_s);

/// Rewrites wait-state samples to the scaled voltage domain; everything else
/// passes through untouched. Completion-feature timing is unchanged.
CurrentTrace apply_iodvs(const CurrentTrace& t, const IODVSPolicy& policy);

}  // namespace pacer
