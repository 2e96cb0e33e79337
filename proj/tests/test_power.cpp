/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pacer/devices.hpp"
#include "pacer/power.hpp"

using namespace pacer;

namespace {

CurrentTrace constant_power_trace(std::size_t n, double voltage, double current) {
  CurrentTrace t;
  t.samples.assign(n, Sample{voltage, current, DeviceState::Wait});
  return t;
}

CurrentTrace phased_trace(std::size_t n_each, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> cur(0.0, 0.02);
  CurrentTrace t;
  const DeviceState phases[4] = {DeviceState::Idle, DeviceState::Active, DeviceState::Wait,
                                 DeviceState::Verify};
  for (DeviceState st : phases) {
    for (std::size_t i = 0; i < n_each; ++i) t.samples.push_back(Sample{3.3, cur(eng), st});
  }
  return t;
}

}  // namespace

TEST_CASE("slack part vanishes when the operation fills the window") {
  const CurrentTrace t = constant_power_trace(5000, 2.0, 0.005);
  const EnergyBreakdown e = worst_case_energy(t, 3e-3, 3e-3);
  CHECK(e.slack_j == 0.0);
  CHECK(e.total_j == doctest::Approx(e.operation_j));
}

TEST_CASE("constant-power breakdown matches the closed form") {
  // 10 mW for 5 ms, split at 3 ms.
  const CurrentTrace t = constant_power_trace(5000, 2.0, 0.005);
  const EnergyBreakdown e = worst_case_energy(t, 3e-3, 5e-3);
  CHECK(e.operation_j == doctest::Approx(30e-6).epsilon(1e-9));
  CHECK(e.slack_j == doctest::Approx(20e-6).epsilon(1e-9));
  CHECK(e.total_j == doctest::Approx(50e-6).epsilon(1e-9));
}

TEST_CASE("the total is invariant under the split point") {
  const CurrentTrace t = phased_trace(2000, 3);
  const double end = t.duration_s();
  const double whole = worst_case_energy(t, 0.0, end).total_j;
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> split(0.0, end);
  for (int i = 0; i < 30; ++i) {
    const EnergyBreakdown e = worst_case_energy(t, split(eng), end);
    CHECK(e.total_j == doctest::Approx(whole).epsilon(1e-12));
  }
}

TEST_CASE("interval ordering violations are rejected") {
  const CurrentTrace t = constant_power_trace(100, 3.3, 0.001);
  CHECK_THROWS_AS(worst_case_energy(t, 60e-6, 40e-6), std::invalid_argument);
  CHECK_THROWS_AS(worst_case_energy(t, -1e-6, 40e-6), std::invalid_argument);
  CHECK_THROWS_AS(worst_case_energy(t, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("zero overhead reduces the signalled energy to the operation part") {
  const CurrentTrace t = phased_trace(1000, 7);
  const OverheadModel zero;
  const double t_op = 2.5e-3;
  CHECK(signaled_energy_j(t, zero, t_op) ==
        doctest::Approx(worst_case_energy(t, t_op, t.duration_s()).operation_j));
}

TEST_CASE("communications overhead follows c * f * Vdd^2") {
  OverheadModel m;
  m.comm_capacitance_f = 100e-12;
  m.comm_frequency_hz = 1e6;
  m.comm_vdd_v = 3.3;
  CHECK(m.comm_power_w() == doctest::Approx(1.089e-3).epsilon(1e-12));
  m.comm_frequency_hz = 1e3;
  CHECK(m.comm_power_w() == doctest::Approx(1.089e-6).epsilon(1e-12));
}

TEST_CASE("signalling can cost more than waiting out the worst case") {
  // Slack power is 10 mW; overhead twice that makes polling the worse deal.
  const CurrentTrace t = constant_power_trace(5000, 2.0, 0.005);
  const double t_op = 3e-3;
  const EnergyBreakdown wc = worst_case_energy(t, t_op, t.duration_s());
  OverheadModel m;
  m.p_mcu_w = 0.020;
  const double sig = signaled_energy_j(t, m, t_op);
  CHECK(sig > wc.total_j);
}

TEST_CASE("signalled energy grows with every overhead component") {
  const CurrentTrace t = phased_trace(500, 11);
  const double t_op = 1.5e-3;
  OverheadModel m{0.01, 0.002, 0.001, 0.0005, 100e-12, 1e6, 3.3};
  const double base = signaled_energy_j(t, m, t_op);
  const auto bump = [&](auto member) {
    OverheadModel b = m;
    b.*member += 0.001;
    return signaled_energy_j(t, b, t_op);
  };
  CHECK(bump(&OverheadModel::p_mcu_w) > base);
  CHECK(bump(&OverheadModel::p_mcd_w) > base);
  CHECK(bump(&OverheadModel::p_match_w) > base);
  CHECK(bump(&OverheadModel::p_dev_w) > base);
  OverheadModel b = m;
  b.comm_frequency_hz *= 2;
  CHECK(signaled_energy_j(t, b, t_op) > base);
}

TEST_CASE("identity IODVS policy changes nothing") {
  const CurrentTrace t = phased_trace(800, 13);
  const IODVSPolicy policy{3.3, 3.3, 1.0, 0.0};
  const CurrentTrace out = apply_iodvs(t, policy);
  REQUIRE(out.size() == t.size());
  for (std::size_t n = 0; n < t.size(); ++n) {
    CHECK(out.samples[n].voltage_v == t.samples[n].voltage_v);
    CHECK(out.samples[n].current_a == t.samples[n].current_a);
  }
}

TEST_CASE("IODVS preserves shape and scales only the wait partition") {
  const CurrentTrace t = phased_trace(1500, 17);
  const IODVSPolicy policy{3.3, 2.4, 0.9, 0.0};
  const CurrentTrace out = apply_iodvs(t, policy);

  REQUIRE(out.size() == t.size());
  CHECK(out.sample_period_s == t.sample_period_s);
  for (std::size_t n = 0; n < t.size(); ++n) {
    CHECK(out.samples[n].state == t.samples[n].state);
    if (t.samples[n].state != DeviceState::Wait) {
      CHECK(out.samples[n].voltage_v == t.samples[n].voltage_v);
      CHECK(out.samples[n].current_a == t.samples[n].current_a);
    }
  }

  const StateEnergy before = energy_by_state(t);
  const StateEnergy after = energy_by_state(out);
  const double expect = before.wait_j * (policy.v_wait_v / policy.v_nominal_v) *
                        policy.wait_current_scale;
  CHECK(std::abs(after.wait_j - expect) <= 1e-9 * std::abs(expect));
  CHECK(after.idle_j == doctest::Approx(before.idle_j));
  CHECK(after.active_j == doctest::Approx(before.active_j));
  CHECK(after.verify_j == doctest::Approx(before.verify_j));
}

TEST_CASE("a naive EEPROM transaction costs the published total") {
  // Transaction-only trace (no pre-operation idle window).
  DeviceModel model = builtin_model("eeprom");
  model.idle_lead_s = 0.0;
  const OperationSpec& op = model.operation("page_write");
  const double host_delay = op.worst_case_wait_s + model.control_quantum_s;
  const OperationOutcome o = simulate_operation(model, "page_write", host_delay, 4);
  const EnergyBreakdown e = worst_case_energy(
      o.trace, op.active_phase_s + o.true_completion_s, o.trace.duration_s());
  CHECK(e.total_j * 1e6 == doctest::Approx(53.05).epsilon(0.02));
  CHECK(e.slack_j < e.operation_j);
}

TEST_CASE("invalid IODVS policies are rejected") {
  CHECK_THROWS_AS(IODVSPolicy({3.3, 3.4, 1.0, 0.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(IODVSPolicy({3.3, 2.5, 0.0, 0.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(IODVSPolicy({3.3, 2.5, 1.2, 0.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(IODVSPolicy({3.3, 2.5, 1.0, -1.0}).validate(), std::invalid_argument);
}
