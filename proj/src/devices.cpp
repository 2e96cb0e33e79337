/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "pacer/devices.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "pacer/rng.hpp"

namespace pacer {

const char* to_string(WaitShape s) {
  switch (s) {
    case WaitShape::Constant:
      return "constant";
    case WaitShape::Decaying:
      return "decaying";
    case WaitShape::Stepped:
      return "stepped";
  }
  return "?";
}

WaitShape wait_shape_from_string(const std::string& label) {
  if (label == "constant") return WaitShape::Constant;
  if (label == "decaying") return WaitShape::Decaying;
  if (label == "stepped") return WaitShape::Stepped;
  throw std::invalid_argument("unknown wait shape: '" + label + "'");
}

const char* to_string(ControlPolicy p) {
  return p == ControlPolicy::WorstCase ? "worst_case" : "median_poll";
}

ControlPolicy control_policy_from_string(const std::string& label) {
  if (label == "worst_case") return ControlPolicy::WorstCase;
  if (label == "median_poll") return ControlPolicy::MedianPoll;
  throw std::invalid_argument("unknown control policy: '" + label + "'");
}

const OperationSpec& DeviceModel::operation(const std::string& op) const {
  const auto it = operations.find(op);
  if (it == operations.end()) {
    std::string known;
    for (const auto& [name, spec] : operations) {
      (void)spec;
      if (!known.empty()) known += ", ";
      known += name;
    }
    throw std::out_of_range("device '" + name + "' has no operation '" + op +
                            "' (available: " + known + ")");
  }
  return it->second;
}

namespace {

double normal_draw(std::mt19937_64& eng, double mean, double stddev) {
  const double u1 = unit_uniform(eng());
  const double u2 = unit_uniform(eng());
  return mean + stddev * std::sqrt(-2.0 * std::log(u1)) *
                    std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace

double draw_completion(const OperationSpec& op, std::uint64_t seed, bool* clamped,
                       bool* miss_branch) {
  std::mt19937_64 eng(seed);
  double t = 0.0;
  bool miss = false;
  if (const auto* det = std::get_if<Deterministic>(&op.actual_completion)) {
    t = det->t_s;
  } else if (const auto* norm = std::get_if<NormalDist>(&op.actual_completion)) {
    t = normal_draw(eng, norm->mean_s, norm->stddev_s);
  } else {
    const auto& bi = std::get<BimodalDist>(op.actual_completion);
    miss = unit_uniform(eng()) <= bi.p_miss;
    t = miss ? bi.t_miss_s : bi.t_hit_s;
  }
  bool was_clamped = false;
  if (t > op.worst_case_wait_s) {
    t = op.worst_case_wait_s;
    was_clamped = true;
  }
  if (t < op.completion_floor_s) {
    t = op.completion_floor_s;
    was_clamped = true;
  }
  if (clamped) *clamped = was_clamped;
  if (miss_branch) *miss_branch = miss;
  return t;
}

namespace {

double wait_current_at(const OperationSpec& op, bool miss, double tau_s, double t_true_s) {
  const double idle = op.currents.idle_a;
  if (op.wait_shape == WaitShape::Constant) return op.currents.wait_a;
  if (tau_s >= t_true_s) return idle;
  switch (op.wait_shape) {
    case WaitShape::Stepped:
      return (miss && op.wait_miss_current_a > 0.0) ? op.wait_miss_current_a : op.currents.wait_a;
    case WaitShape::Decaying: {
      // Excess over idle ramps from the initial wait level down to the 110%
      // threshold, meeting it exactly at the completion instant.
      const double w0 = op.currents.wait_a - idle;
      const double w1 = 0.1 * idle;
      return idle + w0 + (w1 - w0) * (tau_s / t_true_s);
    }
    case WaitShape::Constant:
      break;
  }
  return op.currents.wait_a;
}

void validate_operation(const DeviceModel& model, const OperationSpec& op) {
  if (!(op.worst_case_wait_s > 0.0)) {
    throw std::invalid_argument("operation worst-case wait must be positive");
  }
  const StateCurrents& c = op.currents;
  if (c.idle_a < 0 || c.active_a < 0 || c.wait_a < 0 || c.verify_a < 0) {
    throw std::invalid_argument("state currents must be >= 0");
  }
  if (const auto* bi = std::get_if<BimodalDist>(&op.actual_completion)) {
    if (bi->p_miss < 0.0 || bi->p_miss > 1.0) {
      throw std::invalid_argument("bimodal p_miss must be in [0, 1]");
    }
  }
  if (!(model.sample_period_s > 0.0)) {
    throw std::invalid_argument("sample period must be positive");
  }
}

}  // namespace

OperationOutcome simulate_operation(const DeviceModel& model, const std::string& op_name,
                                    double host_delay_s, std::uint64_t seed) {
  const OperationSpec& op = model.operation(op_name);
  validate_operation(model, op);
  if (host_delay_s < 0.0) throw std::invalid_argument("host delay must be >= 0");

  OperationOutcome out;
  out.true_completion_s = draw_completion(op, seed, &out.clamped, &out.miss_branch);

  const double ts = model.sample_period_s;
  const auto n_of = [ts](double seconds) {
    return static_cast<std::size_t>(std::llround(seconds / ts));
  };
  const std::size_t n_idle = n_of(model.idle_lead_s);
  const std::size_t n_active = n_of(op.active_phase_s);
  const std::size_t n_wait = n_of(host_delay_s);
  const std::size_t n_verify = n_of(model.verify_phase_s);

  out.wait_begin_index = n_idle + n_active;

  CurrentTrace& trace = out.trace;
  trace.sample_period_s = ts;
  trace.samples.resize(n_idle + n_active + n_wait + n_verify);

  const std::uint64_t noise_seed = mix_seed(seed, 0x6E015EULL);
  const bool noisy = op.noise_stddev_a > 0.0;

  for (std::size_t n = 0; n < trace.samples.size(); ++n) {
    Sample& s = trace.samples[n];
    s.voltage_v = model.supply_voltage_v;
    if (n < n_idle) {
      s.state = DeviceState::Idle;
      s.current_a = op.currents.idle_a;
    } else if (n < n_idle + n_active) {
      s.state = DeviceState::Active;
      s.current_a = op.currents.active_a;
    } else if (n < n_idle + n_active + n_wait) {
      s.state = DeviceState::Wait;
      const double tau = static_cast<double>(n - out.wait_begin_index) * ts;
      s.current_a = wait_current_at(op, out.miss_branch, tau, out.true_completion_s);
    } else {
      s.state = DeviceState::Verify;
      s.current_a = op.currents.verify_a;
    }
    if (noisy) {
      s.current_a += op.noise_stddev_a * gaussian_at(noise_seed, n);
    }
  }
  return out;
}

PollStatus poll_status(const OperationOutcome& outcome, double t_s) {
  if (t_s < 0.0) throw std::invalid_argument("poll time must be >= 0");
  return t_s >= outcome.true_completion_s ? PollStatus::Complete : PollStatus::Busy;
}

VerifyResult verify_operation(const OperationOutcome& outcome, double issued_wait_s) {
  if (issued_wait_s < 0.0) throw std::invalid_argument("issued wait must be >= 0");
  return issued_wait_s >= outcome.true_completion_s ? VerifyResult::Pass : VerifyResult::Fail;
}

double median_completion_s(const OperationSpec& op) {
  if (const auto* det = std::get_if<Deterministic>(&op.actual_completion)) return det->t_s;
  if (const auto* norm = std::get_if<NormalDist>(&op.actual_completion)) {
    return std::clamp(norm->mean_s, op.completion_floor_s, op.worst_case_wait_s);
  }
  const auto& bi = std::get<BimodalDist>(op.actual_completion);
  return bi.p_miss <= 0.5 ? bi.t_hit_s : bi.t_miss_s;
}

double min_completion_s(const OperationSpec& op) {
  double t = 0.0;
  if (const auto* det = std::get_if<Deterministic>(&op.actual_completion)) {
    t = det->t_s;
  } else if (const auto* norm = std::get_if<NormalDist>(&op.actual_completion)) {
    t = norm->mean_s - 3.0 * norm->stddev_s;
  } else {
    const auto& bi = std::get<BimodalDist>(op.actual_completion);
    t = std::min(bi.t_hit_s, bi.t_miss_s);
  }
  return std::clamp(t, op.completion_floor_s, op.worst_case_wait_s);
}

OperationSpec scale_completion(OperationSpec op, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("completion scale must be positive");
  if (auto* det = std::get_if<Deterministic>(&op.actual_completion)) {
    det->t_s *= factor;
  } else if (auto* norm = std::get_if<NormalDist>(&op.actual_completion)) {
    norm->mean_s *= factor;
    norm->stddev_s *= factor;
  } else {
    auto& bi = std::get<BimodalDist>(op.actual_completion);
    bi.t_hit_s *= factor;
    bi.t_miss_s *= factor;
  }
  return op;
}

// ---------------------------------------------------------------------------
// Builtin models. Currents, durations and distributions are calibrated so a
// 50-trial control run reproduces the published control figures; see the
// calibration targets below and the `calibrate` CLI command.
// ---------------------------------------------------------------------------

namespace {

DeviceModel make_eeprom() {
  DeviceModel m;
  m.name = "eeprom";
  m.idle_current_a = 1.75e-3;
  m.supply_voltage_v = 3.3;
  m.verify_phase_s = 0.43e-3;
  m.control_quantum_s = 50e-6;
  OperationSpec op;
  op.worst_case_wait_s = 5e-3;
  op.actual_completion = Deterministic{3.505e-3};
  op.active_phase_s = 0.5e-3;
  op.currents = {1.75e-3, 2.5e-3, 3.28e-3, 1.47e-3};
  op.wait_shape = WaitShape::Stepped;
  op.noise_stddev_a = 50e-6;
  m.operations["page_write"] = op;
  m.default_mix = {{"page_write", 1}};
  m.default_iodvs = IODVSPolicy{3.3, 2.4238, 1.0, 0.0};
  return m;
}

DeviceModel make_nor_flash() {
  DeviceModel m;
  m.name = "nor_flash";
  m.idle_current_a = 1.732e-3;
  m.supply_voltage_v = 3.3;
  m.verify_phase_s = 0.9556e-3;
  m.control_quantum_s = 174.444e-6;
  OperationSpec erase;
  erase.worst_case_wait_s = 150e-3;
  erase.actual_completion = Deterministic{65e-3};
  erase.active_phase_s = 0.5e-3;
  erase.currents = {1.732e-3, 6e-3, 5e-3, 2.306e-3};
  erase.wait_shape = WaitShape::Stepped;
  erase.noise_stddev_a = 0.12e-3;
  m.operations["subsector_erase"] = erase;
  OperationSpec pw = erase;
  pw.worst_case_wait_s = 10e-3;
  pw.actual_completion = Deterministic{0.5585e-3};
  pw.active_phase_s = 0.4e-3;
  pw.currents.wait_a = 9.47e-3;
  m.operations["page_write"] = pw;
  m.default_mix = {{"subsector_erase", 1}, {"page_write", 8}};
  m.default_iodvs = IODVSPolicy{3.3, 2.7786, 1.0, 0.0};
  return m;
}

DeviceModel make_nand_flash() {
  DeviceModel m;
  m.name = "nand_flash";
  m.idle_current_a = 1.949e-3;
  m.supply_voltage_v = 3.3;
  m.verify_phase_s = 0.809e-3;
  m.control_quantum_s = 201.25e-6;
  OperationSpec op;
  op.worst_case_wait_s = 7e-3;
  op.actual_completion = Deterministic{2.4075e-3};
  op.active_phase_s = 0.9e-3;
  op.currents = {1.949e-3, 5e-3, 12.69e-3, 3.563e-3};
  op.wait_shape = WaitShape::Stepped;
  op.noise_stddev_a = 0.1e-3;
  m.operations["page_write"] = op;
  m.default_mix = {{"page_write", 8}};
  m.default_iodvs = IODVSPolicy{3.3, 2.394, 1.0, 0.0};
  return m;
}

DeviceModel make_hih6130() {
  DeviceModel m;
  m.name = "hih6130";
  m.idle_current_a = 1.878e-3;
  m.supply_voltage_v = 3.3;
  m.verify_phase_s = 0.37e-3;
  m.control_quantum_s = 270e-6;
  OperationSpec op;
  op.worst_case_wait_s = 45e-3;
  op.actual_completion = NormalDist{31.44e-3, 40e-6};
  op.completion_floor_s = 25e-3;
  op.active_phase_s = 0.35e-3;
  op.currents = {1.878e-3, 2.2e-3, 2.566e-3, 1.646e-3};
  op.wait_shape = WaitShape::Decaying;
  op.noise_stddev_a = 50e-6;
  m.operations["measure"] = op;
  m.default_mix = {{"measure", 1}};
  m.default_iodvs = IODVSPolicy{3.3, 2.33, 1.0, 0.0};
  return m;
}

// The four micro-SD profiles share the transfer phases and the polling
// overhead of the host fixture; they differ in completion statistics and
// busy amplitude.
DeviceModel make_sd_base(const std::string& name) {
  DeviceModel m;
  m.name = name;
  m.idle_current_a = 6e-3;
  m.supply_voltage_v = 3.3;
  m.verify_phase_s = 1.0e-3;
  m.control_policy = ControlPolicy::MedianPoll;
  m.default_overhead = OverheadModel{0.33, 0.03, 0.015, 0.015, 120e-12, 25e6, 3.3};
  return m;
}

OperationSpec make_sd_write(CompletionDist dist, double wait_a, double wait_miss_a,
                            double floor_s) {
  OperationSpec op;
  op.worst_case_wait_s = 250e-3;
  op.actual_completion = dist;
  op.completion_floor_s = floor_s;
  op.active_phase_s = 1.2e-3;
  op.currents = {6e-3, 40e-3, wait_a, 25e-3};
  op.wait_shape = WaitShape::Stepped;
  op.wait_miss_current_a = wait_miss_a;
  op.noise_stddev_a = 0.8e-3;
  return op;
}

DeviceModel make_sd_sandisk() {
  DeviceModel m = make_sd_base("sd_sandisk");
  m.operations["block_write"] =
      make_sd_write(BimodalDist{63.70e-3, 96.90e-3, 0.2}, 60e-3, 100e-3, 1e-3);
  m.default_mix = {{"block_write", 1}};
  m.default_iodvs = IODVSPolicy{3.3, 2.7, 0.953, 0.0};
  return m;
}

DeviceModel make_sd_lexar() {
  DeviceModel m = make_sd_base("sd_lexar");
  m.operations["block_write"] =
      make_sd_write(BimodalDist{102.24e-3, 120.44e-3, 0.25}, 55e-3, 90e-3, 1e-3);
  m.default_mix = {{"block_write", 1}};
  m.default_iodvs = IODVSPolicy{3.3, 2.7, 0.968, 0.0};
  return m;
}

DeviceModel make_sd_swissbit() {
  DeviceModel m = make_sd_base("sd_swissbit");
  m.operations["block_write"] =
      make_sd_write(NormalDist{19.48e-3, 12.44e-3}, 14e-3, 0.0, 2e-3);
  m.default_mix = {{"block_write", 1}};
  m.default_iodvs = IODVSPolicy{3.3, 2.7, 0.74, 0.0};
  return m;
}

DeviceModel make_sd_kingston() {
  DeviceModel m = make_sd_base("sd_kingston");
  m.operations["block_write"] =
      make_sd_write(NormalDist{20.2e-3, 0.02e-3}, 14e-3, 0.0, 2e-3);
  m.default_mix = {{"block_write", 1}};
  m.default_iodvs = IODVSPolicy{3.3, 3.2, 0.9914, 0.0};
  return m;
}

const std::vector<DeviceModel>& builtin_store() {
  static const std::vector<DeviceModel> models = {
      make_eeprom(),     make_nor_flash(), make_nand_flash(),  make_hih6130(),
      make_sd_sandisk(), make_sd_lexar(),  make_sd_swissbit(), make_sd_kingston(),
  };
  return models;
}

const std::map<std::string, CalibrationTargets>& targets_store() {
  static const std::map<std::string, CalibrationTargets> targets = {
      {"eeprom", {5.05, 5.98, 46.84, 53.05}},
      {"nor_flash", {231.57, 243.87, 2138.3, 2277.0}},
      {"nand_flash", {57.61, 71.28, 1053.0, 1247.9}},
      {"hih6130", {45.27, 45.99, 325.95, 330.50}},
      {"sd_sandisk", {0.0, 0.0, 17066.0, 0.0}},
      {"sd_lexar", {0.0, 0.0, 22707.0, 0.0}},
      {"sd_swissbit", {0.0, 0.0, 2763.0, 0.0}},
      {"sd_kingston", {0.0, 0.0, 942.0, 0.0}},
  };
  return targets;
}

}  // namespace

std::vector<DeviceModel> builtin_models() { return builtin_store(); }

const DeviceModel& builtin_model(const std::string& name) {
  for (const DeviceModel& m : builtin_store()) {
    if (m.name == name) return m;
  }
  std::string known;
  for (const DeviceModel& m : builtin_store()) {
    if (!known.empty()) known += ", ";
    known += m.name;
  }
  throw std::out_of_range("unknown device '" + name + "' (available: " + known + ")");
}

std::vector<std::string> builtin_model_names() {
  std::vector<std::string> names;
  for (const DeviceModel& m : builtin_store()) names.push_back(m.name);
  return names;
}

const CalibrationTargets& builtin_calibration_targets(const std::string& name) {
  const auto& t = targets_store();
  const auto it = t.find(name);
  if (it == t.end()) throw std::out_of_range("no calibration targets for device '" + name + "'");
  return it->second;
}

}  // namespace pacer
