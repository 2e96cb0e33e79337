/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "pacer/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace pacer {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double to_double(const IniEntry& e) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(e.key, "expected a number, got '" + e.value + "'", e.line);
  }
  if (pos != e.value.size() || !std::isfinite(v)) {
    throw ConfigError(e.key, "expected a number, got '" + e.value + "'", e.line);
  }
  return v;
}

long to_long(const IniEntry& e) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(e.value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(e.key, "expected an integer, got '" + e.value + "'", e.line);
  }
  if (pos != e.value.size()) {
    throw ConfigError(e.key, "expected an integer, got '" + e.value + "'", e.line);
  }
  return v;
}

std::uint64_t to_u64(const IniEntry& e) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(e.value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(e.key, "expected an unsigned integer, got '" + e.value + "'", e.line);
  }
  if (pos != e.value.size()) {
    throw ConfigError(e.key, "expected an unsigned integer, got '" + e.value + "'", e.line);
  }
  return v;
}

bool to_bool(const IniEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ConfigError(e.key, "expected true/false, got '" + e.value + "'", e.line);
}

// Tracks which keys a parser consumed so leftovers can be reported.
struct SectionReader {
  const IniSection* section;
  std::set<std::string> consumed;

  explicit SectionReader(const IniSection* s) : section(s) {}

  const IniEntry* get(const std::string& key) {
    if (!section) return nullptr;
    consumed.insert(key);
    return section->find(key);
  }

  void reject_unknown(const std::string& where) const {
    if (!section) return;
    for (const IniEntry& e : section->entries) {
      if (!consumed.count(e.key)) {
        throw ConfigError(where.empty() ? e.key : where + "." + e.key, "unknown key", e.line);
      }
    }
  }
};

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

const IniEntry* IniSection::find(const std::string& key) const {
  for (const IniEntry& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

const IniSection* IniDocument::find(const std::string& name) const {
  for (const IniSection& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

IniDocument parse_ini(std::istream& in) {
  IniDocument doc;
  doc.sections.push_back({"", {}});
  IniSection* current = &doc.sections.front();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        throw ConfigError(t, "malformed section header", lineno);
      }
      doc.sections.push_back({trim(t.substr(1, t.size() - 2)), {}});
      current = &doc.sections.back();
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(t, "expected 'key = value'", lineno);
    }
    IniEntry e;
    e.key = trim(t.substr(0, eq));
    e.value = trim(t.substr(eq + 1));
    e.line = lineno;
    if (e.key.empty()) throw ConfigError(t, "empty key", lineno);
    current->entries.push_back(std::move(e));
  }
  return doc;
}

IniDocument parse_ini_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_ini(in);
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

ExperimentConfig parse_experiment_config(const IniDocument& doc) {
  ExperimentConfig cfg;

  SectionReader top(doc.find(""));
  if (const IniEntry* e = top.get("trials")) {
    const long v = to_long(*e);
    if (v < 1) throw ConfigError(e->key, "trials must be >= 1", e->line);
    cfg.trials = static_cast<int>(v);
  }
  if (const IniEntry* e = top.get("warmup")) {
    const long v = to_long(*e);
    if (v < 0) throw ConfigError(e->key, "warmup must be >= 0", e->line);
    cfg.warmup = static_cast<int>(v);
  }
  if (const IniEntry* e = top.get("seed")) cfg.seed = to_u64(*e);
  if (const IniEntry* e = top.get("poll_period_us")) cfg.poll_period_s = to_double(*e) * 1e-6;
  top.reject_unknown("");

  SectionReader device(doc.find("device"));
  if (!device.section) throw ConfigError("device", "missing [device] section");
  bool have_model = false;
  if (const IniEntry* e = device.get("model_file")) {
    cfg.model = parse_device_model_file(e->value);
    cfg.device = cfg.model->name;
    have_model = true;
  }
  if (const IniEntry* e = device.get("name")) {
    cfg.device = e->value;
    if (!have_model) {
      builtin_model(e->value);  // fails fast with the list of known devices
    }
  } else if (!have_model) {
    throw ConfigError("device.name", "a device name or model_file is required");
  }
  device.reject_unknown("device");

  if (const IniSection* ops = doc.find("operations")) {
    for (const IniEntry& e : ops->entries) {
      const long count = to_long(e);
      if (count < 1) throw ConfigError("operations." + e.key, "count must be >= 1", e.line);
      cfg.operation_mix.emplace_back(e.key, static_cast<int>(count));
    }
  }

  SectionReader det(doc.find("detector"));
  if (det.section) {
    if (const IniEntry* e = det.get("kind")) {
      try {
        cfg.detector = detector_kind_from_string(e->value);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError("detector.kind", ex.what(), e->line);
      }
    }
    if (const IniEntry* e = det.get("threshold_factor")) cfg.params.threshold_factor = to_double(*e);
    if (const IniEntry* e = det.get("min_latency_ms")) cfg.params.min_latency_s = to_double(*e) * 1e-3;
    if (const IniEntry* e = det.get("resolution_us")) cfg.params.resolution_s = to_double(*e) * 1e-6;
    if (const IniEntry* e = det.get("widen_factor")) cfg.params.widen_factor = to_double(*e);
    if (const IniEntry* e = det.get("pass_probe_streak")) {
      cfg.params.pass_probe_streak = static_cast<int>(to_long(*e));
    }
    if (const IniEntry* e = det.get("filter_window")) {
      const long v = to_long(*e);
      if (v < 1) throw ConfigError("detector.filter_window", "must be >= 1", e->line);
      cfg.params.filter_window = static_cast<std::size_t>(v);
    }
    det.reject_unknown("detector");
  }

  SectionReader iodvs(doc.find("iodvs"));
  if (iodvs.section) {
    bool use_default = false;
    if (const IniEntry* e = iodvs.get("device_default")) use_default = to_bool(*e);
    if (use_default) {
      const DeviceModel model = cfg.model ? *cfg.model : builtin_model(cfg.device);
      if (!model.default_iodvs) {
        throw ConfigError("iodvs.device_default", "device has no default IODVS policy");
      }
      cfg.iodvs = model.default_iodvs;
    } else {
      IODVSPolicy p;
      const DeviceModel model = cfg.model ? *cfg.model : builtin_model(cfg.device);
      p.v_nominal_v = model.supply_voltage_v;
      if (const IniEntry* e = iodvs.get("v_nominal_v")) p.v_nominal_v = to_double(*e);
      if (const IniEntry* e = iodvs.get("v_wait_v")) p.v_wait_v = to_double(*e);
      if (const IniEntry* e = iodvs.get("wait_current_scale")) p.wait_current_scale = to_double(*e);
      if (const IniEntry* e = iodvs.get("transition_energy_uj")) {
        p.transition_energy_j = to_double(*e) * 1e-6;
      }
      try {
        p.validate();
      } catch (const std::invalid_argument& ex) {
        throw ConfigError("iodvs", ex.what());
      }
      cfg.iodvs = p;
    }
    iodvs.reject_unknown("iodvs");
  }

  SectionReader ovh(doc.find("overhead"));
  if (ovh.section) {
    OverheadModel m;
    if (const IniEntry* e = ovh.get("p_mcu_w")) m.p_mcu_w = to_double(*e);
    if (const IniEntry* e = ovh.get("p_mcd_w")) m.p_mcd_w = to_double(*e);
    if (const IniEntry* e = ovh.get("p_match_w")) m.p_match_w = to_double(*e);
    if (const IniEntry* e = ovh.get("p_dev_w")) m.p_dev_w = to_double(*e);
    if (const IniEntry* e = ovh.get("comm_c_pf")) m.comm_capacitance_f = to_double(*e) * 1e-12;
    if (const IniEntry* e = ovh.get("comm_f_hz")) m.comm_frequency_hz = to_double(*e);
    if (const IniEntry* e = ovh.get("comm_vdd_v")) m.comm_vdd_v = to_double(*e);
    if (m.p_mcu_w < 0 || m.p_mcd_w < 0 || m.p_match_w < 0 || m.p_dev_w < 0 ||
        m.comm_capacitance_f < 0 || m.comm_frequency_hz < 0 || m.comm_vdd_v < 0) {
      throw ConfigError("overhead", "overhead components must be >= 0");
    }
    cfg.overhead = m;
    ovh.reject_unknown("overhead");
  }

  if (const IniSection* drift = doc.find("drift")) {
    for (const IniEntry& e : drift->entries) {
      if (e.key != "event") throw ConfigError("drift." + e.key, "unknown key", e.line);
      const auto colon = e.value.find(':');
      if (colon == std::string::npos) {
        throw ConfigError("drift.event", "expected '<trial>:<scale>', got '" + e.value + "'",
                          e.line);
      }
      DriftEvent ev;
      ev.from_trial = static_cast<int>(to_long({e.key, trim(e.value.substr(0, colon)), e.line}));
      ev.completion_scale = to_double({e.key, trim(e.value.substr(colon + 1)), e.line});
      cfg.drift.push_back(ev);
    }
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("experiment", ex.what());
  }
  const DeviceModel model = resolve_model(cfg);
  for (const auto& [op, count] : cfg.operation_mix) {
    (void)count;
    try {
      model.operation(op);
    } catch (const std::out_of_range& ex) {
      throw ConfigError("operations." + op, ex.what());
    }
  }
  return cfg;
}

ExperimentConfig parse_experiment_config_file(const std::string& path) {
  const IniDocument doc = parse_ini_file(path);
  return parse_experiment_config(doc);
}

// ---------------------------------------------------------------------------
// Device model files
// ---------------------------------------------------------------------------

namespace {

CompletionDist parse_completion(SectionReader& r, const std::string& where) {
  const IniEntry* kind = r.get("completion");
  if (!kind) throw ConfigError(where + ".completion", "missing completion kind");
  if (kind->value == "deterministic") {
    const IniEntry* t = r.get("completion_t_ms");
    if (!t) throw ConfigError(where + ".completion_t_ms", "required for deterministic");
    return Deterministic{to_double(*t) * 1e-3};
  }
  if (kind->value == "normal") {
    const IniEntry* mean = r.get("completion_mean_ms");
    const IniEntry* sd = r.get("completion_stddev_ms");
    if (!mean || !sd) {
      throw ConfigError(where + ".completion_mean_ms",
                        "normal requires completion_mean_ms and completion_stddev_ms");
    }
    return NormalDist{to_double(*mean) * 1e-3, to_double(*sd) * 1e-3};
  }
  if (kind->value == "bimodal") {
    const IniEntry* hit = r.get("completion_t_hit_ms");
    const IniEntry* miss = r.get("completion_t_miss_ms");
    const IniEntry* p = r.get("completion_p_miss");
    if (!hit || !miss || !p) {
      throw ConfigError(where + ".completion_t_hit_ms",
                        "bimodal requires completion_t_hit_ms, completion_t_miss_ms and "
                        "completion_p_miss");
    }
    return BimodalDist{to_double(*hit) * 1e-3, to_double(*miss) * 1e-3, to_double(*p)};
  }
  throw ConfigError(where + ".completion",
                    "expected deterministic|normal|bimodal, got '" + kind->value + "'",
                    kind->line);
}

void write_completion(std::ostream& out, const CompletionDist& dist) {
  if (const auto* det = std::get_if<Deterministic>(&dist)) {
    out << "completion = deterministic\n";
    out << "completion_t_ms = " << fmt_g(det->t_s * 1e3) << "\n";
  } else if (const auto* norm = std::get_if<NormalDist>(&dist)) {
    out << "completion = normal\n";
    out << "completion_mean_ms = " << fmt_g(norm->mean_s * 1e3) << "\n";
    out << "completion_stddev_ms = " << fmt_g(norm->stddev_s * 1e3) << "\n";
  } else {
    const auto& bi = std::get<BimodalDist>(dist);
    out << "completion = bimodal\n";
    out << "completion_t_hit_ms = " << fmt_g(bi.t_hit_s * 1e3) << "\n";
    out << "completion_t_miss_ms = " << fmt_g(bi.t_miss_s * 1e3) << "\n";
    out << "completion_p_miss = " << fmt_g(bi.p_miss) << "\n";
  }
}

}  // namespace

DeviceModel parse_device_model(const IniDocument& doc) {
  DeviceModel m;
  SectionReader dev(doc.find("device"));
  if (!dev.section) throw ConfigError("device", "missing [device] section");
  if (const IniEntry* e = dev.get("name")) {
    m.name = e->value;
  } else {
    throw ConfigError("device.name", "device name is required");
  }
  if (const IniEntry* e = dev.get("idle_current_ma")) m.idle_current_a = to_double(*e) * 1e-3;
  if (!(m.idle_current_a > 0.0)) {
    throw ConfigError("device.idle_current_ma", "idle current must be positive");
  }
  if (const IniEntry* e = dev.get("supply_voltage_v")) m.supply_voltage_v = to_double(*e);
  if (const IniEntry* e = dev.get("verify_duration_ms")) m.verify_phase_s = to_double(*e) * 1e-3;
  if (const IniEntry* e = dev.get("idle_lead_ms")) m.idle_lead_s = to_double(*e) * 1e-3;
  if (const IniEntry* e = dev.get("control_quantum_ms")) {
    m.control_quantum_s = to_double(*e) * 1e-3;
  }
  if (const IniEntry* e = dev.get("control_policy")) {
    try {
      m.control_policy = control_policy_from_string(e->value);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError("device.control_policy", ex.what(), e->line);
    }
  }
  if (const IniEntry* e = dev.get("sample_period_us")) {
    m.sample_period_s = to_double(*e) * 1e-6;
    if (!(m.sample_period_s > 0.0)) {
      throw ConfigError("device.sample_period_us", "sample period must be positive", e->line);
    }
  }
  if (const IniEntry* e = dev.get("default_mix")) {
    // space-separated op:count pairs
    std::istringstream ss(e->value);
    std::string item;
    while (ss >> item) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw ConfigError("device.default_mix", "expected op:count entries", e->line);
      }
      m.default_mix.emplace_back(item.substr(0, colon),
                                 static_cast<int>(to_long({e->key, item.substr(colon + 1), e->line})));
    }
  }
  dev.reject_unknown("device");

  for (const IniSection& section : doc.sections) {
    if (section.name.rfind("operation.", 0) != 0) continue;
    const std::string op_name = section.name.substr(std::string("operation.").size());
    SectionReader r(&section);
    OperationSpec op;
    if (const IniEntry* e = r.get("worst_case_wait_ms")) {
      op.worst_case_wait_s = to_double(*e) * 1e-3;
    } else {
      throw ConfigError(section.name + ".worst_case_wait_ms", "required");
    }
    op.actual_completion = parse_completion(r, section.name);
    if (const IniEntry* e = r.get("active_phase_ms")) op.active_phase_s = to_double(*e) * 1e-3;
    if (const IniEntry* e = r.get("idle_current_ma")) op.currents.idle_a = to_double(*e) * 1e-3;
    if (const IniEntry* e = r.get("active_current_ma")) op.currents.active_a = to_double(*e) * 1e-3;
    if (const IniEntry* e = r.get("wait_current_ma")) op.currents.wait_a = to_double(*e) * 1e-3;
    if (const IniEntry* e = r.get("verify_current_ma")) op.currents.verify_a = to_double(*e) * 1e-3;
    if (const IniEntry* e = r.get("wait_miss_current_ma")) {
      op.wait_miss_current_a = to_double(*e) * 1e-3;
    }
    if (const IniEntry* e = r.get("wait_shape")) {
      try {
        op.wait_shape = wait_shape_from_string(e->value);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(section.name + ".wait_shape", ex.what(), e->line);
      }
    }
    if (const IniEntry* e = r.get("noise_stddev_ma")) op.noise_stddev_a = to_double(*e) * 1e-3;
    if (const IniEntry* e = r.get("completion_floor_ms")) {
      op.completion_floor_s = to_double(*e) * 1e-3;
    }
    r.reject_unknown(section.name);
    m.operations[op_name] = op;
  }
  if (m.operations.empty()) {
    throw ConfigError("operation", "at least one [operation.<name>] section is required");
  }
  if (m.default_mix.empty()) {
    for (const auto& [name, op] : m.operations) {
      (void)op;
      m.default_mix.emplace_back(name, 1);
    }
  }
  for (const auto& [op, count] : m.default_mix) {
    (void)count;
    if (!m.operations.count(op)) {
      throw ConfigError("device.default_mix", "unknown operation '" + op + "'");
    }
  }

  SectionReader iodvs(doc.find("iodvs"));
  if (iodvs.section) {
    IODVSPolicy p;
    p.v_nominal_v = m.supply_voltage_v;
    if (const IniEntry* e = iodvs.get("v_nominal_v")) p.v_nominal_v = to_double(*e);
    if (const IniEntry* e = iodvs.get("v_wait_v")) p.v_wait_v = to_double(*e);
    if (const IniEntry* e = iodvs.get("wait_current_scale")) p.wait_current_scale = to_double(*e);
    if (const IniEntry* e = iodvs.get("transition_energy_uj")) {
      p.transition_energy_j = to_double(*e) * 1e-6;
    }
    try {
      p.validate();
    } catch (const std::invalid_argument& ex) {
      throw ConfigError("iodvs", ex.what());
    }
    m.default_iodvs = p;
    iodvs.reject_unknown("iodvs");
  }

  SectionReader ovh(doc.find("overhead"));
  if (ovh.section) {
    OverheadModel om;
    if (const IniEntry* e = ovh.get("p_mcu_w")) om.p_mcu_w = to_double(*e);
    if (const IniEntry* e = ovh.get("p_mcd_w")) om.p_mcd_w = to_double(*e);
    if (const IniEntry* e = ovh.get("p_match_w")) om.p_match_w = to_double(*e);
    if (const IniEntry* e = ovh.get("p_dev_w")) om.p_dev_w = to_double(*e);
    if (const IniEntry* e = ovh.get("comm_c_pf")) om.comm_capacitance_f = to_double(*e) * 1e-12;
    if (const IniEntry* e = ovh.get("comm_f_hz")) om.comm_frequency_hz = to_double(*e);
    if (const IniEntry* e = ovh.get("comm_vdd_v")) om.comm_vdd_v = to_double(*e);
    m.default_overhead = om;
    ovh.reject_unknown("overhead");
  }
  return m;
}

DeviceModel parse_device_model_file(const std::string& path) {
  const IniDocument doc = parse_ini_file(path);
  return parse_device_model(doc);
}

void write_device_model(std::ostream& out, const DeviceModel& m) {
  out << "[device]\n";
  out << "name = " << m.name << "\n";
  out << "idle_current_ma = " << fmt_g(m.idle_current_a * 1e3) << "\n";
  out << "supply_voltage_v = " << fmt_g(m.supply_voltage_v) << "\n";
  out << "verify_duration_ms = " << fmt_g(m.verify_phase_s * 1e3) << "\n";
  out << "idle_lead_ms = " << fmt_g(m.idle_lead_s * 1e3) << "\n";
  out << "control_quantum_ms = " << fmt_g(m.control_quantum_s * 1e3) << "\n";
  out << "control_policy = " << to_string(m.control_policy) << "\n";
  out << "sample_period_us = " << fmt_g(m.sample_period_s * 1e6) << "\n";
  if (!m.default_mix.empty()) {
    out << "default_mix =";
    for (const auto& [op, count] : m.default_mix) out << ' ' << op << ':' << count;
    out << "\n";
  }
  for (const auto& [name, op] : m.operations) {
    out << "\n[operation." << name << "]\n";
    out << "worst_case_wait_ms = " << fmt_g(op.worst_case_wait_s * 1e3) << "\n";
    write_completion(out, op.actual_completion);
    out << "active_phase_ms = " << fmt_g(op.active_phase_s * 1e3) << "\n";
    out << "idle_current_ma = " << fmt_g(op.currents.idle_a * 1e3) << "\n";
    out << "active_current_ma = " << fmt_g(op.currents.active_a * 1e3) << "\n";
    out << "wait_current_ma = " << fmt_g(op.currents.wait_a * 1e3) << "\n";
    out << "verify_current_ma = " << fmt_g(op.currents.verify_a * 1e3) << "\n";
    if (op.wait_miss_current_a > 0.0) {
      out << "wait_miss_current_ma = " << fmt_g(op.wait_miss_current_a * 1e3) << "\n";
    }
    out << "wait_shape = " << to_string(op.wait_shape) << "\n";
    out << "noise_stddev_ma = " << fmt_g(op.noise_stddev_a * 1e3) << "\n";
    out << "completion_floor_ms = " << fmt_g(op.completion_floor_s * 1e3) << "\n";
  }
  if (m.default_iodvs) {
    const IODVSPolicy& p = *m.default_iodvs;
    out << "\n[iodvs]\n";
    out << "v_nominal_v = " << fmt_g(p.v_nominal_v) << "\n";
    out << "v_wait_v = " << fmt_g(p.v_wait_v) << "\n";
    out << "wait_current_scale = " << fmt_g(p.wait_current_scale) << "\n";
    out << "transition_energy_uj = " << fmt_g(p.transition_energy_j * 1e6) << "\n";
  }
  if (m.default_overhead) {
    const OverheadModel& o = *m.default_overhead;
    out << "\n[overhead]\n";
    out << "p_mcu_w = " << fmt_g(o.p_mcu_w) << "\n";
    out << "p_mcd_w = " << fmt_g(o.p_mcd_w) << "\n";
    out << "p_match_w = " << fmt_g(o.p_match_w) << "\n";
    out << "p_dev_w = " << fmt_g(o.p_dev_w) << "\n";
    out << "comm_c_pf = " << fmt_g(o.comm_capacitance_f * 1e12) << "\n";
    out << "comm_f_hz = " << fmt_g(o.comm_frequency_hz) << "\n";
    out << "comm_vdd_v = " << fmt_g(o.comm_vdd_v) << "\n";
  }
}

}  // namespace pacer
