/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "pacer/devices.hpp"
#include "pacer/harness.hpp"

namespace pacer {

/// Configuration problem, annotated with the offending key (and line, when the
/// problem comes from a file).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what, std::size_t line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", key '" + key +
                                          "': " + what
                                    : "key '" + key + "': " + what),
        key_(key),
        line_(line) {}

  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

/// Minimal INI-style document: `key = value` entries under [section] headers,
/// '#'/';' comments, repeated keys preserved in order. Keys before the first
/// section header live in the unnamed section "".
struct IniEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct IniSection {
  std::string name;
  std::vector<IniEntry> entries;

  const IniEntry* find(const std::string& key) const;
};

struct IniDocument {
  std::vector<IniSection> sections;

  const IniSection* find(const std::string& name) const;
};

IniDocument parse_ini(std::istream& in);
IniDocument parse_ini_file(const std::string& path);

/// Experiment file: top-level trials/warmup/seed/poll_period_us keys plus
/// [device], [operations], [detector], [iodvs], [overhead] and [drift]
/// sections. Unknown keys are rejected.
ExperimentConfig parse_experiment_config(const IniDocument& doc);
ExperimentConfig parse_experiment_config_file(const std::string& path);

/// Device model file: a [device] section plus one [operation.<name>] section
/// per operation, units spelled in the key names.
DeviceModel parse_device_model(const IniDocument& doc);
DeviceModel parse_device_model_file(const std::string& path);
void write_device_model(std::ostream& out, const DeviceModel& model);

}  // namespace pacer
