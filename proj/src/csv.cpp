/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "pacer/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace pacer {

namespace {

constexpr const char* kHeader = "time_s,voltage_v,current_a,state";
constexpr const char* kTruthKey = "true_completion_s=";

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_number(const std::string& s, std::size_t line, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw TraceParseError(line, std::string("bad ") + what + " value: '" + s + "'");
  }
  if (pos != s.size() || !std::isfinite(v)) {
    throw TraceParseError(line, std::string("bad ") + what + " value: '" + s + "'");
  }
  return v;
}

}  // namespace

void write_trace_csv(std::ostream& out, const CurrentTrace& t,
                     std::optional<double> true_completion_s) {
  out << kHeader << '\n';
  if (true_completion_s) {
    out << "# " << kTruthKey << format_double(*true_completion_s) << '\n';
  }
  for (std::size_t n = 0; n < t.samples.size(); ++n) {
    const Sample& s = t.samples[n];
    out << format_double(t.time_at(n)) << ',' << format_double(s.voltage_v) << ','
        << format_double(s.current_a) << ',' << to_string(s.state) << '\n';
  }
}

TraceFile read_trace_csv(std::istream& in) {
  TraceFile result;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::vector<double> times;
  std::vector<std::size_t> row_lines;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::size_t at = line.find(kTruthKey);
      if (at != std::string::npos) {
        result.true_completion_s =
            parse_number(line.substr(at + std::string(kTruthKey).size()), lineno, "ground truth");
      }
      continue;
    }
    if (!header_seen) {
      if (line != kHeader) {
        throw TraceParseError(lineno, "expected header '" + std::string(kHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw TraceParseError(lineno, "expected 4 fields, got " + std::to_string(fields.size()));
    }
    Sample s;
    const double time_s = parse_number(fields[0], lineno, "time");
    s.voltage_v = parse_number(fields[1], lineno, "voltage");
    s.current_a = parse_number(fields[2], lineno, "current");
    try {
      s.state = device_state_from_string(fields[3]);
    } catch (const std::invalid_argument& e) {
      throw TraceParseError(lineno, e.what());
    }
    times.push_back(time_s);
    row_lines.push_back(lineno);
    result.trace.samples.push_back(s);
  }
  if (!header_seen) {
    throw TraceParseError(lineno == 0 ? 1 : lineno, "empty input, header missing");
  }

  if (!times.empty() && std::abs(times[0]) > 1e-15) {
    throw TraceParseError(row_lines[0], "first sample time must be 0");
  }
  if (times.size() >= 2) {
    const double period = times[1] - times[0];
    if (period <= 0.0) {
      throw TraceParseError(row_lines[1], "sample times must be strictly increasing");
    }
    result.trace.sample_period_s = period;
    for (std::size_t n = 0; n < times.size(); ++n) {
      const double expect = static_cast<double>(n) * period;
      if (std::abs(times[n] - expect) > 0.01 * period) {
        throw TraceParseError(row_lines[n], "nonuniform sample time " + format_double(times[n]) +
                                                ", expected " + format_double(expect));
      }
    }
  }
  return result;
}

TraceFile read_trace_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return read_trace_csv(in);
}

void write_trace_csv_file(const std::string& path, const CurrentTrace& t,
                          std::optional<double> true_completion_s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  write_trace_csv(out, t, true_completion_s);
}

}  // namespace pacer
