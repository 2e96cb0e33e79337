/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "pacer/report.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>

#include <json.hpp>

namespace pacer {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json stats_json(const Stats& s, double unit_scale) {
  return ordered_json{{"mean", s.mean * unit_scale}, {"stddev", s.stddev * unit_scale}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string report_to_json(const BenchmarkReport& r) {
  ordered_json j;
  j["device"] = r.device;
  j["detector"] = r.detector;
  j["iodvs"] = r.iodvs;
  ordered_json mix = ordered_json::array();
  for (const auto& [op, count] : r.operation_mix) {
    mix.push_back(ordered_json{{"operation", op}, {"count", count}});
  }
  j["operation_mix"] = mix;
  j["trials"] = r.trials;
  j["warmup_trials_excluded"] = r.warmup;
  j["seed"] = r.seed;
  j["statistic"] = "mean_over_post_warmup_trials";
  j["latency_reported"] = r.latency_reported;
  j["wait_latency_ms"] = stats_json(r.wait_latency_s, 1e3);
  j["all_latency_ms"] = stats_json(r.all_latency_s, 1e3);
  j["wait_energy_uj"] = stats_json(r.wait_energy_j, 1e6);
  j["all_energy_uj"] = stats_json(r.all_energy_j, 1e6);
  j["clamp_count"] = r.clamp_count;
  j["fail_extension_count"] = r.fail_extension_count;
  j["widen_count"] = r.widen_count;
  ordered_json trials = ordered_json::array();
  for (const TrialResult& t : r.trial_log) {
    trials.push_back(ordered_json{{"wait_latency_ms", t.wait_latency_s * 1e3},
                                  {"all_latency_ms", t.all_latency_s * 1e3},
                                  {"wait_energy_uj", t.wait_energy_j * 1e6},
                                  {"all_energy_uj", t.all_energy_j * 1e6},
                                  {"passed", t.passed},
                                  {"fail_extended", t.fail_extended},
                                  {"clamped", t.clamped}});
  }
  j["trial_log"] = trials;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

void write_results_csv(std::ostream& out, const ResultsTable& table) {
  const std::string det = table.detector;
  out << "Stage,Control," << det << ",Diff.";
  if (table.treatment_iodvs) out << "," << det << "+IODVS,Diff.";
  out << "\n";

  const DiffTable base = compare_reports(table.treatment, table.control);
  DiffTable with_iodvs;
  if (table.treatment_iodvs) with_iodvs = compare_reports(*table.treatment_iodvs, table.control);

  for (std::size_t i = 0; i < base.rows.size(); ++i) {
    const DiffRow& row = base.rows[i];
    out << row.stage << ' '
        << (row.metric == "latency_ms" ? "latency (ms)" : "energy (uJ)") << ','
        << fmt(row.control) << ',' << fmt(row.treatment) << ',' << fmt(row.diff_pct) << '%';
    if (table.treatment_iodvs) {
      const DiffRow& iv = with_iodvs.rows[i];
      out << ',' << fmt(iv.treatment) << ',' << fmt(iv.diff_pct) << '%';
    }
    out << '\n';
  }
}

void print_diff_table(std::ostream& out, const DiffTable& table) {
  out << table.device << " / " << table.detector << (table.iodvs ? "+iodvs" : "") << "\n";
  out << "  stage  metric        control     " << table.detector << "      diff\n";
  for (const DiffRow& row : table.rows) {
    out << "  " << std::left << std::setw(6) << row.stage << ' ' << std::setw(11) << row.metric
        << ' ' << std::right << std::setw(11) << fmt(row.control) << ' ' << std::setw(11)
        << fmt(row.treatment) << ' ' << std::setw(8) << fmt(row.diff_pct) << "%\n";
  }
}

}  // namespace pacer
