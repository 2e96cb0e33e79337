/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "pacer/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pacer/config.hpp"
#include "pacer/csv.hpp"
#include "pacer/report.hpp"

namespace pacer::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitAssertion = 3;

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string display_label(DetectorKind k) {
  switch (k) {
    case DetectorKind::Control:
      return "Control";
    case DetectorKind::PacerT:
      return "PACER-T";
    case DetectorKind::PacerE:
      return "PACER-E";
    case DetectorKind::PacerC:
      return "PACER-C";
  }
  return "?";
}

fs::path default_output_dir() {
  if (const char* env = std::getenv("PACERSIM_OUT")) return fs::path(env);
  return fs::path(".");
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunBundle {
  BenchmarkReport control;
  BenchmarkReport treatment;
  std::optional<BenchmarkReport> treatment_iodvs;
};

RunBundle run_with_control(const ExperimentConfig& cfg) {
  RunBundle out;
  ExperimentConfig control_cfg = cfg;
  control_cfg.detector = DetectorKind::Control;
  control_cfg.iodvs.reset();
  out.control = run_experiment(control_cfg);

  if (cfg.detector == DetectorKind::Control && !cfg.iodvs) {
    out.treatment = out.control;
    return out;
  }
  ExperimentConfig plain_cfg = cfg;
  plain_cfg.iodvs.reset();
  out.treatment = run_experiment(plain_cfg);
  if (cfg.iodvs) {
    out.treatment_iodvs = run_experiment(cfg);
  }
  return out;
}

int cmd_run(const std::string& config_path, const fs::path& outdir,
            std::optional<std::uint64_t> seed_override) {
  ExperimentConfig cfg = parse_experiment_config_file(config_path);
  if (seed_override) cfg.seed = *seed_override;

  const RunBundle bundle = run_with_control(cfg);
  const BenchmarkReport& primary =
      bundle.treatment_iodvs ? *bundle.treatment_iodvs : bundle.treatment;

  const std::string stem = fs::path(config_path).stem().string();
  write_file_atomic(outdir / (stem + ".report.json"), report_to_json(primary));

  ResultsTable table{cfg.device, display_label(cfg.detector), bundle.control, bundle.treatment,
                     bundle.treatment_iodvs};
  std::ostringstream csv;
  write_results_csv(csv, table);
  write_file_atomic(outdir / (stem + ".table.csv"), csv.str());

  print_diff_table(std::cout, compare_reports(primary, bundle.control));
  std::cout << "report: " << (outdir / (stem + ".report.json")).string() << "\n"
            << "table:  " << (outdir / (stem + ".table.csv")).string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// suite
// ---------------------------------------------------------------------------

struct SuiteArm {
  std::string device;
  DetectorKind detector;
};

ExperimentConfig suite_config(const std::string& device, DetectorKind kind, bool iodvs,
                              std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.device = device;
  cfg.detector = kind;
  cfg.seed = seed;
  const DeviceModel model = builtin_model(device);
  cfg.overhead = model.default_overhead;
  if (iodvs) {
    if (!model.default_iodvs) throw std::runtime_error(device + " has no default IODVS policy");
    cfg.iodvs = model.default_iodvs;
  }
  return cfg;
}

int cmd_suite(const fs::path& outdir, std::uint64_t seed, bool assert_headline) {
  const std::vector<std::pair<std::string, SuiteArm>> tables = {
      {"table1_eeprom.csv", {"eeprom", DetectorKind::PacerT}},
      {"table2_nor_flash.csv", {"nor_flash", DetectorKind::PacerT}},
      {"table3_nand_flash.csv", {"nand_flash", DetectorKind::PacerT}},
      {"table5_hih6130.csv", {"hih6130", DetectorKind::PacerE}},
  };
  const std::vector<std::string> sd_devices = {"sd_sandisk", "sd_lexar", "sd_swissbit",
                                               "sd_kingston"};

  struct ArmResult {
    std::string device;
    DetectorKind detector;
    RunBundle bundle;
  };
  std::vector<std::future<ArmResult>> futures;
  const auto launch = [&futures, seed](const std::string& device, DetectorKind kind) {
    futures.push_back(std::async(std::launch::async, [device, kind, seed] {
      return ArmResult{device, kind, run_with_control(suite_config(device, kind, true, seed))};
    }));
  };
  for (const auto& [file, arm] : tables) {
    (void)file;
    launch(arm.device, arm.detector);
  }
  for (const std::string& device : sd_devices) launch(device, DetectorKind::PacerC);

  std::map<std::string, ArmResult> results;
  for (auto& f : futures) {
    ArmResult r = f.get();
    results.emplace(r.device, std::move(r));
  }

  double max_energy_diff = 0.0;
  double max_all_latency_diff = 0.0;
  ordered_json summary;
  summary["seed"] = seed;
  ordered_json devices_json = ordered_json::array();

  const auto fold_diffs = [&](const ArmResult& r) {
    ordered_json entry;
    entry["device"] = r.device;
    entry["detector"] = to_string(r.detector);
    ordered_json arms = ordered_json::array();
    const auto add_arm = [&](const BenchmarkReport& rep, const char* label) {
      const DiffTable dt = compare_reports(rep, r.bundle.control);
      ordered_json rows = ordered_json::array();
      for (const DiffRow& row : dt.rows) {
        rows.push_back(ordered_json{{"stage", row.stage},
                                    {"metric", row.metric},
                                    {"control", row.control},
                                    {"value", row.treatment},
                                    {"diff_pct", row.diff_pct}});
        if (row.metric == "energy_uj") {
          max_energy_diff = std::max(max_energy_diff, row.diff_pct);
        } else if (row.stage == "all") {
          max_all_latency_diff = std::max(max_all_latency_diff, row.diff_pct);
        }
      }
      arms.push_back(ordered_json{{"arm", label}, {"rows", rows}});
    };
    add_arm(r.bundle.treatment, "detector");
    if (r.bundle.treatment_iodvs) add_arm(*r.bundle.treatment_iodvs, "detector+iodvs");
    entry["arms"] = arms;
    devices_json.push_back(entry);
  };

  for (const auto& [file, arm] : tables) {
    const ArmResult& r = results.at(arm.device);
    ResultsTable table{r.device, display_label(r.detector), r.bundle.control, r.bundle.treatment,
                       r.bundle.treatment_iodvs};
    std::ostringstream csv;
    write_results_csv(csv, table);
    write_file_atomic(outdir / file, csv.str());
    fold_diffs(r);
  }

  // Micro-SD cards share one energy-only table, one row group per card.
  {
    std::ostringstream csv;
    csv << "Card,Control,PACER-C,Diff.,PACER-C+IODVS,Diff.\n";
    for (const std::string& device : sd_devices) {
      const ArmResult& r = results.at(device);
      const DiffTable plain = compare_reports(r.bundle.treatment, r.bundle.control);
      const DiffTable iodvs = compare_reports(*r.bundle.treatment_iodvs, r.bundle.control);
      char line[256];
      std::snprintf(line, sizeof line, "%s,%.1f,%.1f,%.1f%%,%.1f,%.1f%%\n", device.c_str(),
                    plain.rows[0].control, plain.rows[0].treatment, plain.rows[0].diff_pct,
                    iodvs.rows[0].treatment, iodvs.rows[0].diff_pct);
      csv << line;
      fold_diffs(r);
    }
    write_file_atomic(outdir / "table4_micro_sd.csv", csv.str());
  }

  summary["devices"] = devices_json;
  summary["max_energy_reduction_pct"] = max_energy_diff;
  summary["max_all_latency_reduction_pct"] = max_all_latency_diff;
  const bool headline_ok = max_energy_diff >= 75.0 && max_all_latency_diff >= 62.0;
  summary["headline"] = ordered_json{{"energy_reduction_at_least_pct", 75.0},
                                     {"all_latency_reduction_at_least_pct", 62.0},
                                     {"satisfied", headline_ok}};
  write_file_atomic(outdir / "summary.json", summary.dump(2) + "\n");

  std::printf("suite written to %s\n", outdir.string().c_str());
  std::printf("max energy reduction:      %.1f%%\n", max_energy_diff);
  std::printf("max all-latency reduction: %.1f%%\n", max_all_latency_diff);
  if (assert_headline && !headline_ok) {
    std::fprintf(stderr, "headline assertion failed (need >= 75%% energy, >= 62%% latency)\n");
    return kExitAssertion;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

int cmd_calibrate(const std::string& device, std::uint64_t seed) {
  const DeviceModel model = builtin_model(device);  // throws with the available list
  const CalibrationTargets& targets = builtin_calibration_targets(device);

  ExperimentConfig cfg = suite_config(device, DetectorKind::Control, false, seed);
  const BenchmarkReport rep = run_experiment(cfg);

  struct Check {
    const char* what;
    double measured;
    double target;
  };
  std::vector<Check> checks;
  if (targets.control_wait_ms > 0) {
    checks.push_back({"wait latency (ms)", rep.wait_latency_s.mean * 1e3, targets.control_wait_ms});
  }
  if (targets.control_all_ms > 0) {
    checks.push_back({"all latency (ms)", rep.all_latency_s.mean * 1e3, targets.control_all_ms});
  }
  if (targets.control_wait_uj > 0) {
    checks.push_back({"wait energy (uJ)", rep.wait_energy_j.mean * 1e6, targets.control_wait_uj});
  }
  if (targets.control_all_uj > 0) {
    checks.push_back({"all energy (uJ)", rep.all_energy_j.mean * 1e6, targets.control_all_uj});
  }

  std::printf("%s: %d control trials (seed %llu)\n", device.c_str(), cfg.trials,
              static_cast<unsigned long long>(seed));
  bool all_ok = true;
  for (const Check& c : checks) {
    const double dev_pct = (c.measured - c.target) / c.target * 100.0;
    const bool ok = std::abs(dev_pct) <= 2.0;
    all_ok = all_ok && ok;
    std::printf("  %-18s %12.3f  target %12.3f  deviation %+6.2f%% %s\n", c.what, c.measured,
                c.target, dev_pct, ok ? "" : " ** exceeds 2%");
  }
  if (rep.clamp_count > 0) {
    std::printf("  note: %ld trial(s) clamped a completion draw\n", rep.clamp_count);
  }
  std::printf(all_ok ? "calibration OK\n" : "calibration DEVIATES\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// export-trace / analyze
// ---------------------------------------------------------------------------

int cmd_export_trace(const std::string& device, const std::string& operation,
                     std::optional<double> delay_ms, std::uint64_t seed, const fs::path& output) {
  const DeviceModel model = builtin_model(device);
  const OperationSpec& spec = model.operation(operation.empty() ? model.default_mix.front().first
                                                                : operation);
  const std::string op_name =
      operation.empty() ? model.default_mix.front().first : operation;
  double host_delay = spec.worst_case_wait_s + model.control_quantum_s;
  if (delay_ms) host_delay = *delay_ms * 1e-3;

  const OperationOutcome outcome = simulate_operation(model, op_name, host_delay, seed);
  std::ostringstream out;
  write_trace_csv(out, outcome.trace, outcome.true_completion_s);
  write_file_atomic(output, out.str());
  std::printf("wrote %zu samples to %s (true completion %.6f ms into the wait)\n",
              outcome.trace.size(), output.string().c_str(), outcome.true_completion_s * 1e3);
  return kExitOk;
}

struct AnalyzeOptions {
  double threshold_factor = 1.10;
  double min_latency_ms = 0.0;
  std::size_t window = 50;
};

ordered_json analyze_trace(const TraceFile& tf, const AnalyzeOptions& opt) {
  const CurrentTrace& trace = tf.trace;
  if (trace.empty()) throw std::runtime_error("trace has no samples");
  const double ts = trace.sample_period_s;

  std::size_t idle_end = 0;
  while (idle_end < trace.size() && trace.samples[idle_end].state == DeviceState::Idle) {
    ++idle_end;
  }
  const bool all_idle = idle_end == trace.size();

  std::size_t wait_begin = 0;
  std::size_t wait_end = trace.size();
  if (!all_idle) {
    wait_begin = trace.size();
    for (std::size_t n = 0; n < trace.size(); ++n) {
      if (trace.samples[n].state == DeviceState::Wait) {
        wait_begin = n;
        break;
      }
    }
    if (wait_begin == trace.size()) throw std::runtime_error("trace has no wait phase");
    wait_end = wait_begin;
    while (wait_end < trace.size() && trace.samples[wait_end].state == DeviceState::Wait) {
      ++wait_end;
    }
  }

  const std::size_t idle_ref_n = all_idle ? std::min(opt.window, trace.size()) : idle_end;
  if (idle_ref_n == 0) throw std::runtime_error("no idle samples to take the reference from");
  double idle_sum = 0.0;
  for (std::size_t n = 0; n < idle_ref_n; ++n) idle_sum += trace.samples[n].current_a;
  const double idle_ref = idle_sum / static_cast<double>(idle_ref_n);

  const CurrentHeuristicState det =
      pacer_c_init(idle_ref, opt.threshold_factor, opt.min_latency_ms * 1e-3);
  MovingAverageFilter filter(opt.window);
  std::optional<double> detected;
  for (std::size_t n = 0; n < wait_end; ++n) {
    const double filtered = filter.push(trace.samples[n].current_a);
    if (n < wait_begin) continue;
    const double tau = static_cast<double>(n - wait_begin + 1) * ts;
    if (pacer_c_step(det, filtered, tau) == CompletionMark::Complete) {
      detected = tau;
      break;
    }
  }

  const StateEnergy se = energy_by_state(trace);
  ordered_json j;
  j["samples"] = trace.size();
  j["sample_period_us"] = ts * 1e6;
  j["idle_reference_ma"] = idle_ref * 1e3;
  j["ict_ma"] = det.ict_a * 1e3;
  j["min_latency_ms"] = det.min_latency_s * 1e3;
  if (detected) {
    j["detected_completion_ms"] = *detected * 1e3;
    const double absolute = (static_cast<double>(wait_begin) * ts) + *detected;
    j["detected_completion_abs_ms"] = absolute * 1e3;
    j["slack_vs_trace_end_ms"] = (trace.duration_s() - absolute) * 1e3;
  } else {
    j["detected_completion_ms"] = nullptr;
    j["slack_vs_trace_end_ms"] = nullptr;
  }
  if (tf.true_completion_s) {
    j["embedded_true_completion_ms"] = *tf.true_completion_s * 1e3;
    if (detected) {
      j["detection_error_ms"] = (*detected - *tf.true_completion_s) * 1e3;
    }
  }
  j["energy_uj"] = ordered_json{{"idle", se.idle_j * 1e6},
                                {"active", se.active_j * 1e6},
                                {"wait", se.wait_j * 1e6},
                                {"verify", se.verify_j * 1e6},
                                {"total", se.total_j * 1e6}};
  return j;
}

int cmd_analyze(const std::string& input, const AnalyzeOptions& opt,
                const std::optional<fs::path>& output) {
  const TraceFile tf = read_trace_csv_file(input);
  const ordered_json j = analyze_trace(tf, opt);
  const std::string text = j.dump(2) + "\n";
  if (output) {
    write_file_atomic(*output, text);
  }
  std::cout << text;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// list-devices
// ---------------------------------------------------------------------------

int cmd_list_devices(const std::string& dump, const std::optional<fs::path>& output) {
  if (!dump.empty()) {
    const DeviceModel& model = builtin_model(dump);
    std::ostringstream out;
    write_device_model(out, model);
    if (output) {
      write_file_atomic(*output, out.str());
      std::printf("wrote %s\n", output->string().c_str());
    } else {
      std::cout << out.str();
    }
    return kExitOk;
  }
  for (const DeviceModel& m : builtin_models()) {
    std::printf("%-12s V=%.2fV idle=%.3fmA control=%s ops:", m.name.c_str(), m.supply_voltage_v,
                m.idle_current_a * 1e3, to_string(m.control_policy));
    for (const auto& [op, spec] : m.operations) {
      std::printf(" %s(wc=%.5gms)", op.c_str(), spec.worst_case_wait_s * 1e3);
    }
    std::printf("\n");
  }
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"trace-driven simulator for adaptive peripheral completion detection"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = default_output_dir().string();
  std::uint64_t seed = 1;
  bool seed_set = false;

  auto* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("-o,--output", out_dir, "output directory");
  run->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
    seed_set = true;
  });

  auto* suite = app.add_subcommand("suite", "reproduce the full benchmark matrix");
  std::string suite_out = (default_output_dir() / "suite").string();
  std::uint64_t suite_seed = 1;
  bool assert_headline = false;
  suite->add_option("-o,--output", suite_out, "output directory");
  suite->add_option("--seed", suite_seed, "experiment seed");
  suite->add_flag("--assert", assert_headline, "fail (exit 3) unless headline savings hold");

  auto* calibrate = app.add_subcommand("calibrate", "check a builtin model against its targets");
  std::string cal_device;
  std::uint64_t cal_seed = 1;
  calibrate->add_option("device", cal_device, "builtin device name")->required();
  calibrate->add_option("--seed", cal_seed, "experiment seed");

  auto* exportt = app.add_subcommand("export-trace", "simulate one operation and write its trace");
  std::string exp_device, exp_op, exp_out = "trace.csv";
  std::optional<double> exp_delay_ms;
  std::uint64_t exp_seed = 1;
  exportt->add_option("--device", exp_device, "builtin device name")->required();
  exportt->add_option("--operation", exp_op, "operation name (defaults to the first in the mix)");
  double exp_delay_tmp = 0.0;
  exportt->add_option("--delay-ms", exp_delay_tmp, "host wait duration (default: worst case)")
      ->each([&](const std::string&) { exp_delay_ms = exp_delay_tmp; });
  exportt->add_option("--seed", exp_seed, "simulation seed");
  exportt->add_option("-o,--output", exp_out, "trace file path");

  auto* analyze = app.add_subcommand("analyze", "offline completion detection on a trace file");
  std::string an_input;
  AnalyzeOptions an_opt;
  std::string an_out;
  analyze->add_option("--input", an_input, "trace CSV file")->required();
  analyze->add_option("--threshold-factor", an_opt.threshold_factor, "idle threshold factor");
  analyze->add_option("--min-latency-ms", an_opt.min_latency_ms, "minimum latency gate");
  analyze->add_option("--window", an_opt.window, "moving-average window");
  analyze->add_option("-o,--output", an_out, "also write the JSON report here");

  auto* list = app.add_subcommand("list-devices", "list builtin device models");
  std::string dump_device;
  std::string list_out;
  list->add_option("--dump", dump_device, "print one model in config-file form");
  list->add_option("-o,--output", list_out, "write the dumped model here");

  std::vector<const char*> argv;
  argv.push_back("pacersim");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) {
      return cmd_run(config_path, out_dir,
                     seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt);
    }
    if (suite->parsed()) return cmd_suite(suite_out, suite_seed, assert_headline);
    if (calibrate->parsed()) return cmd_calibrate(cal_device, cal_seed);
    if (exportt->parsed()) {
      return cmd_export_trace(exp_device, exp_op, exp_delay_ms, exp_seed, exp_out);
    }
    if (analyze->parsed()) {
      return cmd_analyze(an_input, an_opt,
                         an_out.empty() ? std::nullopt : std::optional<fs::path>(an_out));
    }
    if (list->parsed()) {
      return cmd_list_devices(dump_device,
                              list_out.empty() ? std::nullopt : std::optional<fs::path>(list_out));
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitValidation;
  } catch (const TraceParseError& e) {
    std::fprintf(stderr, "trace error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitUsage;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args);
}

}  // namespace pacer::cli
