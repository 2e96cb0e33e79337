/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line; the
// process exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pacer/cli.hpp"
#include "pacer/config.hpp"
#include "pacer/csv.hpp"
#include "pacer/harness.hpp"
#include "pacer/report.hpp"
#include "pacer/rng.hpp"

using namespace pacer;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Checker {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }

  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

// All experiment arms used by the criteria, run once and cached.
class ArmCache {
 public:
  const BenchmarkReport& get(const std::string& device, DetectorKind kind, bool iodvs) {
    const std::string key = device + "/" + to_string(kind) + (iodvs ? "+iodvs" : "");
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    ExperimentConfig cfg;
    cfg.device = device;
    cfg.detector = kind;
    cfg.seed = kSeed;
    const DeviceModel model = builtin_model(device);
    cfg.overhead = model.default_overhead;
    if (iodvs) cfg.iodvs = model.default_iodvs;
    return cache_.emplace(key, run_experiment(cfg)).first->second;
  }

  double diff_pct(const std::string& device, DetectorKind kind, bool iodvs,
                  const std::string& stage, const std::string& metric) {
    const DiffTable d =
        compare_reports(get(device, kind, iodvs), get(device, DetectorKind::Control, false));
    for (const DiffRow& row : d.rows) {
      if (row.stage == stage && row.metric == metric) return row.diff_pct;
    }
    throw std::runtime_error("diff row not found: " + device + " " + stage + " " + metric);
  }

 private:
  std::map<std::string, BenchmarkReport> cache_;
};

ArmCache arms;

// --------------------------------------------------------------------------

Checker criterion_calibration() {
  Checker c;
  for (const std::string& device : builtin_model_names()) {
    const CalibrationTargets& t = builtin_calibration_targets(device);
    const BenchmarkReport& rep = arms.get(device, DetectorKind::Control, false);
    const auto check = [&](double measured, double target, const char* what) {
      if (target <= 0) return;
      const double dev = std::abs(measured - target) / target * 100.0;
      c.expect(dev <= 2.0, device + " " + what + " " + fmt(measured, 3) + " vs " +
                               fmt(target, 3) + " (" + fmt(dev) + "%)");
    };
    check(rep.wait_latency_s.mean * 1e3, t.control_wait_ms, "wait-ms");
    check(rep.all_latency_s.mean * 1e3, t.control_all_ms, "all-ms");
    check(rep.wait_energy_j.mean * 1e6, t.control_wait_uj, "wait-uJ");
    check(rep.all_energy_j.mean * 1e6, t.control_all_uj, "all-uJ");
  }
  if (c.ok) c.note("8 models within 2% of their control columns");
  return c;
}

Checker criterion_pacer_t_latency() {
  Checker c;
  const auto check = [&](const char* device, double target, double tol) {
    const double d = arms.diff_pct(device, DetectorKind::PacerT, false, "wait", "latency_ms");
    c.expect(std::abs(d - target) <= tol,
             std::string(device) + " wait-latency diff " + fmt(d) + "% vs " + fmt(target) + "%");
    if (c.ok) c.note(std::string(device) + " " + fmt(d) + "%");
  };
  check("eeprom", 30.5, 3.0);
  check("nor_flash", 70.0, 5.0);
  check("nand_flash", 66.6, 5.0);
  return c;
}

Checker criterion_pacer_t_energy() {
  Checker c;
  const auto check = [&](const char* device, double target, double tol) {
    const double d = arms.diff_pct(device, DetectorKind::PacerT, false, "all", "energy_uj");
    c.expect(std::abs(d - target) <= tol,
             std::string(device) + " all-energy diff " + fmt(d) + "% vs " + fmt(target) + "%");
    if (c.ok) c.note(std::string(device) + " " + fmt(d) + "%");
  };
  check("nor_flash", 38.9, 5.0);
  check("nand_flash", 17.8, 5.0);
  return c;
}

Checker criterion_iodvs() {
  Checker c;
  const double eeprom = arms.diff_pct("eeprom", DetectorKind::PacerT, true, "wait", "energy_uj");
  c.expect(std::abs(eeprom - 40.5) <= 5.0, "eeprom wait-energy diff " + fmt(eeprom) + "% vs 40.5%");
  const double nor = arms.diff_pct("nor_flash", DetectorKind::PacerT, true, "all", "energy_uj");
  c.expect(std::abs(nor - 49.1) <= 5.0, "nor all-energy diff " + fmt(nor) + "% vs 49.1%");
  const double swissbit =
      arms.diff_pct("sd_swissbit", DetectorKind::PacerC, true, "wait", "energy_uj");
  c.expect(std::abs(swissbit - 80.0) <= 8.0, "swissbit energy diff " + fmt(swissbit) + "% vs 80%");
  if (c.ok) {
    c.note("eeprom " + fmt(eeprom) + "%, nor " + fmt(nor) + "%, swissbit " + fmt(swissbit) + "%");
  }
  return c;
}

Checker criterion_pacer_c_spread() {
  Checker c;
  const double swissbit =
      arms.diff_pct("sd_swissbit", DetectorKind::PacerC, false, "wait", "energy_uj");
  c.expect(std::abs(swissbit - 66.9) <= 10.0,
           "swissbit energy diff " + fmt(swissbit) + "% vs 66.9%");
  const double kingston =
      arms.diff_pct("sd_kingston", DetectorKind::PacerC, false, "wait", "energy_uj");
  c.expect(kingston < 5.0, "kingston energy diff " + fmt(kingston) + "% not under 5%");
  const double sandisk =
      arms.diff_pct("sd_sandisk", DetectorKind::PacerC, false, "wait", "energy_uj");
  c.expect(std::abs(sandisk - 10.9) <= 5.0, "sandisk energy diff " + fmt(sandisk) + "% vs 10.9%");
  if (c.ok) {
    c.note("swissbit " + fmt(swissbit) + "%, kingston " + fmt(kingston) + "%, sandisk " +
           fmt(sandisk) + "%");
  }
  return c;
}

Checker criterion_pacer_e_sensor() {
  Checker c;
  const BenchmarkReport& e = arms.get("hih6130", DetectorKind::PacerE, false);
  const double wait_ms = e.wait_latency_s.mean * 1e3;
  const double wait_uj = e.wait_energy_j.mean * 1e6;
  c.expect(std::abs(wait_ms - 31.45) <= 0.05 * 31.45,
           "wait latency " + fmt(wait_ms, 3) + " ms vs 31.45 +-5%");
  c.expect(std::abs(wait_uj - 240.29) <= 0.05 * 240.29,
           "wait energy " + fmt(wait_uj, 2) + " uJ vs 240.29 +-5%");

  const BenchmarkReport& t = arms.get("hih6130", DetectorKind::PacerT, false);
  const double lat_gap =
      std::abs(t.wait_latency_s.mean - e.wait_latency_s.mean) / e.wait_latency_s.mean * 100.0;
  const double energy_gap =
      std::abs(t.wait_energy_j.mean - e.wait_energy_j.mean) / e.wait_energy_j.mean * 100.0;
  c.expect(lat_gap <= 0.5, "timing detector latency gap " + fmt(lat_gap, 3) + "% > 0.5%");
  c.expect(energy_gap <= 4.3, "timing detector energy gap " + fmt(energy_gap, 2) + "% > 4.3%");
  if (c.ok) {
    c.note("wait " + fmt(wait_ms, 2) + " ms / " + fmt(wait_uj, 2) + " uJ; timing gap " +
           fmt(lat_gap, 2) + "% / " + fmt(energy_gap, 2) + "%");
  }
  return c;
}

Checker criterion_headline() {
  Checker c;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("pacersim_acceptance_suite_" + std::to_string(splitmix64(
                        static_cast<std::uint64_t>(std::random_device{}()))));
  const int rc = cli::dispatch({"suite", "-o", dir.string(), "--assert"});
  c.expect(rc == 0, "suite --assert exited with " + std::to_string(rc));
  c.expect(std::filesystem::exists(dir / "summary.json"), "summary.json missing");
  for (const char* table : {"table1_eeprom.csv", "table2_nor_flash.csv", "table3_nand_flash.csv",
                            "table4_micro_sd.csv", "table5_hih6130.csv"}) {
    c.expect(std::filesystem::exists(dir / table), std::string(table) + " missing");
  }
  if (c.ok) c.note("suite asserts >=75% energy and >=62% latency reductions");
  std::filesystem::remove_all(dir);
  return c;
}

Checker criterion_properties() {
  Checker c;

  // (a) interval nesting and width halving against a bisection oracle
  {
    std::mt19937_64 eng(404);
    std::uniform_real_distribution<double> wc_dist(1e-3, 400e-3);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    bool oracle_ok = true;
    for (int device = 0; device < 100 && oracle_ok; ++device) {
      const double wc = wc_dist(eng);
      const double t_true = wc * frac(eng);
      TimingHeuristicState s = pacer_t_init(wc);
      double lo = 0.0, hi = wc, width = wc;
      for (int k = 1; k <= 20; ++k) {
        const double guess = pacer_t_next_guess(s);
        const double mid = 0.5 * (lo + hi);
        oracle_ok = oracle_ok && guess == mid;
        const VerifyResult r = guess >= t_true ? VerifyResult::Pass : VerifyResult::Fail;
        s = pacer_t_update(s, guess, r);
        (mid >= t_true ? hi : lo) = mid;
        oracle_ok = oracle_ok && s.lower_s == lo && s.upper_s == hi;
        const double w = s.upper_s - s.lower_s;
        oracle_ok = oracle_ok && w <= width && w <= wc / std::pow(2.0, k) + 1e-12 * wc;
        oracle_ok = oracle_ok && s.lower_s <= t_true && s.upper_s >= t_true - 1e-15;
        width = w;
      }
    }
    c.expect(oracle_ok, "bisection-oracle equivalence failed");
  }

  // (b) the current heuristic never fires before its latency gate
  {
    std::mt19937_64 eng(405);
    std::uniform_real_distribution<double> cur(-2e-3, 60e-3);
    std::uniform_real_distribution<double> lat(1e-6, 50e-3);
    bool gate_ok = true;
    int steps = 0;
    while (steps < 100000) {
      const double min_latency = lat(eng);
      const CurrentHeuristicState det = pacer_c_init(1e-3, 1.10, min_latency);
      for (int i = 0; i < 200 && steps < 100000; ++i, ++steps) {
        const double t = min_latency * (static_cast<double>(i) / 200.0);
        gate_ok = gate_ok && pacer_c_step(det, cur(eng), t) == CompletionMark::Ongoing;
      }
    }
    c.expect(gate_ok, "current heuristic fired before the latency gate");
  }

  // (c) compensated integration equals a brute-force oracle
  {
    std::mt19937_64 eng(406);
    std::uniform_real_distribution<double> volt(1.8, 5.0);
    std::uniform_real_distribution<double> cur(-0.001, 0.05);
    bool energy_ok = true;
    for (int round = 0; round < 5; ++round) {
      CurrentTrace t;
      t.samples.reserve(100000);
      for (int n = 0; n < 100000; ++n) {
        t.samples.push_back(Sample{volt(eng), cur(eng), DeviceState::Wait});
      }
      long double oracle = 0.0L;
      for (const Sample& s : t.samples) {
        oracle += static_cast<long double>(s.voltage_v) * s.current_a * t.sample_period_s;
      }
      const double got = energy_integrate_j(t);
      energy_ok =
          energy_ok && std::abs(got - static_cast<double>(oracle)) <=
                           1e-9 * std::abs(static_cast<double>(oracle));
    }
    c.expect(energy_ok, "integration disagrees with the brute-force oracle");
  }

  // (d) wait-energy bilinearity of the voltage-scaling transform
  {
    std::mt19937_64 eng(407);
    std::uniform_real_distribution<double> cur(0.0, 0.05);
    bool bilinear_ok = true;
    for (int round = 0; round < 5; ++round) {
      CurrentTrace t;
      for (int n = 0; n < 20000; ++n) {
        t.samples.push_back(
            Sample{3.3, cur(eng), n % 3 == 0 ? DeviceState::Active : DeviceState::Wait});
      }
      const IODVSPolicy policy{3.3, 2.2 + 0.2 * round, 0.7 + 0.05 * round, 0.0};
      const double before = energy_by_state(t).wait_j;
      const double after = energy_by_state(apply_iodvs(t, policy)).wait_j;
      const double expect =
          before * (policy.v_wait_v / policy.v_nominal_v) * policy.wait_current_scale;
      bilinear_ok = bilinear_ok && std::abs(after - expect) <= 1e-9 * std::abs(expect);
    }
    c.expect(bilinear_ok, "voltage-scaling bilinearity violated");
  }

  // (e) safety across a randomized device corpus
  {
    std::mt19937_64 eng(408);
    std::uniform_real_distribution<double> frac(0.1, 0.9);
    std::uniform_real_distribution<double> wc_range(2e-3, 30e-3);
    bool safety_ok = true;
    for (int round = 0; round < 9; ++round) {
      DeviceModel m;
      m.name = "corpus";
      m.idle_current_a = 1e-3;
      m.supply_voltage_v = 3.3;
      m.verify_phase_s = 0.2e-3;
      OperationSpec op;
      op.worst_case_wait_s = wc_range(eng);
      const double t = op.worst_case_wait_s * frac(eng);
      switch (round % 3) {
        case 0:
          op.actual_completion = Deterministic{t};
          break;
        case 1:
          op.actual_completion = NormalDist{t, 0.15 * t};
          break;
        default:
          op.actual_completion = BimodalDist{0.4 * t, t, 0.35};
          break;
      }
      op.active_phase_s = 0.2e-3;
      op.currents = {1e-3, 3e-3, 5e-3, 2e-3};
      op.noise_stddev_a = 0.05e-3;
      m.operations["op"] = op;
      m.default_mix = {{"op", 1}};
      for (const auto kind : {DetectorKind::Control, DetectorKind::PacerT, DetectorKind::PacerE,
                              DetectorKind::PacerC}) {
        ExperimentConfig cfg;
        cfg.device = m.name;
        cfg.model = m;
        cfg.detector = kind;
        cfg.trials = 10;
        cfg.warmup = 3;
        cfg.seed = eng();
        const BenchmarkReport rep = run_experiment(cfg);
        for (const TrialResult& tr : rep.trial_log) safety_ok = safety_ok && tr.passed;
      }
    }
    c.expect(safety_ok, "a harness trial failed verification");
  }

  // (f) byte-identical reports under repeated seeded runs
  {
    ExperimentConfig cfg;
    cfg.device = "nand_flash";
    cfg.detector = DetectorKind::PacerT;
    cfg.seed = 2024;
    const std::string a = report_to_json(run_experiment(cfg));
    const std::string b = report_to_json(run_experiment(cfg));
    c.expect(a == b, "repeated seeded runs differ");
  }

  if (c.ok) c.note("oracle, gate, integration, bilinearity, safety, reproducibility");
  return c;
}

Checker criterion_drift() {
  Checker c;
  ExperimentConfig cfg;
  cfg.device = "eeprom";
  cfg.detector = DetectorKind::PacerT;
  cfg.seed = kSeed;
  cfg.drift = {{25, 1.15}};

  const auto log = run_convergence_study(cfg, 50);
  const double t_new = 3.505e-3 * 1.15;
  int reconverged_at = -1;
  for (const ConvergenceRecord& rec : log) {
    if (rec.trial > 25 && std::abs(rec.issued - t_new) <= 0.02 * t_new) {
      reconverged_at = rec.trial;
      break;
    }
  }
  c.expect(reconverged_at > 0, "never re-converged after the completion-time step");
  if (reconverged_at > 0) {
    c.expect(reconverged_at - 25 <= 20, "re-convergence took " +
                                            std::to_string(reconverged_at - 25) + " trials");
  }

  ExperimentConfig full = cfg;
  full.trials = 50;
  full.warmup = 20;
  const BenchmarkReport rep = run_experiment(full);
  bool all_passed = true;
  for (const TrialResult& t : rep.trial_log) all_passed = all_passed && t.passed;
  c.expect(all_passed, "a drift trial failed verification");
  if (c.ok) {
    c.note("re-converged " + std::to_string(reconverged_at - 25) +
           " trials after the step, zero verification failures");
  }
  return c;
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Entry {
    int id;
    const char* name;
    std::function<Checker()> run;
  };
  const std::vector<Entry> criteria = {
      {1, "calibration vs control columns", criterion_calibration},
      {2, "timing-detector latency savings", criterion_pacer_t_latency},
      {3, "timing-detector energy savings", criterion_pacer_t_energy},
      {4, "voltage-scaling savings", criterion_iodvs},
      {5, "current-detector spread", criterion_pacer_c_spread},
      {6, "energy detector on the sensor", criterion_pacer_e_sensor},
      {7, "headline suite claims", criterion_headline},
      {8, "property suite", criterion_properties},
      {9, "drift resilience", criterion_drift},
  };

  int failures = 0;
  for (const Entry& entry : criteria) {
    Checker c;
    try {
      c = entry.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %d. %s%s%s\n", c.ok ? "PASS" : "FAIL", entry.id, entry.name,
                c.detail.empty() ? "" : ": ", c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }

  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  std::printf("%d/%zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failures,
              criteria.size(), static_cast<double>(elapsed.count()) / 1000.0);
  return failures;
}
