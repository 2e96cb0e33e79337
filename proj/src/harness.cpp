/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "pacer/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pacer/rng.hpp"

namespace pacer {

const char* to_string(DetectorKind k) {
  switch (k) {
    case DetectorKind::Control:
      return "control";
    case DetectorKind::PacerT:
      return "pacer_t";
    case DetectorKind::PacerE:
      return "pacer_e";
    case DetectorKind::PacerC:
      return "pacer_c";
  }
  return "?";
}

DetectorKind detector_kind_from_string(const std::string& label) {
  if (label == "control") return DetectorKind::Control;
  if (label == "pacer_t") return DetectorKind::PacerT;
  if (label == "pacer_e") return DetectorKind::PacerE;
  if (label == "pacer_c") return DetectorKind::PacerC;
  throw std::invalid_argument("unknown detector kind: '" + label + "'");
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (warmup < 0 || warmup >= trials) {
    throw std::invalid_argument("warmup must be in [0, trials)");
  }
  if (poll_period_s < 0.0) throw std::invalid_argument("poll_period_us must be >= 0");
  if (!(params.threshold_factor > 1.0)) {
    throw std::invalid_argument("threshold_factor must exceed 1");
  }
  if (params.min_latency_s < 0.0) throw std::invalid_argument("min_latency_ms must be >= 0");
  if (params.resolution_s < 0.0) throw std::invalid_argument("resolution_us must be >= 0");
  if (!(params.widen_factor > 0.0)) throw std::invalid_argument("widen_factor must be positive");
  if (params.filter_window == 0) throw std::invalid_argument("filter_window must be >= 1");
  for (const auto& [op, count] : operation_mix) {
    if (count < 1) throw std::invalid_argument("operation count for '" + op + "' must be >= 1");
  }
  for (const DriftEvent& ev : drift) {
    if (ev.from_trial < 0 || !(ev.completion_scale > 0.0)) {
      throw std::invalid_argument("drift events need from_trial >= 0 and a positive scale");
    }
  }
  if (iodvs) iodvs->validate();
}

DeviceModel resolve_model(const ExperimentConfig& cfg) {
  return cfg.model ? *cfg.model : builtin_model(cfg.device);
}

long DetectorBank::widen_events() const {
  long n = 0;
  for (const auto& [op, st] : timing) n += st.widen_events;
  for (const auto& [op, st] : energy) n += st.widen_events;
  return n;
}

namespace {

double ceil_to_grid(double x, double grid) {
  if (grid <= 0.0) return x;
  return std::ceil(x / grid - 1e-9) * grid;
}

// First poll instant at or after the true completion, polling every poll_s
// starting from from_s (where the host already found the device busy).
double poll_until_complete(double from_s, double true_s, double poll_s) {
  if (true_s <= from_s) return from_s;
  if (poll_s <= 0.0) return true_s;
  const double k = std::ceil((true_s - from_s) / poll_s - 1e-12);
  return from_s + k * poll_s;
}

struct OpRun {
  double host_delay_s = 0.0;
  double poll_extension_s = 0.0;
  bool fail_extended = false;
  OperationOutcome outcome;
};

struct TrialContext {
  const ExperimentConfig& cfg;
  const DeviceModel& model;
  DetectorBank& bank;
  int trial = 0;
  std::vector<ConvergenceRecord>* recorder = nullptr;
};

OpRun run_control(const TrialContext& ctx, const std::string& op_name, const OperationSpec& spec,
                  std::uint64_t seed) {
  OpRun run;
  if (ctx.model.control_policy == ControlPolicy::WorstCase) {
    run.host_delay_s = spec.worst_case_wait_s + ctx.model.control_quantum_s;
  } else {
    // Cached media: the naive host waits the characterization median, then
    // polls out the slow completions.
    const double median = median_completion_s(spec);
    const double t_true = draw_completion(spec, seed);
    run.host_delay_s = median;
    if (t_true > median) {
      run.host_delay_s = poll_until_complete(median, t_true, ctx.cfg.poll_period_s);
      run.poll_extension_s = run.host_delay_s - median;
    }
  }
  run.outcome = simulate_operation(ctx.model, op_name, run.host_delay_s, seed);
  return run;
}

OpRun run_pacer_t(const TrialContext& ctx, const std::string& op_name, const OperationSpec& spec,
                  std::uint64_t seed) {
  auto& state =
      ctx.bank.timing.try_emplace(op_name, pacer_t_init(spec.worst_case_wait_s)).first->second;
  const DetectorParams& p = ctx.cfg.params;

  const double guess = pacer_t_next_guess(state);
  const double issued =
      std::min(ceil_to_grid(guess, p.resolution_s), spec.worst_case_wait_s);
  const double t_true = draw_completion(spec, seed);

  OpRun run;
  run.host_delay_s = issued;
  std::optional<double> observed;
  VerifyResult result = issued >= t_true ? VerifyResult::Pass : VerifyResult::Fail;
  if (result == VerifyResult::Fail) {
    run.host_delay_s = poll_until_complete(issued, t_true, ctx.cfg.poll_period_s);
    run.poll_extension_s = run.host_delay_s - issued;
    run.fail_extended = true;
    observed = run.host_delay_s;
  }
  run.outcome = simulate_operation(ctx.model, op_name, run.host_delay_s, seed);

  // The scheduler grid decided the actual wait, so the bounds fold in the
  // issued value; folding the raw midpoint would claim a tighter pass than
  // the device ever saw.
  const long widen_before = state.widen_events;
  state = pacer_t_update(state, issued, result, observed);
  state = pacer_t_widen(
      state, DriftPolicy{p.resolution_s, p.widen_factor, p.pass_probe_streak}, result);
  if (ctx.recorder) {
    ctx.recorder->push_back({ctx.trial, op_name, guess, issued, result,
                             state.upper_s - state.lower_s,
                             state.widen_events != widen_before});
  }
  return run;
}

OpRun run_pacer_e(const TrialContext& ctx, const std::string& op_name, const OperationSpec& spec,
                  std::uint64_t seed) {
  const double ts = ctx.model.sample_period_s;
  const double wc = spec.worst_case_wait_s;

  // Full-length view the detector samples from. The reported trace is
  // re-simulated at the actual stop; the shared prefix is bit-identical.
  OperationOutcome full = simulate_operation(ctx.model, op_name, wc, seed);
  CurrentTrace view = ctx.cfg.iodvs ? apply_iodvs(full.trace, *ctx.cfg.iodvs) : full.trace;
  const std::size_t n0 = full.wait_begin_index;
  const std::size_t n_wait = static_cast<std::size_t>(std::llround(wc / ts));

  auto it = ctx.bank.energy.find(op_name);
  if (it == ctx.bank.energy.end()) {
    // Calibration trial: wait out the worst case once and take the wait-phase
    // integral as the initial upper energy limit.
    double e = 0.0;
    for (std::size_t k = 0; k < n_wait; ++k) {
      const Sample& s = view.samples[n0 + k];
      e += s.voltage_v * s.current_a * ts;
    }
    ctx.bank.energy.emplace(op_name, pacer_e_init(e));
    OpRun run;
    run.host_delay_s = wc;
    run.outcome = std::move(full);
    return run;
  }

  EnergyHeuristicState state = pacer_e_begin_trial(it->second);
  const double guess = pacer_e_next_guess(state);
  double t_stop = wc;
  std::size_t k_stop = n_wait;
  for (std::size_t k = 0; k < n_wait; ++k) {
    const EnergyStepResult sr = pacer_e_step(state, view.samples[n0 + k], ts);
    state = sr.state;
    if (sr.reached) {
      k_stop = k + 1;
      t_stop = static_cast<double>(k_stop) * ts;
      break;
    }
  }

  OpRun run;
  run.host_delay_s = t_stop;
  std::optional<double> observed;
  VerifyResult result = t_stop >= full.true_completion_s ? VerifyResult::Pass : VerifyResult::Fail;
  if (result == VerifyResult::Fail) {
    run.host_delay_s = poll_until_complete(t_stop, full.true_completion_s, ctx.cfg.poll_period_s);
    run.poll_extension_s = run.host_delay_s - t_stop;
    run.fail_extended = true;
    const auto k_end = std::min(
        n_wait, static_cast<std::size_t>(std::llround(run.host_delay_s / ts)));
    for (std::size_t k = k_stop; k < k_end; ++k) {
      state = pacer_e_step(state, view.samples[n0 + k], ts).state;
    }
    observed = state.accumulator_j;
  }
  it->second = pacer_e_update(state, guess, result, observed);
  if (ctx.recorder) {
    ctx.recorder->push_back({ctx.trial, op_name, guess, guess, result,
                             it->second.upper_j - it->second.lower_j, false});
  }
  run.outcome = simulate_operation(ctx.model, op_name, run.host_delay_s, seed);
  return run;
}

OpRun run_pacer_c(const TrialContext& ctx, const std::string& op_name, const OperationSpec& spec,
                  std::uint64_t seed) {
  const DetectorParams& p = ctx.cfg.params;
  const double ts = ctx.model.sample_period_s;
  const double wc = spec.worst_case_wait_s;

  OperationOutcome full = simulate_operation(ctx.model, op_name, wc, seed);
  CurrentTrace view = ctx.cfg.iodvs ? apply_iodvs(full.trace, *ctx.cfg.iodvs) : full.trace;
  const std::size_t n0 = full.wait_begin_index;
  const std::size_t n_wait = static_cast<std::size_t>(std::llround(wc / ts));

  // Idle reference taken before the operation begins, re-measured every trial.
  const std::size_t n_idle = static_cast<std::size_t>(std::llround(ctx.model.idle_lead_s / ts));
  double idle_meas = ctx.model.idle_current_a;
  if (n_idle > 0) {
    double sum = 0.0;
    for (std::size_t n = 0; n < n_idle; ++n) sum += view.samples[n].current_a;
    idle_meas = sum / static_cast<double>(n_idle);
  }
  const double min_latency =
      p.min_latency_s > 0.0 ? p.min_latency_s : 0.5 * min_completion_s(spec);
  const CurrentHeuristicState state = pacer_c_init(idle_meas, p.threshold_factor, min_latency);
  ctx.bank.current[op_name] = state;

  MovingAverageFilter filter(p.filter_window);
  double t_stop = wc;
  for (std::size_t n = 0; n < n0 + n_wait && n < view.samples.size(); ++n) {
    const double filtered = filter.push(view.samples[n].current_a);
    if (n < n0) continue;
    const double tau = static_cast<double>(n - n0 + 1) * ts;
    if (pacer_c_step(state, filtered, tau) == CompletionMark::Complete) {
      t_stop = tau;
      break;
    }
  }

  OpRun run;
  run.host_delay_s = t_stop;
  VerifyResult result = t_stop >= full.true_completion_s ? VerifyResult::Pass : VerifyResult::Fail;
  if (result == VerifyResult::Fail) {
    run.host_delay_s = poll_until_complete(t_stop, full.true_completion_s, ctx.cfg.poll_period_s);
    run.poll_extension_s = run.host_delay_s - t_stop;
    run.fail_extended = true;
  }
  if (ctx.recorder) {
    ctx.recorder->push_back(
        {ctx.trial, op_name, t_stop, t_stop, result, 0.0, false});
  }
  run.outcome = simulate_operation(ctx.model, op_name, run.host_delay_s, seed);
  return run;
}

TrialResult run_trial_impl(const ExperimentConfig& cfg, const DeviceModel& base_model,
                           DetectorBank& bank, int trial,
                           std::vector<ConvergenceRecord>* recorder) {
  double drift_scale = 1.0;
  for (const DriftEvent& ev : cfg.drift) {
    if (trial >= ev.from_trial) drift_scale = ev.completion_scale;
  }
  DeviceModel scaled;
  const DeviceModel* model = &base_model;
  if (drift_scale != 1.0) {
    scaled = base_model;
    for (auto& [name, op] : scaled.operations) op = scale_completion(op, drift_scale);
    model = &scaled;
  }

  const OverheadModel overhead =
      cfg.overhead ? *cfg.overhead : model->default_overhead.value_or(OverheadModel{});
  const double p_overhead = overhead.total_power_w();
  const auto& mix = cfg.operation_mix.empty() ? model->default_mix : cfg.operation_mix;
  if (mix.empty()) throw std::invalid_argument("operation mix is empty");

  TrialContext ctx{cfg, *model, bank, trial, recorder};
  TrialResult res;
  res.passed = true;

  int ordinal = 0;
  for (const auto& [op_name, count] : mix) {
    const OperationSpec& spec = model->operation(op_name);
    for (int i = 0; i < count; ++i, ++ordinal) {
      const std::uint64_t seed =
          mix_seed(mix_seed(cfg.seed, static_cast<std::uint64_t>(trial)),
                   static_cast<std::uint64_t>(ordinal));
      OpRun run;
      switch (cfg.detector) {
        case DetectorKind::Control:
          run = run_control(ctx, op_name, spec, seed);
          break;
        case DetectorKind::PacerT:
          run = run_pacer_t(ctx, op_name, spec, seed);
          break;
        case DetectorKind::PacerE:
          run = run_pacer_e(ctx, op_name, spec, seed);
          break;
        case DetectorKind::PacerC:
          run = run_pacer_c(ctx, op_name, spec, seed);
          break;
      }

      const CurrentTrace* trace = &run.outcome.trace;
      CurrentTrace transformed;
      if (cfg.iodvs) {
        transformed = apply_iodvs(*trace, *cfg.iodvs);
        trace = &transformed;
      }
      const StateEnergy se = energy_by_state(*trace);
      const double poll_energy = p_overhead * run.poll_extension_s;
      const double iodvs_energy = cfg.iodvs ? 2.0 * cfg.iodvs->transition_energy_j : 0.0;

      res.wait_latency_s += run.host_delay_s;
      res.all_latency_s += spec.active_phase_s + run.host_delay_s + model->verify_phase_s;
      res.wait_energy_j += se.wait_j + poll_energy + iodvs_energy;
      res.all_energy_j += se.active_j + se.wait_j + se.verify_j + poll_energy + iodvs_energy;
      res.fail_extended = res.fail_extended || run.fail_extended;
      res.clamped = res.clamped || run.outcome.clamped;
      res.passed =
          res.passed && verify_operation(run.outcome, run.host_delay_s) == VerifyResult::Pass;
    }
  }
  return res;
}

Stats stats_over(const std::vector<TrialResult>& log, int warmup,
                 double TrialResult::*field) {
  Stats st;
  const auto n = static_cast<long>(log.size()) - warmup;
  if (n <= 0) return st;
  double sum = 0.0;
  for (std::size_t i = static_cast<std::size_t>(warmup); i < log.size(); ++i) {
    sum += log[i].*field;
  }
  st.mean = sum / static_cast<double>(n);
  if (n >= 2) {
    double sq = 0.0;
    for (std::size_t i = static_cast<std::size_t>(warmup); i < log.size(); ++i) {
      const double d = log[i].*field - st.mean;
      sq += d * d;
    }
    st.stddev = std::sqrt(sq / static_cast<double>(n - 1));
  }
  return st;
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& cfg, const DeviceModel& model, DetectorBank& bank,
                      int trial_index) {
  return run_trial_impl(cfg, model, bank, trial_index, nullptr);
}

BenchmarkReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const DeviceModel model = resolve_model(cfg);

  BenchmarkReport rep;
  rep.device = model.name;
  rep.detector = to_string(cfg.detector);
  rep.iodvs = cfg.iodvs.has_value();
  rep.operation_mix = cfg.operation_mix.empty() ? model.default_mix : cfg.operation_mix;
  rep.trials = cfg.trials;
  rep.warmup = cfg.warmup;
  rep.seed = cfg.seed;
  rep.latency_reported = model.control_policy == ControlPolicy::WorstCase;

  DetectorBank bank;
  rep.trial_log.reserve(static_cast<std::size_t>(cfg.trials));
  for (int t = 0; t < cfg.trials; ++t) {
    rep.trial_log.push_back(run_trial_impl(cfg, model, bank, t, nullptr));
  }

  rep.wait_latency_s = stats_over(rep.trial_log, cfg.warmup, &TrialResult::wait_latency_s);
  rep.all_latency_s = stats_over(rep.trial_log, cfg.warmup, &TrialResult::all_latency_s);
  rep.wait_energy_j = stats_over(rep.trial_log, cfg.warmup, &TrialResult::wait_energy_j);
  rep.all_energy_j = stats_over(rep.trial_log, cfg.warmup, &TrialResult::all_energy_j);
  for (const TrialResult& tr : rep.trial_log) {
    rep.clamp_count += tr.clamped ? 1 : 0;
    rep.fail_extension_count += tr.fail_extended ? 1 : 0;
  }
  rep.widen_count = bank.widen_events();

  if (cfg.detector == DetectorKind::PacerT || cfg.detector == DetectorKind::PacerE) {
    for (const auto& [name, count] : rep.operation_mix) {
      (void)count;
      const OperationSpec& spec = model.operation(name);
      if (std::holds_alternative<BimodalDist>(spec.actual_completion)) {
        rep.notes.push_back("operation '" + name +
                            "' has a bimodal completion distribution; successive "
                            "approximation will oscillate (recorded, not prevented)");
        break;
      }
    }
  }
  if (!cfg.overhead && !model.default_overhead) {
    rep.notes.push_back("overhead model: zero placeholder, not calibrated");
  }
  return rep;
}

DiffTable compare_reports(const BenchmarkReport& treatment, const BenchmarkReport& control) {
  if (treatment.device != control.device || treatment.operation_mix != control.operation_mix) {
    throw std::invalid_argument("compare_reports requires the same device and operation mix");
  }
  DiffTable table;
  table.device = treatment.device;
  table.detector = treatment.detector;
  table.iodvs = treatment.iodvs;
  table.latency_reported = treatment.latency_reported && control.latency_reported;

  const auto diff = [](double c, double t) { return c == 0.0 ? 0.0 : (c - t) / c * 100.0; };
  if (table.latency_reported) {
    table.rows.push_back({"wait", "latency_ms", control.wait_latency_s.mean * 1e3,
                          treatment.wait_latency_s.mean * 1e3,
                          diff(control.wait_latency_s.mean, treatment.wait_latency_s.mean)});
    table.rows.push_back({"all", "latency_ms", control.all_latency_s.mean * 1e3,
                          treatment.all_latency_s.mean * 1e3,
                          diff(control.all_latency_s.mean, treatment.all_latency_s.mean)});
  }
  table.rows.push_back({"wait", "energy_uj", control.wait_energy_j.mean * 1e6,
                        treatment.wait_energy_j.mean * 1e6,
                        diff(control.wait_energy_j.mean, treatment.wait_energy_j.mean)});
  if (table.latency_reported) {
    table.rows.push_back({"all", "energy_uj", control.all_energy_j.mean * 1e6,
                          treatment.all_energy_j.mean * 1e6,
                          diff(control.all_energy_j.mean, treatment.all_energy_j.mean)});
  }
  return table;
}

std::vector<ConvergenceRecord> run_convergence_study(const ExperimentConfig& cfg,
                                                     int max_trials) {
  ExperimentConfig study = cfg;
  study.trials = std::max(1, max_trials);
  study.warmup = 0;
  study.validate();
  const DeviceModel model = resolve_model(study);
  DetectorBank bank;
  std::vector<ConvergenceRecord> records;
  for (int t = 0; t < study.trials; ++t) {
    run_trial_impl(study, model, bank, t, &records);
  }
  return records;
}

}  // namespace pacer
