#include <algorithm>
#include <cmath>

#include "agentcoord/error.hpp"
#include "agentcoord/experiment.hpp"
#include "agentcoord/linear_gaussian_task.hpp"

namespace agentcoord {

namespace {

void accumulate(std::vector<double>& into, const std::vector<MetricRecord>& log,
                double MetricRecord::*field, double weight) {
  if (into.empty()) into.assign(log.size(), 0.0);
  for (std::size_t t = 0; t < log.size(); ++t) into[t] += weight * (log[t].*field);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

RunOptions base_options(const ExperimentConfig& cfg, std::uint64_t seed) {
  RunOptions o;
  o.schedule = cfg.step_schedule();
  o.iterations = cfg.T;
  o.seed = seed;
  o.variant = cfg.variant;
  o.g_error_stride = cfg.g_error_stride;
  o.keep_trajectory = false;
  return o;
}

}  // namespace

CompareReport compare_weighting(
    const ExperimentConfig& cfg,
    const std::function<void(const std::string&, const RunResult&)>& sink) {
  cfg.validate();
  const std::vector<AgentRecord> records =
      cfg.task == TaskKind::kQuadraticOracle ? std::vector<AgentRecord>{} : build_agent_records(cfg);
  CompareReport report;
  report.task = cfg.task;
  report.T = cfg.T;
  report.seeds = cfg.seeds;
  const double w = 1.0 / static_cast<double>(cfg.seeds.size());

  auto record = [&](MethodSeries& s, const RunResult& r) {
    accumulate(s.c_error, r.log, &MetricRecord::c_error, w);
    accumulate(s.c_error_time_avg, r.log, &MetricRecord::c_error_time_avg, w);
    accumulate(s.g_error, r.log, &MetricRecord::g_error, w);
    s.final_time_avg.push_back(r.time_averaged_c_error());
  };

  for (const std::uint64_t seed : cfg.seeds) {
    const auto task = make_task(cfg, records, seed);
    const RunOptions opts = base_options(cfg, seed);
    const RunResult dyn = run_conflict_resolving(*task, opts);
    if (sink) sink("dynamic-seed" + std::to_string(seed), dyn);
    record(report.dynamic, dyn);
    const RunResult fixed =
        run_static_baseline(*task, WeightVector::uniform(task->agents()), opts);
    if (sink) sink("static-seed" + std::to_string(seed), fixed);
    record(report.fixed, fixed);
  }
  report.dynamic.mean_final_time_avg = mean(report.dynamic.final_time_avg);
  report.fixed.mean_final_time_avg = mean(report.fixed.final_time_avg);
  // Below this level the baseline has no conflict to resolve and the ratio
  // carries no information.
  constexpr double kNoConflict = 1e-12;
  report.conflict_free = report.fixed.mean_final_time_avg <= kNoConflict;
  report.ratio = report.conflict_free
                     ? 1.0
                     : report.dynamic.mean_final_time_avg / report.fixed.mean_final_time_avg;
  return report;
}

nlohmann::ordered_json to_json(const CompareReport& r) {
  auto series = [](const MethodSeries& s) {
    nlohmann::ordered_json j;
    j["mean_final_c_error_time_avg"] = s.mean_final_time_avg;
    j["final_c_error_time_avg_per_seed"] = s.final_time_avg;
    j["c_error"] = s.c_error;
    j["c_error_time_avg"] = s.c_error_time_avg;
    j["g_error"] = s.g_error;
    return j;
  };
  nlohmann::ordered_json j;
  j["task"] = to_string(r.task);
  j["T"] = r.T;
  j["seeds"] = r.seeds;
  j["ratio_dynamic_over_static"] = r.ratio;
  j["conflict_free"] = r.conflict_free;
  j["dynamic"] = series(r.dynamic);
  j["static"] = series(r.fixed);
  return j;
}

BoundReport verify_bounds(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.task != TaskKind::kQuadraticOracle) {
    throw ConfigError("bound verification needs the quadratic-oracle task (got '" +
                      to_string(cfg.task) + "')");
  }
  const VerifySettings& v = cfg.verify;
  if (v.sweep_seeds == 0 || v.rate_seeds == 0 || v.scaling_seeds == 0) {
    throw ConfigError("bound verification needs at least one seed per experiment");
  }
  const std::uint64_t seed0 = cfg.seeds.front();
  BoundReport report;
  {
    const QuadraticTask probe =
        make_conflicting_quadratic_task(cfg.quadratic_noise, cfg.quadratic_samples, seed0);
    report.constants = lipschitz_constants(probe);
    report.samples_per_agent = cfg.quadratic_samples;
  }

  for (const SweepSpec& s : v.sweep) {
    SweepResult res;
    res.spec = s;
    res.holds = true;
    res.bound = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t k = 0; k < v.sweep_seeds; ++k) {
      const std::uint64_t seed = seed0 + k;
      const QuadraticTask task =
          make_conflicting_quadratic_task(cfg.quadratic_noise, cfg.quadratic_samples, seed);
      const LipschitzConstants lc = lipschitz_constants(task);
      RunOptions o;
      o.schedule = StepSchedule::constant(s.eta, s.beta);
      o.iterations = s.T;
      o.seed = seed;
      o.variant = cfg.variant;
      o.g_error_stride = s.T;
      o.keep_trajectory = false;
      const double measured = run_conflict_resolving(task, o).time_averaged_c_error();
      BoundInputs in{lc.lf, lc.lfp, lc.lf, std::max<std::size_t>(cfg.quadratic_samples, 1), s.T,
                     s.eta, s.beta};
      const double bound = conflict_error_bound(in);
      res.holds = res.holds && measured <= bound;
      res.bound = std::min(res.bound, bound);
      total += measured;
    }
    res.measured = total / static_cast<double>(v.sweep_seeds);
    report.bounds_hold = report.bounds_hold && res.holds;
    report.sweep.push_back(res);
  }

  std::vector<double> log_t, log_c;
  for (const std::size_t T : v.rate_T) {
    double total = 0.0;
    for (std::size_t k = 0; k < v.rate_seeds; ++k) {
      const std::uint64_t seed = seed0 + k;
      const QuadraticTask task =
          make_conflicting_quadratic_task(cfg.quadratic_noise, cfg.quadratic_samples, seed);
      RunOptions o;
      o.schedule = StepSchedule::theory(T, cfg.eta0, cfg.beta0);
      o.iterations = T;
      o.seed = seed;
      o.variant = cfg.variant;
      o.g_error_stride = T;
      o.keep_trajectory = false;
      total += run_conflict_resolving(task, o).time_averaged_c_error();
    }
    const double m = total / static_cast<double>(v.rate_seeds);
    report.rate_T.push_back(T);
    report.rate_c_error.push_back(m);
    log_t.push_back(std::log(static_cast<double>(T)));
    log_c.push_back(std::log(m));
  }
  if (log_t.size() >= 2) report.rate_slope = least_squares_slope(log_t, log_c);

  for (const std::size_t D : v.scaling_D) {
    double total = 0.0;
    for (std::size_t k = 0; k < v.scaling_seeds; ++k) {
      const std::uint64_t seed = seed0 + k;
      const LinearGaussianTask task = make_linear_gaussian_task(D, seed);
      RunOptions o;
      o.schedule = StepSchedule::theory(v.scaling_T, cfg.eta0, cfg.beta0);
      o.iterations = v.scaling_T;
      o.seed = seed;
      o.variant = cfg.variant;
      o.g_error_stride = v.scaling_T;
      o.keep_trajectory = false;
      total += run_conflict_resolving(task, o).log.back().g_error;
    }
    report.scaling.push_back({v.scaling_T, D, total / static_cast<double>(v.scaling_seeds)});
  }
  if (report.scaling.size() >= 3) report.scaling_fit = fit_g_error_scaling(report.scaling);
  return report;
}

nlohmann::ordered_json to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["constants"] = {{"lf", r.constants.lf},
                    {"lfp", r.constants.lfp},
                    {"samples_per_agent", r.samples_per_agent}};
  auto sweep = nlohmann::ordered_json::array();
  for (const auto& s : r.sweep) {
    sweep.push_back({{"eta", s.spec.eta},
                     {"beta", s.spec.beta},
                     {"T", s.spec.T},
                     {"measured_c_error_time_avg", s.measured},
                     {"bound", s.bound},
                     {"holds", s.holds}});
  }
  j["sweep"] = sweep;
  j["bounds_hold"] = r.bounds_hold;
  j["rate"] = {{"T", r.rate_T}, {"c_error_time_avg", r.rate_c_error}, {"slope", r.rate_slope}};
  auto points = nlohmann::ordered_json::array();
  for (const auto& p : r.scaling) points.push_back({{"T", p.T}, {"D", p.D}, {"g_error", p.g_error}});
  j["g_error_scaling"] = {{"points", points}};
  if (r.scaling_fit.slope_vs_d) j["g_error_scaling"]["slope_vs_D"] = *r.scaling_fit.slope_vs_d;
  if (r.scaling_fit.slope_vs_t) j["g_error_scaling"]["slope_vs_T"] = *r.scaling_fit.slope_vs_t;
  return j;
}

}  // namespace agentcoord
