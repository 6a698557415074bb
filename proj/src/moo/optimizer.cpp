#include "agentcoord/optimizer.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <json.hpp>

#include "agentcoord/error.hpp"
#include "agentcoord/kernels.hpp"
#include "agentcoord/metrics.hpp"
#include "agentcoord/min_norm.hpp"
#include "agentcoord/rng.hpp"

namespace agentcoord {

std::string to_string(WeightVariant v) {
  return v == WeightVariant::kMatrix ? "matrix" : "literal-diagonal";
}

WeightVariant parse_variant(const std::string& s) {
  if (s == "matrix") return WeightVariant::kMatrix;
  if (s == "literal-diagonal") return WeightVariant::kLiteralDiagonal;
  throw ConfigError("unknown weight variant '" + s + "' (expected matrix|literal-diagonal)");
}

std::string to_string(ScheduleKind k) {
  return k == ScheduleKind::kTheory ? "theory" : "constant";
}

ScheduleKind parse_schedule_kind(const std::string& s) {
  if (s == "theory") return ScheduleKind::kTheory;
  if (s == "constant") return ScheduleKind::kConstant;
  throw ConfigError("unknown schedule kind '" + s + "' (expected constant|theory)");
}

StepSchedule StepSchedule::constant(double eta, double beta) {
  return {ScheduleKind::kConstant, eta, beta, 1};
}

StepSchedule StepSchedule::theory(std::size_t horizon, double eta0, double beta0) {
  return {ScheduleKind::kTheory, eta0, beta0, horizon};
}

void StepSchedule::validate() const {
  if (!(eta0 > 0.0) || !(beta0 > 0.0) || !std::isfinite(eta0) || !std::isfinite(beta0)) {
    throw InvalidInput("step schedule constants must be positive and finite");
  }
  if (horizon == 0) throw InvalidInput("step schedule horizon must be positive");
}

double StepSchedule::eta(std::size_t) const {
  if (kind == ScheduleKind::kConstant) return eta0;
  return eta0 * std::pow(static_cast<double>(horizon), -0.25);
}

double StepSchedule::beta(std::size_t) const {
  if (kind == ScheduleKind::kConstant) return beta0;
  return beta0 * std::pow(static_cast<double>(horizon), -0.75);
}

double RunResult::time_averaged_c_error(std::optional<std::size_t> t) const {
  if (log.empty()) return 0.0;
  const std::size_t idx = t ? std::min(*t, log.size() - 1) : log.size() - 1;
  return log[idx].c_error_time_avg;
}

WeightVector dynamic_weight_step(const WeightVector& gamma, const GradientMatrix& J1,
                                 const GradientMatrix& J2, double eta,
                                 WeightVariant variant) {
  require_same_shape(J1, J2, "dynamic_weight_step");
  if (gamma.size() != J1.agents()) {
    throw InvalidInput("dynamic_weight_step: weights must match the agent count");
  }
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw InvalidInput("dynamic_weight_step: eta must be non-negative and finite");
  }
  const std::size_t n = gamma.size();
  std::vector<double> direction(n);
  if (variant == WeightVariant::kMatrix) {
    const std::vector<double> combined = J2.combine(gamma.values());
    for (std::size_t i = 0; i < n; ++i) direction[i] = kernels::dot(J1.column(i), combined);
  } else {
    for (std::size_t i = 0; i < n; ++i) direction[i] = kernels::dot(J1.column(i), J2.column(i));
  }

  bool uniform_shift = true;
  for (std::size_t i = 1; i < n; ++i) uniform_shift = uniform_shift && direction[i] == direction[0];
  if (eta == 0.0 || uniform_shift) return gamma;

  std::vector<double> moved(n);
  for (std::size_t i = 0; i < n; ++i) moved[i] = gamma[i] - eta * direction[i];
  return project_to_simplex(moved);
}

JointModel model_step(const JointModel& model, const GradientMatrix& J3,
                      const WeightVector& gamma_next, double beta) {
  if (J3.dim() != model.dim()) {
    throw InvalidInput("model_step: gradient dimension does not match the model");
  }
  if (gamma_next.size() != J3.agents()) {
    throw InvalidInput("model_step: weights must match the agent count");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw InvalidInput("model_step: beta must be non-negative and finite");
  }
  JointModel next = model;
  if (beta == 0.0) return next;
  const std::vector<double> direction = J3.combine(gamma_next.values());
  kernels::scale_sub(beta, direction, next.parameters());
  return next;
}

JointModel initial_model(const StochasticTask& task, std::uint64_t seed) {
  KeyedRng rng(seed, StreamTag::kInit, {});
  std::normal_distribution<double> normal(0.0, task.init_scale());
  std::vector<double> params(task.dim());
  for (double& p : params) p = normal(rng);
  return JointModel(std::move(params), task.layout());
}

GradientMatrix sample_gradients(const StochasticTask& task, std::span<const double> omega,
                                std::uint64_t seed, std::uint64_t iteration,
                                SampleSlot slot) {
  GradientMatrix J(task.dim(), task.agents());
  for (std::size_t i = 0; i < task.agents(); ++i) {
    const std::vector<double> g = task.sample_gradient(i, omega, seed, iteration, slot);
    if (g.size() != task.dim()) {
      throw InvalidInput("task returned a gradient of the wrong dimension");
    }
    std::copy(g.begin(), g.end(), J.column(i).begin());
  }
  return J;
}

namespace {

RunResult run_loop(const StochasticTask& task, const RunOptions& options,
                   const std::optional<WeightVector>& frozen) {
  const std::size_t n = task.agents();
  if (n == 0) throw ConfigError("task has no agents");
  if (options.iterations == 0) throw ConfigError("iteration count must be at least 1");
  if (options.g_error_stride == 0) throw ConfigError("g_error_stride must be at least 1");
  options.schedule.validate();

  JointModel model = options.initial_model ? *options.initial_model
                                           : initial_model(task, options.seed);
  if (model.dim() != task.dim()) {
    throw InvalidInput("initial model dimension does not match the task");
  }
  WeightVector gamma = frozen                 ? *frozen
                       : options.initial_gamma ? *options.initial_gamma
                                               : WeightVector::uniform(n);
  if (gamma.size() != n) throw InvalidInput("initial weights must match the agent count");

  const std::size_t T = options.iterations;
  RunResult result;
  result.log.reserve(T + 1);
  if (options.keep_trajectory) result.trajectory.reserve(T + 1);

  std::optional<WeightVector> warm;
  double g_error = std::numeric_limits<double>::quiet_NaN();
  double c_sum = 0.0;

  for (std::size_t t = 0; t < T; ++t) {
    const FullBatch batch = task.full_batch(model.parameters());
    MinNormResult star = min_norm_weights(batch.gradients, warm);
    warm = star.weights;

    MetricRecord rec;
    rec.t = t;
    rec.gamma = gamma.vector();
    rec.losses = batch.losses;
    rec.c_error = conflict_error(batch.gradients, gamma, star.weights);
    c_sum += rec.c_error;
    rec.c_error_time_avg = c_sum / static_cast<double>(t + 1);
    if (task.has_population() && (t % options.g_error_stride == 0 || t + 1 == T)) {
      g_error = generalization_error(batch.gradients,
                                     task.population_gradients(model.parameters()), gamma);
    }
    rec.g_error = g_error;
    rec.pareto_gap = star.value;
    result.log.push_back(std::move(rec));
    if (options.keep_trajectory) {
      result.trajectory.push_back({t, gamma, model, options.seed, options.variant});
    }

    if (!frozen) {
      const GradientMatrix J1 =
          sample_gradients(task, model.parameters(), options.seed, t, SampleSlot::kFirst);
      const GradientMatrix J2 =
          sample_gradients(task, model.parameters(), options.seed, t, SampleSlot::kSecond);
      gamma = dynamic_weight_step(gamma, J1, J2, options.schedule.eta(t), options.variant);
    }
    const GradientMatrix J3 =
        sample_gradients(task, model.parameters(), options.seed, t, SampleSlot::kThird);
    model = model_step(model, J3, gamma, options.schedule.beta(t));
    task.confine(model.parameters());
    if (options.on_iteration) options.on_iteration(t);
  }
  result.final_state = {T, gamma, model, options.seed, options.variant};
  if (options.keep_trajectory) result.trajectory.push_back(result.final_state);
  return result;
}

}  // namespace

RunResult run_conflict_resolving(const StochasticTask& task, const RunOptions& options) {
  return run_loop(task, options, std::nullopt);
}

RunResult run_static_baseline(const StochasticTask& task, const WeightVector& gamma_fixed,
                              const RunOptions& options) {
  if (gamma_fixed.size() != task.agents()) {
    throw InvalidInput("static weights must match the agent count");
  }
  return run_loop(task, options, gamma_fixed);
}

void write_trajectory_jsonl(std::ostream& os, const std::vector<MetricRecord>& log) {
  for (const auto& r : log) {
    nlohmann::ordered_json j;
    j["t"] = r.t;
    j["gamma"] = r.gamma;
    j["losses"] = r.losses;
    j["c_error"] = r.c_error;
    j["g_error"] = r.g_error;
    j["pareto_gap"] = r.pareto_gap;
    os << j.dump() << '\n';
  }
}

GradientMatrix StochasticTask::population_gradients(std::span<const double>) const {
  throw ConfigError("task has no population model");
}

}  // namespace agentcoord
