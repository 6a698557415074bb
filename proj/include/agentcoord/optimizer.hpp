#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "agentcoord/gradient_matrix.hpp"
#include "agentcoord/simplex.hpp"
#include "agentcoord/task.hpp"

namespace agentcoord {

enum class WeightVariant {
  kMatrix,           // gamma <- P(gamma - eta * J1^T J2 gamma)
  kLiteralDiagonal,  // gamma_i <- P(gamma_i - eta * <g1_i, g2_i>)
};

std::string to_string(WeightVariant v);
/// Accepts "matrix" and "literal-diagonal". Throws ConfigError otherwise.
WeightVariant parse_variant(const std::string& s);

enum class ScheduleKind { kConstant, kTheory };

/// Step sizes for the weight (eta) and model (beta) updates. The theory kind
/// scales both with the horizon: eta = eta0 T^-1/4, beta = beta0 T^-3/4.
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::kTheory;
  double eta0 = 0.5;
  double beta0 = 0.1;
  std::size_t horizon = 1;

  static StepSchedule constant(double eta, double beta);
  static StepSchedule theory(std::size_t horizon, double eta0 = 0.5, double beta0 = 0.1);

  /// Throws InvalidInput on non-positive constants or a zero horizon.
  void validate() const;
  double eta(std::size_t t) const;
  double beta(std::size_t t) const;
};

std::string to_string(ScheduleKind k);
ScheduleKind parse_schedule_kind(const std::string& s);

struct OptimizerState {
  std::size_t t = 0;
  WeightVector gamma = WeightVector::uniform(1);
  JointModel model;
  std::uint64_t seed = 0;
  WeightVariant variant = WeightVariant::kMatrix;
};

/// Metrics at iterate t, taken before the update that produces t + 1.
struct MetricRecord {
  std::size_t t = 0;
  std::vector<double> gamma;
  std::vector<double> losses;
  double c_error = 0.0;
  double c_error_time_avg = 0.0;  // mean of c_error over records 0..t
  double g_error = 0.0;           // NaN when the task has no population model
  double pareto_gap = 0.0;
};

struct RunOptions {
  StepSchedule schedule;
  std::size_t iterations = 1;
  std::uint64_t seed = 0;
  WeightVariant variant = WeightVariant::kMatrix;
  /// Population gradients are re-evaluated every `g_error_stride` iterations
  /// (and at the last one); records in between repeat the latest value.
  std::size_t g_error_stride = 1;
  bool keep_trajectory = true;
  std::optional<WeightVector> initial_gamma;
  std::optional<JointModel> initial_model;
  /// Called on the coordinating thread after each completed iteration.
  std::function<void(std::size_t)> on_iteration;
};

struct RunResult {
  std::vector<OptimizerState> trajectory;  // states 0..T when kept
  std::vector<MetricRecord> log;           // records 0..T-1, one per iteration
  OptimizerState final_state;              // state T

  /// Time-averaged conflicting error over records 0..t (default: all).
  double time_averaged_c_error(std::optional<std::size_t> t = std::nullopt) const;
};

/// gamma_{t+1} from two independent gradient samples at the same iterate.
/// If the update direction has equal coordinates the weights are returned
/// unchanged (the projection would map them back to gamma anyway).
WeightVector dynamic_weight_step(const WeightVector& gamma, const GradientMatrix& J1,
                                 const GradientMatrix& J2, double eta,
                                 WeightVariant variant);

/// Omega - beta * J3 gamma_next. Layout is preserved.
JointModel model_step(const JointModel& model, const GradientMatrix& J3,
                      const WeightVector& gamma_next, double beta);

/// Seeded Gaussian initialization (standard deviation task.init_scale()) over
/// the task layout.
JointModel initial_model(const StochasticTask& task, std::uint64_t seed);

GradientMatrix sample_gradients(const StochasticTask& task, std::span<const double> omega,
                                std::uint64_t seed, std::uint64_t iteration,
                                SampleSlot slot);

/// Dynamic-weighting conflict-resolving run.
RunResult run_conflict_resolving(const StochasticTask& task, const RunOptions& options);

/// Same loop with the weights frozen at `gamma_fixed`.
RunResult run_static_baseline(const StochasticTask& task, const WeightVector& gamma_fixed,
                              const RunOptions& options);

/// One JSON object per line: {t, gamma, losses, c_error, g_error, pareto_gap}.
void write_trajectory_jsonl(std::ostream& os, const std::vector<MetricRecord>& log);

}  // namespace agentcoord
