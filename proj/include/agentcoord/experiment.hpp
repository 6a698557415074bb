#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentcoord/bounds.hpp"
#include "agentcoord/controller.hpp"
#include "agentcoord/quadratic_task.hpp"
#include "agentcoord/traces.hpp"

namespace agentcoord {

/// One (eta, beta, T) point of the bound sweep, constant step sizes.
struct SweepSpec {
  double eta = 0.0;
  double beta = 0.0;
  std::size_t T = 0;
};

struct VerifySettings {
  std::vector<SweepSpec> sweep{{0.05, 0.01, 500},  {0.05, 0.003, 2000}, {0.05, 0.001, 5000},
                               {0.2, 0.01, 500},   {0.2, 0.003, 2000},  {0.2, 0.001, 5000},
                               {0.5, 0.01, 500},   {0.5, 0.003, 2000},  {0.5, 0.001, 5000}};
  std::size_t sweep_seeds = 3;
  std::vector<std::size_t> rate_T{256, 1024, 4096, 16384};
  std::size_t rate_seeds = 10;
  std::vector<std::size_t> scaling_D{100, 1000, 10000};
  std::size_t scaling_T = 2000;
  std::size_t scaling_seeds = 5;
};

struct ExperimentConfig {
  TraceConfig trace;
  std::size_t window = 8;
  double train_fraction = 0.8;
  std::uint64_t split_seed = 11;
  std::vector<AgentCard> cards;  // defaults to the three scenario cards
  IntentTable intents;
  SeparationTable separation;
  TaskKind task = TaskKind::kCrossLayerSim;
  WeightVariant variant = WeightVariant::kMatrix;
  ScheduleKind schedule = ScheduleKind::kTheory;
  double eta0 = 1.0;
  double beta0 = 5.0;
  std::size_t T = 2000;
  std::vector<std::uint64_t> seeds{1};
  std::size_t g_error_stride = 100;
  AgentTeam::Options team{8, 4, 100000, 64, 0.01};
  double quadratic_noise = 0.5;
  std::size_t quadratic_samples = 1000;
  std::vector<double> level_rates_mbps{1.0, 2.5, 4.0, 5.0, 8.0};
  VerifySettings verify;
  std::filesystem::path output_dir;

  /// Throws ConfigError on an empty seed list, T = 0, or inconsistent parts.
  void validate() const;
  StepSchedule step_schedule() const;
  TaskConfig task_config() const;
};

/// Command-line overrides; each replaces the matching config field.
struct Overrides {
  std::optional<std::uint64_t> seed;  // replaces the first configured seed
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::string> variant;
  std::optional<std::size_t> T;
  std::optional<double> eta0;
  std::optional<double> beta0;
};

/// Environment variable naming the output root used when neither the flag
/// nor the config sets one.
inline constexpr const char* kOutputRootEnv = "AGENTCOORD_OUT";

ExperimentConfig default_experiment_config();
/// Strict parse: unknown keys anywhere throw ConfigError. Relative file
/// references resolve against `base_dir`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const std::filesystem::path& base_dir = {});
/// Throws ConfigError naming the file (and the parser's line/column on
/// malformed JSON).
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);
void apply_overrides(ExperimentConfig& cfg, const Overrides& o);
/// Flag, then config, then the environment variable, then "runs".
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg);

/// Agent records for every configured card, fed from the generated traces:
/// application cards sense requests, physical cards the band rates and
/// network cards the bandwidth. Record keys are 1 + card position.
std::vector<AgentRecord> build_agent_records(const ExperimentConfig& cfg);

/// Task built for one seed: the agents' predictor team or a quadratic
/// stand-in. `records` must outlive the returned team.
std::unique_ptr<StochasticTask> make_task(const ExperimentConfig& cfg,
                                          const std::vector<AgentRecord>& records,
                                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Dynamic-versus-static comparison

struct MethodSeries {
  std::vector<double> c_error;           // mean over seeds, per iteration
  std::vector<double> c_error_time_avg;  // mean over seeds, per iteration
  std::vector<double> g_error;           // mean over seeds, per iteration (held between strides)
  std::vector<double> final_time_avg;    // one per seed
  double mean_final_time_avg = 0.0;
};

struct CompareReport {
  TaskKind task = TaskKind::kQuadraticOracle;
  std::size_t T = 0;
  std::vector<std::uint64_t> seeds;
  MethodSeries dynamic;
  MethodSeries fixed;  // static equal weights
  /// dynamic / static mean final time-averaged E_C; 1 when the static run
  /// shows no conflict at all.
  double ratio = 1.0;
  bool conflict_free = false;
};

/// Runs dynamic and static weighting for every configured seed. `sink`
/// receives each run ("dynamic-seed<N>" / "static-seed<N>") as it finishes.
CompareReport compare_weighting(
    const ExperimentConfig& cfg,
    const std::function<void(const std::string&, const RunResult&)>& sink = {});
nlohmann::ordered_json to_json(const CompareReport& r);

// ---------------------------------------------------------------------------
// Bound verification

struct SweepResult {
  SweepSpec spec;
  double measured = 0.0;  // time-averaged E_C, mean over seeds
  double bound = 0.0;
  bool holds = false;
};

struct BoundReport {
  LipschitzConstants constants;
  std::size_t samples_per_agent = 0;
  std::vector<SweepResult> sweep;
  std::vector<std::size_t> rate_T;
  std::vector<double> rate_c_error;  // mean time-averaged E_C per horizon
  double rate_slope = 0.0;
  std::vector<ScalingPoint> scaling;
  ScalingFit scaling_fit;
  bool bounds_hold = true;
};

/// Requires the quadratic-oracle task (computable constants); throws
/// ConfigError otherwise.
BoundReport verify_bounds(const ExperimentConfig& cfg);
nlohmann::ordered_json to_json(const BoundReport& r);

}  // namespace agentcoord
