#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "agentcoord/experiment.hpp"

namespace agentcoord::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNoGoal = 3,
  kUnsatisfiable = 4,
  kBoundViolation = 5,
  kUnfulfilled = 6,
};

/// Writes the CSV traces and manifest.json into <out>/traces.
int cmd_simulate_traces(const ExperimentConfig& cfg, std::ostream& out);
/// Goal detection through evaluation for one utterance; writes
/// <out>/scenario-seed<N>/{metrics.jsonl,summary.json}.
int cmd_scenario(const ExperimentConfig& cfg, const std::string& utterance, std::ostream& out);
/// Writes <out>/compare/{report.json,series.csv,tradeoff.csv} plus per-run metrics.
int cmd_compare(const ExperimentConfig& cfg, std::ostream& out);
/// Writes <out>/verify/report.json.
int cmd_verify_bounds(const ExperimentConfig& cfg, std::ostream& out);

/// Parses arguments, dispatches and maps failures to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace agentcoord::cli
