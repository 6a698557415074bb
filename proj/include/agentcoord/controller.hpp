#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentcoord/agents.hpp"
#include "agentcoord/optimizer.hpp"

namespace agentcoord {

// ---------------------------------------------------------------------------
// Goal detection

struct IntentEntry {
  std::string goal_id;
  std::string description;
  std::vector<std::string> prompts;
};

/// Ordered: the first entry with a matching prompt wins.
struct IntentTable {
  std::vector<IntentEntry> entries;
};

struct SemanticGoal {
  std::string goal_id;
  std::string description;
  std::string matched_prompt;
  std::size_t task_index = 0;  // position of the goal in the intent table

  friend bool operator==(const SemanticGoal&, const SemanticGoal&) = default;
};

/// Case-insensitive substring match of every prompt against `utterance`, in
/// table order. No match is a value (nullopt), never an error.
std::optional<SemanticGoal> detect_goal(const std::string& utterance, const IntentTable& table);

// ---------------------------------------------------------------------------
// Task separation

struct SeparationEntry {
  Layer layer = Layer::kApplication;
  std::string requirement;
  std::vector<std::string> skills;
};

struct SeparationTable {
  std::map<std::string, std::vector<SeparationEntry>> goals;

  /// Throws ConfigError if any goal lists a layer twice or no layer at all.
  void validate() const;
};

/// One subtask per separation entry of the goal, with ids "<goal>/<layer>".
/// Throws ConfigError for a goal missing from the table.
std::vector<Subtask> separate_task(const SemanticGoal& goal, const SeparationTable& table);

IntentTable default_intent_table();
SeparationTable default_separation_table(const std::vector<std::string>& levels,
                                         const std::vector<std::string>& bands);

IntentTable intent_table_from_json(const nlohmann::json& j);
SeparationTable separation_table_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const IntentTable& t);
nlohmann::ordered_json to_json(const SeparationTable& t);

// ---------------------------------------------------------------------------
// Agent selection

struct SelectionEntry {
  std::string subtask_id;
  std::string agent_id;
  std::size_t agent_index = 0;
  std::vector<std::string> candidates;  // matching cards in registration order
  std::string rule;                     // how the choice among candidates was made
};

struct Assignment {
  std::vector<SelectionEntry> entries;  // in subtask order

  const SelectionEntry* find(const std::string& subtask_id) const;
};

/// Candidates share the subtask's layer and carry all its skills; the one
/// with the lowest registration index is chosen. An agent serves at most one
/// subtask per task. Throws UnsatisfiableSubtask naming the first subtask
/// left without a candidate.
Assignment select_agents(const std::vector<Subtask>& subtasks, const AgentRegistry& registry);

// ---------------------------------------------------------------------------
// Evaluation

struct Verdict {
  bool fulfilled = false;
  std::vector<std::string> failed_subtasks;
};

/// Fulfilled iff every subtask has a completed report. Throws
/// IncompleteEvaluation if a subtask has no report.
Verdict evaluate_goal(const std::vector<Subtask>& subtasks,
                      const std::vector<SubtaskReport>& reports);

// ---------------------------------------------------------------------------
// Coordination

enum class TaskKind {
  kCrossLayerSim,       // the agents' own predictors on their traces
  kQuadraticOracle,     // conflicting quadratic stand-in (3 agents)
  kIdenticalQuadratic,  // every agent minimizes the same quadratic
};

std::string to_string(TaskKind k);
TaskKind parse_task_kind(const std::string& s);

struct TaskConfig {
  TaskKind kind = TaskKind::kCrossLayerSim;
  StepSchedule schedule = StepSchedule::theory(2000);
  std::size_t iterations = 2000;
  WeightVariant variant = WeightVariant::kMatrix;
  bool dynamic = true;  // false: static equal weights
  std::size_t g_error_stride = 100;
  AgentTeam::Options team;
  double quadratic_noise = 0.5;
  std::size_t quadratic_samples = 1000;
  std::vector<double> level_rates_mbps{1.0, 2.5, 4.0, 5.0, 8.0};
};

struct CoordinationLog {
  SemanticGoal goal;
  std::vector<Subtask> subtasks;
  Assignment assignment;
  std::vector<MetricRecord> metrics;
  std::vector<SubtaskReport> reports;
  std::optional<Verdict> verdict;
  nlohmann::ordered_json config_snapshot;
  std::uint64_t seed = 0;
  std::vector<std::string> queued_during_run;  // goal ids, FIFO order
  std::size_t dropped_goals = 0;
};

/// Bounded FIFO of goals detected while a coordination is running.
class GoalQueue {
 public:
  explicit GoalQueue(std::size_t capacity = 16) : capacity_(capacity) {}
  /// Returns false (and counts a drop) when full.
  bool push(SemanticGoal goal);
  std::optional<SemanticGoal> pop();
  std::size_t size() const;
  std::size_t drops() const;

 private:
  mutable std::mutex mu_;
  std::deque<SemanticGoal> items_;
  std::size_t capacity_;
  std::size_t drops_ = 0;
};

/// Runs the conflict-resolving optimization over the assigned agents, then
/// has each agent execute its subtask with the trained model and evaluates
/// the goal. Physical and network subtasks run before application ones so
/// their estimates can be relayed as the available rate.
CoordinationLog coordinate(const SemanticGoal& goal, const std::vector<Subtask>& subtasks,
                           const Assignment& assignment,
                           const std::vector<const AgentRecord*>& records,
                           const TaskConfig& config, std::uint64_t seed,
                           const std::function<void(std::size_t)>& on_iteration = {});

/// The agent controller: registry, agent records, tables and the goal queue.
/// One coordination runs at a time and cannot be interrupted; goals submitted
/// meanwhile are queued.
class AgentController {
 public:
  AgentController(IntentTable intents, SeparationTable separation,
                  std::size_t queue_capacity = 16);

  /// Registers the card and keeps the record. Returns the registration index.
  std::size_t add_agent(AgentRecord record);
  const AgentRegistry& registry() const noexcept { return registry_; }
  const AgentRecord& record(std::size_t index) const { return records_.at(index); }

  /// Detects a goal and queues it. Returns the goal, or nullopt for no-goal.
  /// Throws QueueOverflow if the queue is full.
  std::optional<SemanticGoal> submit(const std::string& utterance);
  std::size_t pending() const { return queue_.size(); }

  /// Pops the oldest goal and runs it end to end. nullopt when idle.
  std::optional<CoordinationLog> run_next(const TaskConfig& config, std::uint64_t seed,
                                          const std::function<void(std::size_t)>& on_iteration = {});

  /// Full pipeline for a single goal: separate, select, coordinate.
  /// `on_iteration` runs after every optimizer iteration while the controller
  /// is busy; goals submitted from it are queued.
  CoordinationLog run_goal(const SemanticGoal& goal, const TaskConfig& config, std::uint64_t seed,
                           const std::function<void(std::size_t)>& on_iteration = {});

 private:
  IntentTable intents_;
  SeparationTable separation_;
  AgentRegistry registry_;
  std::vector<AgentRecord> records_;
  GoalQueue queue_;
  bool busy_ = false;
  std::vector<std::string> queued_while_busy_;
  std::size_t dropped_while_busy_ = 0;
  mutable std::mutex mu_;
};

// ---------------------------------------------------------------------------
// Serialization

/// Metric records as JSON lines with the run id attached.
void write_metrics_jsonl(std::ostream& os, const std::string& run_id,
                         const std::vector<MetricRecord>& metrics);
nlohmann::ordered_json summary_json(const CoordinationLog& log);

}  // namespace agentcoord
