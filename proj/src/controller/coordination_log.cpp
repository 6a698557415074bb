#include <ostream>

#include "agentcoord/controller.hpp"

namespace agentcoord {

void write_metrics_jsonl(std::ostream& os, const std::string& run_id,
                         const std::vector<MetricRecord>& metrics) {
  for (const auto& r : metrics) {
    nlohmann::ordered_json j;
    j["run_id"] = run_id;
    j["t"] = r.t;
    j["gamma"] = r.gamma;
    j["losses"] = r.losses;
    j["c_error"] = r.c_error;
    j["c_error_time_avg"] = r.c_error_time_avg;
    j["g_error"] = r.g_error;  // NaN (no population model) serializes as null
    j["pareto_gap"] = r.pareto_gap;
    os << j.dump() << '\n';
  }
}

nlohmann::ordered_json summary_json(const CoordinationLog& log) {
  nlohmann::ordered_json j;
  j["goal"] = {{"id", log.goal.goal_id},
               {"description", log.goal.description},
               {"matched_prompt", log.goal.matched_prompt},
               {"task_index", log.goal.task_index}};
  auto subtasks = nlohmann::ordered_json::array();
  for (const auto& s : log.subtasks) {
    subtasks.push_back({{"id", s.id},
                        {"goal", s.goal_id},
                        {"layer", to_string(s.layer)},
                        {"requirement", s.requirement},
                        {"skills", s.skills}});
  }
  j["subtasks"] = subtasks;
  auto assignment = nlohmann::ordered_json::array();
  for (const auto& e : log.assignment.entries) {
    assignment.push_back({{"subtask", e.subtask_id},
                          {"agent", e.agent_id},
                          {"registration_index", e.agent_index},
                          {"candidates", e.candidates},
                          {"rule", e.rule}});
  }
  j["assignment"] = assignment;
  auto reports = nlohmann::ordered_json::array();
  for (const auto& r : log.reports) {
    reports.push_back({{"subtask", r.subtask_id},
                       {"agent", r.agent_id},
                       {"status", to_string(r.status)},
                       {"action", {{"name", r.action.name}, {"label", r.action.label},
                                   {"value", r.action.value}}},
                       {"predictions", r.predictions},
                       {"local_loss", r.local_loss},
                       {"sensed", r.sensed_summary}});
  }
  j["reports"] = reports;
  if (log.verdict) {
    j["verdict"] = {{"fulfilled", log.verdict->fulfilled},
                    {"failed_subtasks", log.verdict->failed_subtasks}};
  } else {
    j["verdict"] = nullptr;
  }
  j["iterations"] = log.metrics.size();
  if (!log.metrics.empty()) {
    const auto& last = log.metrics.back();
    j["final"] = {{"gamma", last.gamma},
                  {"c_error", last.c_error},
                  {"c_error_time_avg", last.c_error_time_avg},
                  {"g_error", last.g_error},
                  {"pareto_gap", last.pareto_gap}};
  }
  j["queued_goals"] = log.queued_during_run;
  j["dropped_goals"] = log.dropped_goals;
  j["config"] = log.config_snapshot;
  j["seed"] = log.seed;
  return j;
}

}  // namespace agentcoord
