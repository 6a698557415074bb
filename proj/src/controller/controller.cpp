#include "agentcoord/controller.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "agentcoord/error.hpp"
#include "agentcoord/quadratic_task.hpp"

namespace agentcoord {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

std::vector<std::string> string_list(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& x : j) {
    if (!x.is_string()) throw ConfigError(where + ": expected an array of strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

std::string required_string(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ConfigError(where + ": missing string field '" + key + "'");
  }
  return j.at(key).get<std::string>();
}

}  // namespace

std::optional<SemanticGoal> detect_goal(const std::string& utterance, const IntentTable& table) {
  const std::string text = lower(utterance);
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const auto& e = table.entries[i];
    for (const auto& prompt : e.prompts) {
      if (prompt.empty()) continue;
      if (text.find(lower(prompt)) != std::string::npos) {
        return SemanticGoal{e.goal_id, e.description, prompt, i};
      }
    }
  }
  return std::nullopt;
}

void SeparationTable::validate() const {
  for (const auto& [goal, entries] : goals) {
    if (entries.empty()) throw ConfigError("separation entry for '" + goal + "' lists no layer");
    std::set<Layer> seen;
    for (const auto& e : entries) {
      if (!seen.insert(e.layer).second) {
        throw ConfigError("separation entry for '" + goal + "' lists the " + to_string(e.layer) +
                          " layer twice");
      }
    }
  }
}

std::vector<Subtask> separate_task(const SemanticGoal& goal, const SeparationTable& table) {
  const auto it = table.goals.find(goal.goal_id);
  if (it == table.goals.end()) {
    throw ConfigError("goal '" + goal.goal_id + "' has no separation entry");
  }
  std::vector<Subtask> out;
  for (const auto& e : it->second) {
    out.push_back(Subtask{goal.goal_id + "/" + to_string(e.layer), goal.goal_id, e.layer,
                          e.requirement, e.skills});
  }
  return out;
}

IntentTable default_intent_table() {
  return IntentTable{{
      {"IncreaseResolution",
       "raise the delivered video quality as far as the radio and network allow",
       {"increase video resolution", "make video clearer"}},
      {"ReduceLatency", "keep end-to-end delay low by tracking available bandwidth",
       {"reduce latency", "video is lagging"}},
  }};
}

SeparationTable default_separation_table(const std::vector<std::string>& levels,
                                         const std::vector<std::string>& bands) {
  SeparationTable t;
  t.goals["IncreaseResolution"] = {
      {Layer::kApplication, "resolution adaptation over {" + join(levels, ", ") + "}",
       {"resolution-adaptation"}},
      {Layer::kPhysical, "multi-band rate sensing over {" + join(bands, ", ") + "}",
       {"multi-band-sensing"}},
      {Layer::kNetwork, "end-to-end bandwidth tracking", {"bandwidth-tracking"}},
  };
  t.goals["ReduceLatency"] = {
      {Layer::kNetwork, "end-to-end bandwidth tracking", {"bandwidth-tracking"}},
  };
  return t;
}

IntentTable intent_table_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("intents: expected a non-empty array");
  IntentTable t;
  for (const auto& e : j) {
    if (!e.is_object()) throw ConfigError("intents: expected objects");
    require_known_fields(e, {"goal", "description", "prompts"}, "intents[]");
    IntentEntry entry;
    entry.goal_id = required_string(e, "goal", "intents[]");
    entry.description = e.value("description", std::string{});
    if (!e.contains("prompts")) throw ConfigError("intents[]: missing field 'prompts'");
    entry.prompts = string_list(e.at("prompts"), "intents[" + entry.goal_id + "].prompts");
    t.entries.push_back(std::move(entry));
  }
  return t;
}

SeparationTable separation_table_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("separation: expected an object keyed by goal id");
  SeparationTable t;
  for (const auto& [goal, entries] : j.items()) {
    const std::string where = "separation." + goal;
    if (!entries.is_array()) throw ConfigError(where + ": expected an array");
    auto& out = t.goals[goal];
    for (const auto& e : entries) {
      if (!e.is_object()) throw ConfigError(where + ": expected objects");
      require_known_fields(e, {"layer", "requirement", "skills"}, where);
      SeparationEntry entry;
      entry.layer = parse_layer(required_string(e, "layer", where));
      entry.requirement = required_string(e, "requirement", where);
      if (e.contains("skills")) entry.skills = string_list(e.at("skills"), where + ".skills");
      out.push_back(std::move(entry));
    }
  }
  t.validate();
  return t;
}

nlohmann::ordered_json to_json(const IntentTable& t) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& e : t.entries) {
    out.push_back({{"goal", e.goal_id}, {"description", e.description}, {"prompts", e.prompts}});
  }
  return out;
}

nlohmann::ordered_json to_json(const SeparationTable& t) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [goal, entries] : t.goals) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
      arr.push_back(
          {{"layer", to_string(e.layer)}, {"requirement", e.requirement}, {"skills", e.skills}});
    }
    out[goal] = arr;
  }
  return out;
}

const SelectionEntry* Assignment::find(const std::string& subtask_id) const {
  for (const auto& e : entries) {
    if (e.subtask_id == subtask_id) return &e;
  }
  return nullptr;
}

Assignment select_agents(const std::vector<Subtask>& subtasks, const AgentRegistry& registry) {
  Assignment out;
  std::set<std::size_t> busy;  // one subtask per agent within a task
  for (const auto& st : subtasks) {
    SelectionEntry entry;
    entry.subtask_id = st.id;
    std::optional<std::size_t> chosen;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < registry.size(); ++i) {
      const AgentCard& card = registry.card(i);
      if (card.layer != st.layer) continue;
      const bool has_skills = std::all_of(st.skills.begin(), st.skills.end(), [&](const auto& s) {
        return std::find(card.skills.begin(), card.skills.end(), s) != card.skills.end();
      });
      if (!has_skills) continue;
      entry.candidates.push_back(card.id);
      if (busy.count(i)) {
        ++skipped;
      } else if (!chosen) {
        chosen = i;
      }
    }
    if (!chosen) throw UnsatisfiableSubtask(st.id);
    busy.insert(*chosen);
    entry.agent_index = *chosen;
    entry.agent_id = registry.card(*chosen).id;
    entry.rule = entry.candidates.size() == 1 ? "unique candidate"
                                              : "lowest registration index among " +
                                                    std::to_string(entry.candidates.size());
    if (skipped > 0) entry.rule += ", skipping " + std::to_string(skipped) + " already assigned";
    out.entries.push_back(std::move(entry));
  }
  return out;
}

Verdict evaluate_goal(const std::vector<Subtask>& subtasks,
                      const std::vector<SubtaskReport>& reports) {
  Verdict v;
  for (const auto& st : subtasks) {
    const auto it = std::find_if(reports.begin(), reports.end(),
                                 [&](const SubtaskReport& r) { return r.subtask_id == st.id; });
    if (it == reports.end()) {
      throw IncompleteEvaluation("no report for subtask '" + st.id + "'");
    }
    if (it->status != SubtaskStatus::kCompleted) v.failed_subtasks.push_back(st.id);
  }
  v.fulfilled = v.failed_subtasks.empty();
  return v;
}

std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::kCrossLayerSim: return "crosslayer-sim";
    case TaskKind::kQuadraticOracle: return "quadratic-oracle";
    case TaskKind::kIdenticalQuadratic: return "identical-quadratic";
  }
  return "?";
}

TaskKind parse_task_kind(const std::string& s) {
  if (s == "crosslayer-sim") return TaskKind::kCrossLayerSim;
  if (s == "quadratic-oracle") return TaskKind::kQuadraticOracle;
  if (s == "identical-quadratic") return TaskKind::kIdenticalQuadratic;
  throw ConfigError("unknown task '" + s +
                    "' (expected crosslayer-sim, quadratic-oracle or identical-quadratic)");
}

bool GoalQueue::push(SemanticGoal goal) {
  std::lock_guard lock(mu_);
  if (items_.size() >= capacity_) {
    ++drops_;
    return false;
  }
  items_.push_back(std::move(goal));
  return true;
}

std::optional<SemanticGoal> GoalQueue::pop() {
  std::lock_guard lock(mu_);
  if (items_.empty()) return std::nullopt;
  SemanticGoal g = std::move(items_.front());
  items_.pop_front();
  return g;
}

std::size_t GoalQueue::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

std::size_t GoalQueue::drops() const {
  std::lock_guard lock(mu_);
  return drops_;
}

namespace {

nlohmann::ordered_json task_config_json(const TaskConfig& c) {
  nlohmann::ordered_json j;
  j["task"] = to_string(c.kind);
  j["variant"] = to_string(c.variant);
  j["weighting"] = c.dynamic ? "dynamic" : "static";
  j["schedule"] = {{"kind", to_string(c.schedule.kind)},
                   {"eta0", c.schedule.eta0},
                   {"beta0", c.schedule.beta0},
                   {"horizon", c.schedule.horizon}};
  j["iterations"] = c.iterations;
  j["g_error_stride"] = c.g_error_stride;
  j["team"] = {{"window", c.team.window},
               {"features", c.team.features},
               {"population_samples", c.team.population_samples}};
  if (c.kind != TaskKind::kCrossLayerSim) {
    j["quadratic"] = {{"noise", c.quadratic_noise}, {"samples", c.quadratic_samples}};
  }
  j["level_rates_mbps"] = c.level_rates_mbps;
  return j;
}

}  // namespace

CoordinationLog coordinate(const SemanticGoal& goal, const std::vector<Subtask>& subtasks,
                           const Assignment& assignment,
                           const std::vector<const AgentRecord*>& records,
                           const TaskConfig& config, std::uint64_t seed,
                           const std::function<void(std::size_t)>& on_iteration) {
  if (assignment.entries.size() != subtasks.size() || records.size() != subtasks.size()) {
    throw ConfigError("coordination needs one assigned agent record per subtask");
  }
  for (std::size_t i = 0; i < subtasks.size(); ++i) {
    if (assignment.entries[i].subtask_id != subtasks[i].id ||
        records[i] == nullptr || records[i]->card().id != assignment.entries[i].agent_id) {
      throw ConfigError("assignment does not line up with subtasks and agent records");
    }
    if (records[i]->card().layer != subtasks[i].layer) {
      throw AssignmentError("agent '" + records[i]->card().id + "' cannot serve subtask '" +
                            subtasks[i].id + "'");
    }
  }

  CoordinationLog log;
  log.goal = goal;
  log.subtasks = subtasks;
  log.assignment = assignment;
  log.config_snapshot = task_config_json(config);
  log.seed = seed;

  // The agents' predictor team is always built: it defines the model every
  // agent executes with, even when a stand-in objective drives the optimizer.
  const AgentTeam team(records, config.team);

  RunOptions opts;
  opts.schedule = config.schedule;
  opts.iterations = config.iterations;
  opts.seed = seed;
  opts.variant = config.variant;
  opts.g_error_stride = config.g_error_stride;
  opts.keep_trajectory = false;
  opts.on_iteration = on_iteration;

  auto run = [&](const StochasticTask& task) {
    return config.dynamic ? run_conflict_resolving(task, opts)
                          : run_static_baseline(task, WeightVector::uniform(task.agents()), opts);
  };

  std::vector<double> params;
  switch (config.kind) {
    case TaskKind::kCrossLayerSim: {
      RunResult r = run(team);
      log.metrics = std::move(r.log);
      const auto p = r.final_state.model.parameters();
      params.assign(p.begin(), p.end());
      break;
    }
    case TaskKind::kQuadraticOracle:
    case TaskKind::kIdenticalQuadratic: {
      const QuadraticTask task =
          config.kind == TaskKind::kQuadraticOracle
              ? make_conflicting_quadratic_task(config.quadratic_noise, config.quadratic_samples,
                                                seed)
              : make_identical_quadratic_task(records.size(), config.quadratic_noise,
                                              config.quadratic_samples, seed);
      if (task.agents() != records.size()) {
        throw ConfigError("task '" + to_string(config.kind) + "' needs " +
                          std::to_string(task.agents()) + " agents, assignment has " +
                          std::to_string(records.size()));
      }
      log.metrics = run(task).log;
      // The stand-in objective does not train the predictors; agents act on
      // the seeded initial model.
      const JointModel m = initial_model(team, seed);
      params.assign(m.parameters().begin(), m.parameters().end());
      break;
    }
  }

  // Physical and network agents act first; their estimates bound the rate
  // the application agent may request.
  std::vector<std::optional<SubtaskReport>> reports(subtasks.size());
  auto execute = [&](std::size_t i, const SubtaskContext& ctx) {
    try {
      reports[i] = execute_subtask(*records[i], subtasks[i], team.shape(), params, i, ctx);
    } catch (const ConfigError&) {
      throw;
    } catch (const AssignmentError&) {
      throw;
    } catch (const std::exception& e) {
      SubtaskReport failed;
      failed.agent_id = records[i]->card().id;
      failed.subtask_id = subtasks[i].id;
      failed.sensed_summary = std::string("execution failed: ") + e.what();
      failed.status = SubtaskStatus::kFailed;
      reports[i] = std::move(failed);
    }
  };
  SubtaskContext base;
  base.level_rates_mbps = config.level_rates_mbps;
  std::optional<double> available;
  for (std::size_t i = 0; i < subtasks.size(); ++i) {
    if (subtasks[i].layer == Layer::kApplication) continue;
    execute(i, base);
    const SubtaskReport& r = *reports[i];
    if (r.status == SubtaskStatus::kCompleted) {
      available = available ? std::min(*available, r.action.value) : r.action.value;
    }
  }
  SubtaskContext app = base;
  app.available_rate_mbps = available;
  for (std::size_t i = 0; i < subtasks.size(); ++i) {
    if (subtasks[i].layer == Layer::kApplication) execute(i, app);
  }
  for (auto& r : reports) log.reports.push_back(std::move(*r));
  log.verdict = evaluate_goal(subtasks, log.reports);
  return log;
}

AgentController::AgentController(IntentTable intents, SeparationTable separation,
                                 std::size_t queue_capacity)
    : intents_(std::move(intents)), separation_(std::move(separation)), queue_(queue_capacity) {
  if (intents_.entries.empty()) throw ConfigError("intent table is empty");
  separation_.validate();
}

std::size_t AgentController::add_agent(AgentRecord record) {
  std::lock_guard lock(mu_);
  if (busy_) throw ConfigError("agents cannot be registered while a task is running");
  const std::size_t index = registry_.register_agent(record.card());
  records_.push_back(std::move(record));
  return index;
}

std::optional<SemanticGoal> AgentController::submit(const std::string& utterance) {
  auto goal = detect_goal(utterance, intents_);
  if (!goal) return std::nullopt;
  std::lock_guard lock(mu_);
  if (!queue_.push(*goal)) {
    if (busy_) ++dropped_while_busy_;
    throw QueueOverflow("goal queue is full; dropped '" + goal->goal_id + "'");
  }
  if (busy_) queued_while_busy_.push_back(goal->goal_id);
  return goal;
}

std::optional<CoordinationLog> AgentController::run_next(
    const TaskConfig& config, std::uint64_t seed,
    const std::function<void(std::size_t)>& on_iteration) {
  auto goal = queue_.pop();
  if (!goal) return std::nullopt;
  return run_goal(*goal, config, seed, on_iteration);
}

CoordinationLog AgentController::run_goal(const SemanticGoal& goal, const TaskConfig& config,
                                          std::uint64_t seed,
                                          const std::function<void(std::size_t)>& on_iteration) {
  {
    std::lock_guard lock(mu_);
    if (busy_) throw ConfigError("a task is already running");
    busy_ = true;
    queued_while_busy_.clear();
    dropped_while_busy_ = 0;
  }
  struct Release {
    AgentController* self;
    ~Release() {
      std::lock_guard lock(self->mu_);
      self->busy_ = false;
    }
  } release{this};

  const auto subtasks = separate_task(goal, separation_);
  const auto assignment = select_agents(subtasks, registry_);
  std::vector<const AgentRecord*> members;
  for (const auto& e : assignment.entries) members.push_back(&records_.at(e.agent_index));
  CoordinationLog log = coordinate(goal, subtasks, assignment, members, config, seed, on_iteration);

  std::lock_guard lock(mu_);
  log.queued_during_run = queued_while_busy_;
  log.dropped_goals = dropped_while_busy_;
  return log;
}

}  // namespace agentcoord
