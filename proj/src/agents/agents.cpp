#include "agentcoord/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "agentcoord/error.hpp"
#include "agentcoord/rng.hpp"

namespace agentcoord {
namespace {

std::string fmt3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::size_t AgentRegistry::register_agent(AgentCard card) {
  card.validate();
  if (index_.count(card.id)) throw ConflictError("agent id '" + card.id + "' is already registered");
  const std::size_t idx = cards_.size();
  index_.emplace(card.id, idx);
  cards_.push_back(std::move(card));
  return idx;
}

std::optional<std::size_t> AgentRegistry::find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string to_string(SubtaskStatus s) {
  return s == SubtaskStatus::kCompleted ? "completed" : "failed";
}

AgentRecord::AgentRecord(AgentCard card, DatasetSplit dataset, std::vector<Trace> sensed,
                         std::uint64_t rng_key)
    : card_(std::move(card)),
      dataset_(std::move(dataset)),
      sensed_(std::move(sensed)),
      rng_key_(rng_key),
      reads_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  card_.validate();
  for (const auto& t : sensed_) cursor_ = std::max(cursor_, t.values.size());
}

const DatasetSplit& AgentRecord::dataset() const {
  reads_->fetch_add(1, std::memory_order_relaxed);
  return dataset_;
}

std::vector<double> sample_gradient(const AgentRecord& agent, const PredictorShape& shape,
                                    std::span<const double> params, std::size_t head,
                                    std::uint64_t seed, std::uint64_t iteration, SampleSlot slot,
                                    std::size_t batch) {
  const WindowSet& pool = agent.dataset().train;
  if (pool.empty()) throw ConfigError("agent '" + agent.card().id + "' has an empty training set");
  if (batch == 0) throw ConfigError("minibatch size must be positive");
  KeyedRng rng(seed, StreamTag::kSample,
               {agent.rng_key(), iteration, static_cast<std::uint64_t>(slot)});
  WindowSet picked;
  picked.window = pool.window;
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t k = rng.index(pool.size());
    picked.push_back(pool.row(k), pool.targets[k], pool.tags[k]);
  }
  return agent_loss_gradient(shape, params, head, picked, agent.card().loss);
}

SubtaskReport execute_subtask(const AgentRecord& agent, const Subtask& subtask,
                              const PredictorShape& shape, std::span<const double> params,
                              std::size_t head, const SubtaskContext& context) {
  const AgentCard& card = agent.card();
  if (subtask.layer != card.layer) {
    throw AssignmentError("subtask '" + subtask.id + "' is " + to_string(subtask.layer) +
                          "-layer but agent '" + card.id + "' serves the " +
                          to_string(card.layer) + " layer");
  }
  const auto& sensed = agent.sensed();
  if (sensed.empty()) throw ConfigError("agent '" + card.id + "' has no sensed trace");
  const auto& laws = agent.dataset().laws;
  if (laws.size() != sensed.size()) {
    throw ConfigError("agent '" + card.id + "': sensed signals do not match its dataset laws");
  }
  const std::size_t w = shape.window;
  const std::size_t cursor = agent.cursor();

  SubtaskReport report;
  report.agent_id = card.id;
  report.subtask_id = subtask.id;
  std::vector<double> window(w);
  double loss_sum = 0.0;
  for (std::size_t k = 0; k < sensed.size(); ++k) {
    const auto& values = sensed[k].values;
    if (values.empty() || cursor > values.size() || cursor < w + 1) {
      throw ConfigError("agent '" + card.id + "': sensed trace '" + sensed[k].signal +
                        "' is empty or shorter than one window");
    }
    const SignalLaw& law = laws[k];
    for (std::size_t i = 0; i < w; ++i) window[i] = law.normalize(values[cursor - w + i]);
    report.predictions.push_back(law.denormalize(predict(shape, params, head, window)));

    for (std::size_t i = 0; i < w; ++i) window[i] = law.normalize(values[cursor - 1 - w + i]);
    loss_sum += loss_and_gradient(card.loss, predict(shape, params, head, window),
                                  law.normalize(values[cursor - 1]))
                    .loss;
    if (!report.sensed_summary.empty()) report.sensed_summary += ",";
    report.sensed_summary += sensed[k].signal + "=" + fmt3(values[cursor - 1]);
    ++report.wall_steps;
  }
  report.local_loss = loss_sum / static_cast<double>(sensed.size());

  const ActionSpec& spec = card.action_space.front();
  report.action.name = spec.name;
  bool admissible = false;
  switch (card.layer) {
    case Layer::kPhysical: {
      std::size_t best = 0;
      for (std::size_t k = 1; k < report.predictions.size(); ++k) {
        if (report.predictions[k] > report.predictions[best]) best = k;
      }
      report.action.label = sensed[best].signal;
      report.action.value = report.predictions[best];
      admissible = spec.admits(report.action.label);
      break;
    }
    case Layer::kNetwork: {
      double v = report.predictions.front();
      if (spec.kind == ActionSpec::Kind::kContinuous) v = std::clamp(v, spec.min, spec.max);
      report.action.value = v;
      report.action.label = fmt3(v);
      admissible = spec.admits(v);
      break;
    }
    case Layer::kApplication: {
      const auto& levels = spec.values;
      if (levels.empty() || context.level_rates_mbps.size() < levels.size()) {
        throw ConfigError("agent '" + card.id + "': need a required rate for every level");
      }
      const double requested = std::clamp(std::round(report.predictions.front()), 0.0,
                                          static_cast<double>(levels.size() - 1));
      const double available = context.available_rate_mbps.value_or(
          context.level_rates_mbps[static_cast<std::size_t>(requested)]);
      std::size_t chosen = 0;
      for (std::size_t i = 0; i < levels.size(); ++i) {
        if (context.level_rates_mbps[i] <= available) chosen = i;
      }
      report.action.label = levels[chosen];
      report.action.value = context.level_rates_mbps[chosen];
      admissible = spec.admits(report.action.label);
      break;
    }
  }
  report.status = admissible ? SubtaskStatus::kCompleted : SubtaskStatus::kFailed;
  return report;
}

AgentTeam::AgentTeam(std::vector<const AgentRecord*> members, Options options)
    : members_(std::move(members)), options_(options) {
  if (members_.empty()) throw ConfigError("agent team is empty");
  if (options_.batch == 0) throw ConfigError("minibatch size must be positive");
  shape_ = PredictorShape{options_.window, options_.features, members_.size()};
  for (const auto* m : members_) {
    const auto& data = m->dataset();
    if (data.train.empty()) throw ConfigError("agent '" + m->card().id + "' has an empty training set");
    if (data.train.window != shape_.window) {
      throw ConfigError("agent '" + m->card().id + "' has windows of the wrong length");
    }
  }
  if (has_population()) {
    for (const auto* m : members_) {
      population_.push_back(draw_windows(m->dataset().laws, shape_.window,
                                         options_.population_samples, m->rng_key(), 0));
    }
  }
}

std::vector<double> AgentTeam::sample_gradient(std::size_t agent, std::span<const double> omega,
                                               std::uint64_t seed, std::uint64_t iteration,
                                               SampleSlot slot) const {
  if (agent >= members_.size()) throw InvalidInput("agent index out of range");
  return agentcoord::sample_gradient(*members_[agent], shape_, omega, agent, seed, iteration, slot,
                                    options_.batch);
}

FullBatch AgentTeam::full_batch(std::span<const double> omega) const {
  FullBatch out{GradientMatrix(dim(), members_.size()), std::vector<double>(members_.size())};
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const auto& m = *members_[i];
    const WindowSet& train = m.dataset().train;
    const auto g = agent_loss_gradient(shape_, omega, i, train, m.card().loss);
    std::copy(g.begin(), g.end(), out.gradients.column(i).begin());
    out.losses[i] = agent_mean_loss(shape_, omega, i, train, m.card().loss);
  }
  return out;
}

GradientMatrix AgentTeam::population_gradients(std::span<const double> omega) const {
  if (!has_population()) throw ConfigError("agent team has no population sampling budget");
  GradientMatrix J(dim(), members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const auto g = agent_loss_gradient(shape_, omega, i, population_[i], members_[i]->card().loss);
    std::copy(g.begin(), g.end(), J.column(i).begin());
  }
  return J;
}

}  // namespace agentcoord
