#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agentcoord/agent_card.hpp"
#include "agentcoord/predictor.hpp"
#include "agentcoord/task.hpp"
#include "agentcoord/traces.hpp"

namespace agentcoord {

/// Cards in registration order; an agent's index is its position.
class AgentRegistry {
 public:
  /// Validates the card and appends it. Throws ConflictError on a duplicate id.
  std::size_t register_agent(AgentCard card);

  std::size_t size() const noexcept { return cards_.size(); }
  const AgentCard& card(std::size_t index) const { return cards_.at(index); }
  const std::vector<AgentCard>& cards() const noexcept { return cards_; }
  std::optional<std::size_t> find(const std::string& id) const;

 private:
  std::vector<AgentCard> cards_;
  std::map<std::string, std::size_t> index_;
};

/// One layer-specific requirement handed to one agent.
struct Subtask {
  std::string id;
  std::string goal_id;
  Layer layer = Layer::kApplication;
  std::string requirement;
  std::vector<std::string> skills;
};

/// Inputs the controller relays into a subtask execution. Agents never talk
/// to each other directly.
struct SubtaskContext {
  std::optional<double> available_rate_mbps;
  /// Required rate per resolution level, in the order of the card's levels.
  std::vector<double> level_rates_mbps{1.0, 2.5, 4.0, 5.0, 8.0};
};

struct ChosenAction {
  std::string name;
  std::string label;  // discrete choice, or the formatted value
  double value = 0.0;
};

enum class SubtaskStatus { kCompleted, kFailed };
std::string to_string(SubtaskStatus s);

struct SubtaskReport {
  std::string agent_id;
  std::string subtask_id;
  std::string sensed_summary;
  ChosenAction action;
  std::vector<double> predictions;  // de-normalized, one per sensed signal
  double local_loss = 0.0;
  SubtaskStatus status = SubtaskStatus::kCompleted;
  std::size_t wall_steps = 0;
};

/// A registered agent together with its private data: training split, the
/// live signals it senses, and its keyed random stream.
class AgentRecord {
 public:
  AgentRecord(AgentCard card, DatasetSplit dataset, std::vector<Trace> sensed,
              std::uint64_t rng_key);

  const AgentCard& card() const noexcept { return card_; }
  std::uint64_t rng_key() const noexcept { return rng_key_; }
  /// Dataset access; every call is counted.
  const DatasetSplit& dataset() const;
  std::uint64_t dataset_reads() const noexcept { return reads_->load(); }

  const std::vector<Trace>& sensed() const noexcept { return sensed_; }
  /// Sensed window ends at `cursor` (exclusive). Defaults to the trace end.
  std::size_t cursor() const noexcept { return cursor_; }
  void set_cursor(std::size_t c) { cursor_ = c; }

 private:
  AgentCard card_;
  DatasetSplit dataset_;
  std::vector<Trace> sensed_;
  std::uint64_t rng_key_ = 0;
  std::size_t cursor_ = 0;
  std::shared_ptr<std::atomic<std::uint64_t>> reads_;
};

/// Mean gradient over `batch` training samples drawn uniformly (with
/// replacement) on the stream keyed by (seed, agent rng key, iteration,
/// slot), evaluated for predictor head `head`. Throws ConfigError when the
/// training set is empty or the batch is zero.
std::vector<double> sample_gradient(const AgentRecord& agent, const PredictorShape& shape,
                                    std::span<const double> params, std::size_t head,
                                    std::uint64_t seed, std::uint64_t iteration, SampleSlot slot,
                                    std::size_t batch = 1);

/// Senses the current window, predicts with head `head` and maps the
/// prediction to an action:
///   application: highest level whose required rate fits the available rate
///                (360p-style floor when none fits);
///   physical:    band with the highest predicted rate, lowest index on ties;
///   network:     the predicted bandwidth.
/// Throws AssignmentError on a layer mismatch and ConfigError on an empty or
/// too-short sensed trace.
SubtaskReport execute_subtask(const AgentRecord& agent, const Subtask& subtask,
                              const PredictorShape& shape, std::span<const double> params,
                              std::size_t head, const SubtaskContext& context = {});

/// The assigned agents as one StochasticTask over a shared-backbone
/// predictor: agent k of the team trains head k with its card's loss.
class AgentTeam : public StochasticTask {
 public:
  struct Options {
    std::size_t window = 8;
    std::size_t features = 4;
    std::size_t population_samples = 100000;
    std::size_t batch = 64;  // windows per stochastic gradient
    double init_scale = 0.01;
  };

  AgentTeam(std::vector<const AgentRecord*> members, Options options);

  std::size_t agents() const override { return members_.size(); }
  std::size_t dim() const override { return shape_.parameter_count(); }
  std::vector<ParamSlice> layout() const override { return shape_.layout(); }
  const PredictorShape& shape() const noexcept { return shape_; }

  std::vector<double> sample_gradient(std::size_t agent, std::span<const double> omega,
                                      std::uint64_t seed, std::uint64_t iteration,
                                      SampleSlot slot) const override;
  FullBatch full_batch(std::span<const double> omega) const override;
  bool has_population() const override { return options_.population_samples >= 2; }
  /// Mean gradient over a large sample drawn once per member from its
  /// signal laws, independent of the training data. Reusing one sample keeps
  /// the estimate a smooth function of the parameters.
  GradientMatrix population_gradients(std::span<const double> omega) const override;
  /// Starts away from the all-zero saddle of the bilinear predictor.
  double init_scale() const override { return options_.init_scale; }

 private:
  std::vector<const AgentRecord*> members_;
  Options options_;
  PredictorShape shape_;
  std::vector<WindowSet> population_;  // one per member, empty without a budget
};

}  // namespace agentcoord
