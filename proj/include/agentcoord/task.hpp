#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "agentcoord/gradient_matrix.hpp"

namespace agentcoord {

/// Index of the independent draw within one iteration: slots 1 and 2 feed the
/// weight update, slot 3 feeds the model update.
enum class SampleSlot : int { kFirst = 1, kSecond = 2, kThird = 3 };

struct FullBatch {
  GradientMatrix gradients;    // one column per agent, over the training sets
  std::vector<double> losses;  // mean training loss per agent
};

/// Population gradient of one agent. `std_error` holds the per-coordinate
/// standard error of a Monte-Carlo estimate and is all zeros for closed forms.
struct PopulationEstimate {
  std::vector<double> gradient;
  std::vector<double> std_error;
  std::size_t samples = 0;  // 0 for closed forms
};

/// A multi-agent learning problem over a shared parameter vector. Every agent
/// owns a loss and a training set; the optimizer only sees gradients.
class StochasticTask {
 public:
  virtual ~StochasticTask() = default;

  virtual std::size_t agents() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::vector<ParamSlice> layout() const { return {{"all", 0, dim()}}; }

  /// Gradient of agent `agent` on one training sample drawn with the stream
  /// keyed by (seed, agent, iteration, slot). Pure in all arguments.
  virtual std::vector<double> sample_gradient(std::size_t agent,
                                              std::span<const double> omega,
                                              std::uint64_t seed,
                                              std::uint64_t iteration,
                                              SampleSlot slot) const = 0;

  virtual FullBatch full_batch(std::span<const double> omega) const = 0;

  virtual bool has_population() const { return false; }
  /// Gradients of the population (deployment) losses. Throws ConfigError
  /// when the task has no population model.
  virtual GradientMatrix population_gradients(std::span<const double> omega) const;

  /// Maps an iterate back into the task's admissible domain (no-op by default).
  virtual void confine(std::span<double> omega) const { (void)omega; }

  /// Standard deviation of the seeded Gaussian initial parameters.
  virtual double init_scale() const { return 0.01; }
};

}  // namespace agentcoord
