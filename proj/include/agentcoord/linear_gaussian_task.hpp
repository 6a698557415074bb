#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "agentcoord/task.hpp"

namespace agentcoord {

/// Agents regress y = theta_i^T x + noise with x ~ N(0, I) on one shared
/// weight vector under squared error. Each agent trains on D samples; the
/// population gradient is 2 (w - theta_i) in closed form.
class LinearGaussianTask : public StochasticTask {
 public:
  LinearGaussianTask(std::vector<std::vector<double>> thetas, double noise_std,
                     std::size_t samples_per_agent, std::uint64_t data_seed);

  std::size_t agents() const override { return thetas_.size(); }
  std::size_t dim() const override { return dim_; }
  std::size_t samples_per_agent() const noexcept { return d_; }

  std::vector<double> sample_gradient(std::size_t agent, std::span<const double> omega,
                                      std::uint64_t seed, std::uint64_t iteration,
                                      SampleSlot slot) const override;
  FullBatch full_batch(std::span<const double> omega) const override;
  bool has_population() const override { return true; }
  GradientMatrix population_gradients(std::span<const double> omega) const override;

  PopulationEstimate population_gradient(std::size_t agent, std::span<const double> w) const;
  /// Mean per-sample gradient over `samples` fresh draws from the agent's
  /// distribution, using a stream keyed by (seed, agent).
  PopulationEstimate monte_carlo_population_gradient(std::size_t agent,
                                                     std::span<const double> w,
                                                     std::size_t samples,
                                                     std::uint64_t seed) const;

 private:
  std::vector<std::vector<double>> thetas_;
  double noise_std_ = 0.0;
  std::size_t dim_ = 0;
  std::size_t d_ = 0;
  std::vector<std::vector<double>> x_;  // per agent, D x dim row-major
  std::vector<std::vector<double>> y_;
  std::vector<std::vector<double>> xx_;  // X^T X / D, row-major
  std::vector<std::vector<double>> xy_;  // X^T y / D
  std::vector<double> yy_;               // y^T y / D
};

/// Three agents in R^4 with distinct regression targets and noise 0.5.
LinearGaussianTask make_linear_gaussian_task(std::size_t samples_per_agent,
                                             std::uint64_t data_seed);

}  // namespace agentcoord
