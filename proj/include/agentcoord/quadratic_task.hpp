#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "agentcoord/task.hpp"

namespace agentcoord {

/// Agent loss 1/2 (x - d)^T A (x - d) around a center d.
struct QuadraticAgent {
  std::vector<double> A;  // row-major dim x dim, symmetric PSD
  std::vector<double> center;
};

/// Quadratic agents on a shared parameter vector confined to a ball of
/// radius R. With `sample_noise > 0` each agent holds `samples_per_agent`
/// training centers drawn from N(center, noise^2 I); stochastic gradients use
/// one of them, full-batch gradients their mean, and the population gradient
/// the true center. Without noise every gradient is exact.
class QuadraticTask : public StochasticTask {
 public:
  QuadraticTask(std::vector<QuadraticAgent> agents, double radius,
                double sample_noise = 0.0, std::size_t samples_per_agent = 0,
                std::uint64_t data_seed = 0);

  std::size_t agents() const override { return agents_.size(); }
  std::size_t dim() const override { return dim_; }
  double radius() const noexcept { return radius_; }
  const std::vector<QuadraticAgent>& quadratics() const noexcept { return agents_; }
  /// Training centers of agent i (empty for a noise-free task).
  const std::vector<std::vector<double>>& samples(std::size_t i) const { return samples_[i]; }

  std::vector<double> sample_gradient(std::size_t agent, std::span<const double> omega,
                                      std::uint64_t seed, std::uint64_t iteration,
                                      SampleSlot slot) const override;
  FullBatch full_batch(std::span<const double> omega) const override;
  bool has_population() const override { return true; }
  GradientMatrix population_gradients(std::span<const double> omega) const override;
  void confine(std::span<double> omega) const override;

 private:
  friend QuadraticTask make_identical_quadratic_task(std::size_t, double, std::size_t,
                                                     std::uint64_t);
  std::vector<double> gradient_at(std::size_t agent, std::span<const double> omega,
                                  std::span<const double> center) const;

  std::vector<QuadraticAgent> agents_;
  std::size_t dim_ = 0;
  double radius_ = 0.0;
  std::vector<std::vector<std::vector<double>>> samples_;
  std::vector<std::vector<double>> sample_mean_;
  std::vector<double> spread_loss_;  // 1/2 mean (d - mean)^T A (d - mean)
  bool shared_stream_ = false;       // all agents draw with agent 0's stream
};

/// Exact gradients A_i (omega - c_i) around the true centers, with omega
/// first projected onto the task's ball. Throws InvalidInput on a
/// dimension mismatch.
GradientMatrix quadratic_gradients(const QuadraticTask& task, std::span<const double> omega);

struct LipschitzConstants {
  double lf = 0.0;   // bound on |grad| over the ball, for every sample
  double lfp = 0.0;  // largest Hessian eigenvalue
};

/// Constants valid on the radius-R ball for every per-sample loss of the task:
/// lfp = max_i lambda_max(A_i), lf = max_i lambda_max(A_i) (R + max |d|) over
/// all centers and training samples d.
LipschitzConstants lipschitz_constants(const QuadraticTask& task);

/// Three agents in R^3 pulling toward different axes with different
/// curvatures; the equal-weight direction is far from the min-norm one.
QuadraticTask make_conflicting_quadratic_task(double sample_noise = 0.5,
                                              std::size_t samples_per_agent = 1000,
                                              std::uint64_t data_seed = 0);

/// `agents` copies of one quadratic, sharing one training set and one sample
/// stream, so every stochastic gradient matrix has identical columns.
QuadraticTask make_identical_quadratic_task(std::size_t agents = 3, double sample_noise = 0.5,
                                            std::size_t samples_per_agent = 1000,
                                            std::uint64_t data_seed = 0);

/// f1 = (x - 1)^2 and f2 = (x + 1)^2 on the line, noise free.
QuadraticTask make_opposing_scalar_task();

}  // namespace agentcoord
