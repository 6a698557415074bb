#include "agentcoord/linear_gaussian_task.hpp"

#include <cmath>
#include <random>

#include "agentcoord/error.hpp"
#include "agentcoord/kernels.hpp"
#include "agentcoord/rng.hpp"

namespace agentcoord {

LinearGaussianTask::LinearGaussianTask(std::vector<std::vector<double>> thetas,
                                       double noise_std, std::size_t samples_per_agent,
                                       std::uint64_t data_seed)
    : thetas_(std::move(thetas)), noise_std_(noise_std), d_(samples_per_agent) {
  if (thetas_.empty()) throw ConfigError("linear-Gaussian task needs at least one agent");
  if (d_ == 0) throw ConfigError("linear-Gaussian task needs a non-empty training set");
  if (noise_std_ < 0.0) throw InvalidInput("noise standard deviation must be non-negative");
  dim_ = thetas_.front().size();
  for (const auto& th : thetas_) {
    if (th.size() != dim_) throw InvalidInput("regression targets must share one dimension");
  }
  const std::size_t n = thetas_.size();
  x_.resize(n);
  y_.resize(n);
  xx_.assign(n, std::vector<double>(dim_ * dim_, 0.0));
  xy_.assign(n, std::vector<double>(dim_, 0.0));
  yy_.assign(n, 0.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double inv = 1.0 / static_cast<double>(d_);
  for (std::size_t i = 0; i < n; ++i) {
    KeyedRng rng(data_seed, StreamTag::kData, {i});
    x_[i].resize(d_ * dim_);
    y_[i].resize(d_);
    for (std::size_t k = 0; k < d_; ++k) {
      std::span<double> x{x_[i].data() + k * dim_, dim_};
      for (double& v : x) v = normal(rng);
      const double y = kernels::dot(thetas_[i], x) + noise_std_ * normal(rng);
      y_[i][k] = y;
      for (std::size_t r = 0; r < dim_; ++r) kernels::axpy(x[r] * inv, x, {xx_[i].data() + r * dim_, dim_});
      kernels::axpy(y * inv, x, xy_[i]);
      yy_[i] += y * y * inv;
    }
  }
}

std::vector<double> LinearGaussianTask::sample_gradient(std::size_t agent,
                                                        std::span<const double> omega,
                                                        std::uint64_t seed,
                                                        std::uint64_t iteration,
                                                        SampleSlot slot) const {
  if (agent >= thetas_.size()) throw InvalidInput("agent index out of range");
  if (omega.size() != dim_) throw InvalidInput("parameter dimension mismatch");
  KeyedRng rng(seed, StreamTag::kSample, {agent, iteration, static_cast<std::uint64_t>(slot)});
  const std::size_t k = rng.index(d_);
  std::span<const double> x{x_[agent].data() + k * dim_, dim_};
  const double residual = kernels::dot(omega, x) - y_[agent][k];
  std::vector<double> g(dim_, 0.0);
  kernels::axpy(2.0 * residual, x, g);
  return g;
}

FullBatch LinearGaussianTask::full_batch(std::span<const double> omega) const {
  if (omega.size() != dim_) throw InvalidInput("parameter dimension mismatch");
  FullBatch out{GradientMatrix(dim_, thetas_.size()), std::vector<double>(thetas_.size())};
  for (std::size_t i = 0; i < thetas_.size(); ++i) {
    auto col = out.gradients.column(i);
    for (std::size_t r = 0; r < dim_; ++r) {
      col[r] = 2.0 * (kernels::dot({xx_[i].data() + r * dim_, dim_}, omega) - xy_[i][r]);
    }
    // w^T S w - 2 b^T w + yy, with S w = col / 2 + b
    out.losses[i] = 0.5 * kernels::dot(col, omega) - kernels::dot(xy_[i], omega) + yy_[i];
  }
  return out;
}

PopulationEstimate LinearGaussianTask::population_gradient(std::size_t agent,
                                                           std::span<const double> w) const {
  if (agent >= thetas_.size()) throw InvalidInput("agent index out of range");
  if (w.size() != dim_) throw InvalidInput("parameter dimension mismatch");
  PopulationEstimate est;
  est.gradient.resize(dim_);
  for (std::size_t r = 0; r < dim_; ++r) est.gradient[r] = 2.0 * (w[r] - thetas_[agent][r]);
  est.std_error.assign(dim_, 0.0);
  return est;
}

GradientMatrix LinearGaussianTask::population_gradients(std::span<const double> omega) const {
  GradientMatrix J(dim_, thetas_.size());
  for (std::size_t i = 0; i < thetas_.size(); ++i) {
    const auto g = population_gradient(i, omega).gradient;
    std::copy(g.begin(), g.end(), J.column(i).begin());
  }
  return J;
}

PopulationEstimate LinearGaussianTask::monte_carlo_population_gradient(
    std::size_t agent, std::span<const double> w, std::size_t samples,
    std::uint64_t seed) const {
  if (agent >= thetas_.size()) throw InvalidInput("agent index out of range");
  if (w.size() != dim_) throw InvalidInput("parameter dimension mismatch");
  if (samples < 2) throw ConfigError("Monte-Carlo population gradient needs a sampling budget");
  KeyedRng rng(seed, StreamTag::kPopulation, {agent});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> sum(dim_, 0.0), sum_sq(dim_, 0.0), x(dim_), g(dim_);
  for (std::size_t k = 0; k < samples; ++k) {
    for (double& v : x) v = normal(rng);
    const double y = kernels::dot(thetas_[agent], x) + noise_std_ * normal(rng);
    const double residual = kernels::dot(w, x) - y;
    for (std::size_t r = 0; r < dim_; ++r) {
      g[r] = 2.0 * residual * x[r];
      sum[r] += g[r];
      sum_sq[r] += g[r] * g[r];
    }
  }
  const double n = static_cast<double>(samples);
  PopulationEstimate est;
  est.samples = samples;
  est.gradient.resize(dim_);
  est.std_error.resize(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    const double mean = sum[r] / n;
    const double var = std::max(sum_sq[r] / n - mean * mean, 0.0) * n / (n - 1.0);
    est.gradient[r] = mean;
    est.std_error[r] = std::sqrt(var / n);
  }
  return est;
}

LinearGaussianTask make_linear_gaussian_task(std::size_t samples_per_agent,
                                             std::uint64_t data_seed) {
  return LinearGaussianTask({{1.0, 0.5, 0.0, -0.5}, {-0.5, 1.0, 0.5, 0.0}, {0.0, -0.5, 1.0, 0.5}},
                            0.5, samples_per_agent, data_seed);
}

}  // namespace agentcoord
