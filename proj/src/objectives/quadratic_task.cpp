#include "agentcoord/quadratic_task.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "agentcoord/error.hpp"
#include "agentcoord/kernels.hpp"
#include "agentcoord/rng.hpp"

namespace agentcoord {
namespace {

void project_to_ball(std::span<double> x, double radius) {
  const double norm = euclidean_norm(x);
  if (norm > radius) {
    const double s = radius / norm;
    for (double& v : x) v *= s;
  }
}

double max_eigenvalue(const std::vector<double>& A, std::size_t dim) {
  if (dim == 0) return 0.0;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      A.data(), dim, dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return std::max(solver.eigenvalues().maxCoeff(), 0.0);
}

std::vector<double> diag(std::initializer_list<double> d) {
  const std::size_t n = d.size();
  std::vector<double> A(n * n, 0.0);
  std::size_t i = 0;
  for (double v : d) {
    A[i * n + i] = v;
    ++i;
  }
  return A;
}

}  // namespace

QuadraticTask::QuadraticTask(std::vector<QuadraticAgent> agents, double radius,
                             double sample_noise, std::size_t samples_per_agent,
                             std::uint64_t data_seed)
    : agents_(std::move(agents)), radius_(radius) {
  if (agents_.empty()) throw ConfigError("quadratic task needs at least one agent");
  if (!(radius_ > 0.0)) throw InvalidInput("quadratic task radius must be positive");
  if (sample_noise < 0.0) throw InvalidInput("sample noise must be non-negative");
  dim_ = agents_.front().center.size();
  for (const auto& a : agents_) {
    if (a.center.size() != dim_ || a.A.size() != dim_ * dim_) {
      throw InvalidInput("quadratic agents must share one dimension");
    }
    for (std::size_t r = 0; r < dim_; ++r) {
      for (std::size_t c = 0; c < dim_; ++c) {
        if (std::abs(a.A[r * dim_ + c] - a.A[c * dim_ + r]) > 1e-12) {
          throw InvalidInput("quadratic curvature matrix must be symmetric");
        }
      }
    }
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        a.A.data(), dim_, dim_);
    if (dim_ > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
      if (solver.eigenvalues().minCoeff() < -1e-12) {
        throw InvalidInput("quadratic curvature matrix must be positive semidefinite");
      }
    }
  }

  const std::size_t n = agents_.size();
  samples_.assign(n, {});
  sample_mean_.assign(n, {});
  spread_loss_.assign(n, 0.0);
  if (sample_noise > 0.0 && samples_per_agent > 0) {
    std::normal_distribution<double> normal(0.0, sample_noise);
    for (std::size_t i = 0; i < n; ++i) {
      KeyedRng rng(data_seed, StreamTag::kData, {i});
      auto& pool = samples_[i];
      pool.assign(samples_per_agent, agents_[i].center);
      std::vector<double> mean(dim_, 0.0);
      for (auto& d : pool) {
        for (double& v : d) v += normal(rng);
        kernels::axpy(1.0 / static_cast<double>(samples_per_agent), d, mean);
      }
      double spread = 0.0;
      std::vector<double> dev(dim_);
      for (const auto& d : pool) {
        kernels::sub(d, mean, dev);
        for (std::size_t r = 0; r < dim_; ++r) {
          spread += dev[r] * kernels::dot({agents_[i].A.data() + r * dim_, dim_}, dev);
        }
      }
      sample_mean_[i] = std::move(mean);
      spread_loss_[i] = 0.5 * spread / static_cast<double>(samples_per_agent);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) sample_mean_[i] = agents_[i].center;
  }
}

std::vector<double> QuadraticTask::gradient_at(std::size_t agent, std::span<const double> omega,
                                               std::span<const double> center) const {
  std::vector<double> diff(dim_);
  kernels::sub(omega, center, diff);
  std::vector<double> g(dim_);
  const auto& A = agents_[agent].A;
  for (std::size_t r = 0; r < dim_; ++r) g[r] = kernels::dot({A.data() + r * dim_, dim_}, diff);
  return g;
}

std::vector<double> QuadraticTask::sample_gradient(std::size_t agent,
                                                   std::span<const double> omega,
                                                   std::uint64_t seed,
                                                   std::uint64_t iteration,
                                                   SampleSlot slot) const {
  if (agent >= agents_.size()) throw InvalidInput("agent index out of range");
  if (omega.size() != dim_) throw InvalidInput("parameter dimension mismatch");
  const auto& pool = samples_[agent];
  if (pool.empty()) return gradient_at(agent, omega, agents_[agent].center);
  const std::uint64_t stream = shared_stream_ ? 0 : agent;
  KeyedRng rng(seed, StreamTag::kSample, {stream, iteration, static_cast<std::uint64_t>(slot)});
  return gradient_at(agent, omega, pool[rng.index(pool.size())]);
}

FullBatch QuadraticTask::full_batch(std::span<const double> omega) const {
  if (omega.size() != dim_) throw InvalidInput("parameter dimension mismatch");
  FullBatch out{GradientMatrix(dim_, agents_.size()), std::vector<double>(agents_.size())};
  std::vector<double> diff(dim_);
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto g = gradient_at(i, omega, sample_mean_[i]);
    std::copy(g.begin(), g.end(), out.gradients.column(i).begin());
    kernels::sub(omega, sample_mean_[i], diff);
    out.losses[i] = 0.5 * kernels::dot(diff, g) + spread_loss_[i];
  }
  return out;
}

GradientMatrix QuadraticTask::population_gradients(std::span<const double> omega) const {
  if (omega.size() != dim_) throw InvalidInput("parameter dimension mismatch");
  GradientMatrix J(dim_, agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto g = gradient_at(i, omega, agents_[i].center);
    std::copy(g.begin(), g.end(), J.column(i).begin());
  }
  return J;
}

void QuadraticTask::confine(std::span<double> omega) const { project_to_ball(omega, radius_); }

GradientMatrix quadratic_gradients(const QuadraticTask& task, std::span<const double> omega) {
  if (omega.size() != task.dim()) throw InvalidInput("parameter dimension mismatch");
  std::vector<double> x(omega.begin(), omega.end());
  task.confine(x);
  return task.population_gradients(x);
}

LipschitzConstants lipschitz_constants(const QuadraticTask& task) {
  LipschitzConstants out;
  for (std::size_t i = 0; i < task.agents(); ++i) {
    const auto& q = task.quadratics()[i];
    const double lambda = max_eigenvalue(q.A, task.dim());
    double far = euclidean_norm(q.center);
    for (const auto& d : task.samples(i)) far = std::max(far, euclidean_norm(d));
    out.lfp = std::max(out.lfp, lambda);
    out.lf = std::max(out.lf, lambda * (task.radius() + far));
  }
  return out;
}

QuadraticTask make_conflicting_quadratic_task(double sample_noise,
                                              std::size_t samples_per_agent,
                                              std::uint64_t data_seed) {
  std::vector<QuadraticAgent> agents{
      {diag({2.0, 0.5, 1.0}), {2.0, 0.0, 0.0}},
      {diag({0.5, 2.0, 1.0}), {0.0, 2.0, 0.0}},
      {diag({1.0, 1.0, 0.25}), {0.0, 0.0, 2.0}},
  };
  return QuadraticTask(std::move(agents), 10.0, sample_noise, samples_per_agent, data_seed);
}

QuadraticTask make_identical_quadratic_task(std::size_t agents, double sample_noise,
                                            std::size_t samples_per_agent,
                                            std::uint64_t data_seed) {
  QuadraticAgent q{diag({1.5, 1.0, 0.5}), {1.0, -1.0, 0.5}};
  QuadraticTask base({q}, 10.0, sample_noise, samples_per_agent, data_seed);
  QuadraticTask out(std::vector<QuadraticAgent>(agents, q), 10.0);
  // Every agent gets the single-agent training set and the same draws.
  out.shared_stream_ = true;
  for (std::size_t i = 0; i < agents; ++i) {
    out.samples_[i] = base.samples_[0];
    out.sample_mean_[i] = base.sample_mean_[0];
    out.spread_loss_[i] = base.spread_loss_[0];
  }
  return out;
}

QuadraticTask make_opposing_scalar_task() {
  return QuadraticTask({{{2.0}, {1.0}}, {{2.0}, {-1.0}}}, 10.0);
}

}  // namespace agentcoord
