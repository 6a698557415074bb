#include "agentcoord/metrics.hpp"

#include <cmath>
#include <vector>

#include "agentcoord/error.hpp"
#include "agentcoord/kernels.hpp"

namespace agentcoord {

double conflict_error(const GradientMatrix& J, const WeightVector& gamma,
                      const WeightVector& gamma_star) {
  if (gamma.size() != J.agents() || gamma_star.size() != J.agents()) {
    throw InvalidInput("conflict_error: weight vectors must match the agent count");
  }
  std::vector<double> diff(J.agents());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = gamma[i] - gamma_star[i];
  return euclidean_norm(J.combine(diff));
}

double per_agent_g_error(std::span<const double> g_train, std::span<const double> g_pop) {
  if (g_train.size() != g_pop.size()) {
    throw InvalidInput("per_agent_g_error: gradient dimensions differ");
  }
  return std::sqrt(kernels::squared_distance(g_train, g_pop));
}

double generalization_error(const GradientMatrix& J_train, const GradientMatrix& J_pop,
                            const WeightVector& gamma) {
  require_same_shape(J_train, J_pop, "generalization_error");
  if (gamma.size() != J_train.agents()) {
    throw InvalidInput("generalization_error: weights must match the agent count");
  }
  std::vector<double> acc(J_train.dim(), 0.0);
  std::vector<double> diff(J_train.dim());
  for (std::size_t i = 0; i < J_train.agents(); ++i) {
    kernels::sub(J_train.column(i), J_pop.column(i), diff);
    kernels::axpy(gamma[i], diff, acc);
  }
  return euclidean_norm(acc);
}

}  // namespace agentcoord
