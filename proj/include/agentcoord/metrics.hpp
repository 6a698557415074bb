#pragma once

#include <span>

#include "agentcoord/gradient_matrix.hpp"
#include "agentcoord/simplex.hpp"

namespace agentcoord {

/// Conflicting error |J (gamma - gamma_star)|: how far the current weighting
/// is from the Pareto-stationary one, measured in gradient space.
double conflict_error(const GradientMatrix& J, const WeightVector& gamma,
                      const WeightVector& gamma_star);

/// |g_train - g_pop| for one agent.
double per_agent_g_error(std::span<const double> g_train, std::span<const double> g_pop);

/// |(J_train - J_pop) gamma|: weighted gap between empirical and population
/// gradients over all agents.
double generalization_error(const GradientMatrix& J_train, const GradientMatrix& J_pop,
                            const WeightVector& gamma);

}  // namespace agentcoord
