#include "agentcoord/min_norm.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "agentcoord/error.hpp"

namespace agentcoord {
namespace {

MinNormResult finish(const GradientMatrix& J, WeightVector w, std::size_t iters) {
  const double value = euclidean_norm(J.combine(w.values()));
  return {std::move(w), value, iters};
}

MinNormResult solve_two(const GradientMatrix& J) {
  const auto g = cross_gram(J, J);
  const double aa = g[0], ab = g[1], bb = g[3];
  const double denom = aa - 2.0 * ab + bb;  // |a - b|^2
  double lambda = 0.5;
  if (denom > 0.0) lambda = std::clamp((bb - ab) / denom, 0.0, 1.0);
  return finish(J, WeightVector({lambda, 1.0 - lambda}), 0);
}

}  // namespace

MinNormResult min_norm_weights(const GradientMatrix& J,
                               const std::optional<WeightVector>& warm_start,
                               const MinNormOptions& options) {
  const std::size_t n = J.agents();
  if (n == 0) throw InvalidInput("min_norm_weights needs at least one gradient column");
  if (warm_start && warm_start->size() != n) {
    throw InvalidInput("warm start does not match the number of gradient columns");
  }
  if (n == 1) return finish(J, WeightVector::uniform(1), 0);
  if (n == 2) return solve_two(J);

  const auto gram = cross_gram(J, J);
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += gram[i * n + i];
  WeightVector w = warm_start ? *warm_start : WeightVector::uniform(n);
  if (!(trace > 0.0)) return finish(J, std::move(w), 0);

  // Step 1/trace(G) <= 1/lambda_max(G) keeps the projected iteration monotone.
  const double step = 1.0 / trace;
  std::vector<double> next(n);
  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double gi = 0.0;
      for (std::size_t j = 0; j < n; ++j) gi += gram[i * n + j] * w[j];
      next[i] = w[i] - step * gi;
    }
    WeightVector projected = project_to_simplex(next);
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      moved = std::max(moved, std::abs(projected[i] - w[i]));
    }
    w = std::move(projected);
    if (moved <= options.tolerance) {
      ++it;
      break;
    }
  }
  return finish(J, std::move(w), it);
}

double pareto_gap(const GradientMatrix& J) { return min_norm_weights(J).value; }

}  // namespace agentcoord
