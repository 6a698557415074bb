#pragma once

#include <cstddef>
#include <optional>

#include "agentcoord/gradient_matrix.hpp"
#include "agentcoord/simplex.hpp"

namespace agentcoord {

struct MinNormResult {
  WeightVector weights;  // argmin over the simplex of |J w|
  double value = 0.0;    // |J weights|, the Pareto gap at this point
  std::size_t iterations = 0;
};

struct MinNormOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 100000;
};

/// Min-norm element of the convex hull of the columns of `J`.
///
/// One and two columns are solved in closed form. Three or more columns use
/// projected gradient descent on the Gram matrix, starting from `warm_start`
/// when given (a previous iterate's solution is usually close) and otherwise
/// from the uniform weighting. The iteration stops once no weight moves by
/// more than `tolerance`.
MinNormResult min_norm_weights(const GradientMatrix& J,
                               const std::optional<WeightVector>& warm_start = std::nullopt,
                               const MinNormOptions& options = {});

/// Norm of the min-norm convex combination; zero iff some simplex weighting
/// of the gradients vanishes.
double pareto_gap(const GradientMatrix& J);

}  // namespace agentcoord
