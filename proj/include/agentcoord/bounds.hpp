#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace agentcoord {

/// Constants entering the conflicting-error and generalization-error bounds.
struct BoundInputs {
  double lf = 0.0;     // Lipschitz constant of every per-sample loss
  double lfp = 0.0;    // Lipschitz constant of every per-sample gradient
  double U = 0.0;      // bound on the Frobenius norm of the weighted gradient sum
  std::size_t D = 0;   // training-set size
  std::size_t T = 0;   // iterations
  double eta = 0.0;
  double beta = 0.0;

  /// Throws InvalidInput unless every field is strictly positive and finite.
  void validate() const;
};

/// Upper bound on the conflicting error of the dynamic-weighting run:
///   4 / (eta T) + 6 sqrt(3 lfp lf^2 beta / eta) + 3 eta lf^4
double conflict_error_bound(const BoundInputs& b);

struct ScalingPoint {
  std::size_t T = 0;
  std::size_t D = 0;
  double g_error = 0.0;
};

/// Least-squares log-log slopes of the generalization error. `slope_vs_d`
/// is fitted on the largest group of points sharing one T (needs three
/// distinct D values); `slope_vs_t` likewise with the roles swapped.
struct ScalingFit {
  std::optional<double> slope_vs_d;
  std::optional<double> slope_vs_t;
};

/// Throws InvalidInput with fewer than three points, a non-positive error,
/// or when neither grouping has three distinct abscissae.
ScalingFit fit_g_error_scaling(const std::vector<ScalingPoint>& runs);

/// Ordinary least-squares slope of y against x. Requires two distinct x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace agentcoord
