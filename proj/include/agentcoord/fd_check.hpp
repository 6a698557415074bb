#pragma once

#include <functional>
#include <span>
#include <vector>

namespace agentcoord {

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central-difference check of `analytic` against `f` at `x`. Returns the
/// largest |analytic_k - numeric_k| / max(1, |analytic_k|). Throws
/// InvalidInput on h <= 0, a size mismatch or a non-finite evaluation.
double finite_difference_check(const ScalarFunction& f, std::span<const double> x,
                               std::span<const double> analytic, double h);

/// Central-difference gradient of `f` at `x`.
std::vector<double> numeric_gradient(const ScalarFunction& f, std::span<const double> x,
                                     double h);

}  // namespace agentcoord
