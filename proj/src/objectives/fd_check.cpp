#include "agentcoord/fd_check.hpp"

#include <algorithm>
#include <cmath>

#include "agentcoord/error.hpp"

namespace agentcoord {

std::vector<double> numeric_gradient(const ScalarFunction& f, std::span<const double> x,
                                     double h) {
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + h;
    const double up = f(probe);
    probe[k] = x[k] - h;
    const double down = f(probe);
    probe[k] = x[k];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw InvalidInput("function is not finite near the check point");
    }
    out[k] = (up - down) / (2.0 * h);
  }
  return out;
}

double finite_difference_check(const ScalarFunction& f, std::span<const double> x,
                               std::span<const double> analytic, double h) {
  if (analytic.size() != x.size()) throw InvalidInput("analytic gradient size mismatch");
  const auto numeric = numeric_gradient(f, x, h);
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    worst = std::max(worst, std::abs(analytic[k] - numeric[k]) / std::max(1.0, std::abs(analytic[k])));
  }
  return worst;
}

}  // namespace agentcoord
