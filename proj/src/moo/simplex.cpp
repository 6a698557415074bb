#include "agentcoord/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "agentcoord/error.hpp"

namespace agentcoord {

WeightVector::WeightVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidInput("weight vector must be non-empty");
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidInput("weight vector entries must be finite and non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw InvalidInput("weight vector must sum to 1 (got " + std::to_string(sum) + ")");
  }
}

WeightVector WeightVector::uniform(std::size_t n) {
  if (n == 0) throw InvalidInput("weight vector must be non-empty");
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)),
                      Unchecked{});
}

WeightVector WeightVector::vertex(std::size_t n, std::size_t i) {
  if (i >= n) throw InvalidInput("simplex vertex index out of range");
  std::vector<double> w(n, 0.0);
  w[i] = 1.0;
  return WeightVector(std::move(w), Unchecked{});
}

WeightVector project_to_simplex(std::span<const double> v) {
  if (v.empty()) throw InvalidInput("cannot project an empty vector");
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInput("cannot project a non-finite vector");
  }
  const std::size_t n = v.size();
  if (n == 1) return WeightVector({1.0}, WeightVector::Unchecked{});

  // Points already on the simplex map to themselves bit-for-bit, which makes
  // the projection exactly idempotent.
  if (std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; }) &&
      std::abs(std::accumulate(v.begin(), v.end(), 0.0) - 1.0) <=
          WeightVector::kSumTolerance) {
    return WeightVector(std::vector<double>(v.begin(), v.end()),
                        WeightVector::Unchecked{});
  }

  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  // Largest k with sorted[k-1] - (sum_{j<k} sorted[j] - 1) / k > 0.
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    prefix += sorted[k - 1];
    const double t = (prefix - 1.0) / static_cast<double>(k);
    if (sorted[k - 1] - t > 0.0) theta = t;
  }

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(v[i] - theta, 0.0);
  return WeightVector(std::move(out), WeightVector::Unchecked{});
}

}  // namespace agentcoord
