#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace agentcoord {

/// A point on the probability simplex: one non-negative weight per agent,
/// summing to one within 1e-12.
class WeightVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  /// Validates and wraps `weights`. Throws InvalidInput if any entry is
  /// negative or non-finite, or if the entries do not sum to one.
  explicit WeightVector(std::vector<double> weights);

  static WeightVector uniform(std::size_t n);
  /// Unit vector on vertex `i` of the n-simplex.
  static WeightVector vertex(std::size_t n, std::size_t i);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> values() const noexcept { return weights_; }
  const std::vector<double>& vector() const noexcept { return weights_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  struct Unchecked {};
  WeightVector(std::vector<double> weights, Unchecked) : weights_(std::move(weights)) {}
  friend WeightVector project_to_simplex(std::span<const double> v);

  std::vector<double> weights_;
};

/// Euclidean projection onto the probability simplex (sort-and-threshold).
/// Throws InvalidInput on an empty or non-finite input.
WeightVector project_to_simplex(std::span<const double> v);

}  // namespace agentcoord
