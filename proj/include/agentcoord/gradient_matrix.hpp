#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace agentcoord {

/// Column-stacked per-agent gradients of the joint parameter vector.
/// Storage is column-major so every column is a contiguous span.
class GradientMatrix {
 public:
  GradientMatrix() = default;
  /// Zero matrix with `dim` rows and `agents` columns.
  GradientMatrix(std::size_t dim, std::size_t agents);
  /// Throws InvalidInput if the columns disagree in dimension.
  static GradientMatrix from_columns(const std::vector<std::vector<double>>& columns);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t agents() const noexcept { return agents_; }

  std::span<double> column(std::size_t i) {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<const double> column(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  /// J * weights. Throws InvalidInput on a length mismatch.
  std::vector<double> combine(std::span<const double> weights) const;

  friend bool operator==(const GradientMatrix&, const GradientMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::size_t agents_ = 0;
  std::vector<double> data_;
};

/// Row-major agents x agents matrix lhs^T rhs.
std::vector<double> cross_gram(const GradientMatrix& lhs, const GradientMatrix& rhs);

/// Throws InvalidInput unless the two matrices have the same shape.
void require_same_shape(const GradientMatrix& a, const GradientMatrix& b,
                        const char* what);

double euclidean_norm(std::span<const double> v);

/// Contiguous named slice [offset, offset + size) of the joint parameter vector.
struct ParamSlice {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;

  friend bool operator==(const ParamSlice&, const ParamSlice&) = default;
};

/// Flat joint parameter vector plus a layout that partitions it into named
/// slices (shared backbone followed by per-agent blocks).
class JointModel {
 public:
  JointModel() = default;
  /// Throws InvalidInput unless the slices are contiguous, non-overlapping
  /// and cover [0, parameters.size()).
  JointModel(std::vector<double> parameters, std::vector<ParamSlice> layout);
  /// Single-slice model covering all parameters.
  static JointModel flat(std::vector<double> parameters);

  std::size_t dim() const noexcept { return params_.size(); }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  const std::vector<ParamSlice>& layout() const noexcept { return layout_; }
  /// Throws InvalidInput for an unknown slice name.
  const ParamSlice& slice(const std::string& name) const;

  friend bool operator==(const JointModel&, const JointModel&) = default;

 private:
  std::vector<double> params_;
  std::vector<ParamSlice> layout_;
};

}  // namespace agentcoord
