#include "agentcoord/gradient_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "agentcoord/error.hpp"
#include "agentcoord/kernels.hpp"

namespace agentcoord {

GradientMatrix::GradientMatrix(std::size_t dim, std::size_t agents)
    : dim_(dim), agents_(agents), data_(dim * agents, 0.0) {}

GradientMatrix GradientMatrix::from_columns(
    const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) return {};
  const std::size_t dim = columns.front().size();
  GradientMatrix out(dim, columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].size() != dim) {
      throw InvalidInput("gradient columns must share one dimension");
    }
    std::copy(columns[i].begin(), columns[i].end(), out.column(i).begin());
  }
  return out;
}

std::vector<double> GradientMatrix::combine(std::span<const double> weights) const {
  if (weights.size() != agents_) {
    throw InvalidInput("weight count does not match gradient columns");
  }
  std::vector<double> out(dim_, 0.0);
  for (std::size_t i = 0; i < agents_; ++i) {
    kernels::axpy(weights[i], column(i), out);
  }
  return out;
}

std::vector<double> cross_gram(const GradientMatrix& lhs, const GradientMatrix& rhs) {
  require_same_shape(lhs, rhs, "cross_gram");
  const std::size_t n = lhs.agents();
  std::vector<double> g(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      g[i * n + j] = kernels::dot(lhs.column(i), rhs.column(j));
    }
  }
  return g;
}

void require_same_shape(const GradientMatrix& a, const GradientMatrix& b,
                        const char* what) {
  if (a.dim() != b.dim() || a.agents() != b.agents()) {
    throw InvalidInput(std::string(what) + ": gradient matrix shapes differ");
  }
}

double euclidean_norm(std::span<const double> v) {
  return std::sqrt(kernels::squared_norm(v));
}

JointModel::JointModel(std::vector<double> parameters, std::vector<ParamSlice> layout)
    : params_(std::move(parameters)), layout_(std::move(layout)) {
  std::size_t cursor = 0;
  for (const auto& s : layout_) {
    if (s.offset != cursor) {
      throw InvalidInput("joint model layout must be contiguous (slice '" + s.name + "')");
    }
    cursor += s.size;
  }
  if (cursor != params_.size()) {
    throw InvalidInput("joint model layout does not cover the parameter vector");
  }
}

JointModel JointModel::flat(std::vector<double> parameters) {
  const std::size_t n = parameters.size();
  return JointModel(std::move(parameters), {ParamSlice{"all", 0, n}});
}

const ParamSlice& JointModel::slice(const std::string& name) const {
  for (const auto& s : layout_) {
    if (s.name == name) return s;
  }
  throw InvalidInput("joint model has no slice named '" + name + "'");
}

}  // namespace agentcoord
