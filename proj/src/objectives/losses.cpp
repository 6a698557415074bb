#include "agentcoord/losses.hpp"

#include <cmath>

#include "agentcoord/error.hpp"

namespace agentcoord {

std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::kL1: return "L1";
    case LossKind::kMse: return "MSE";
    case LossKind::kLogCosh: return "LogCosh";
  }
  return "?";
}

LossKind parse_loss_kind(const std::string& s) {
  if (s == "L1") return LossKind::kL1;
  if (s == "MSE") return LossKind::kMse;
  if (s == "LogCosh") return LossKind::kLogCosh;
  throw ConfigError("unknown loss kind '" + s + "' (expected L1|MSE|LogCosh)");
}

LossValue loss_and_gradient(LossKind kind, double prediction, double target) {
  if (!std::isfinite(prediction) || !std::isfinite(target)) {
    throw InvalidInput("loss_and_gradient: non-finite prediction or target");
  }
  const double e = prediction - target;
  switch (kind) {
    case LossKind::kL1:
      return {std::abs(e), e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0)};
    case LossKind::kMse:
      return {e * e, 2.0 * e};
    case LossKind::kLogCosh: {
      if (e == 0.0) return {0.0, 0.0};
      // log cosh(e) = |e| + log1p(exp(-2|e|)) - log 2, stable for large |e|.
      const double a = std::abs(e);
      const double loss = a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
      return {std::max(loss, 0.0), std::tanh(e)};
    }
  }
  throw InvalidInput("loss_and_gradient: unknown loss kind");
}

}  // namespace agentcoord
