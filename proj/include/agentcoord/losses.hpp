#pragma once

#include <string>

namespace agentcoord {

enum class LossKind { kL1, kMse, kLogCosh };

std::string to_string(LossKind k);
/// Accepts "L1", "MSE" and "LogCosh". Throws ConfigError otherwise.
LossKind parse_loss_kind(const std::string& s);

struct LossValue {
  double loss = 0.0;
  double gradient = 0.0;  // d loss / d prediction
};

/// Per-sample loss of `prediction` against `target` and its derivative with
/// respect to the prediction. The L1 subgradient at zero error is 0.
/// Throws InvalidInput on non-finite arguments.
LossValue loss_and_gradient(LossKind kind, double prediction, double target);

}  // namespace agentcoord
