#pragma once

#include <cstdint>
#include <vector>

#include "agentcoord/predictor.hpp"
#include "agentcoord/traces.hpp"

namespace agentcoord {

/// Sliding windows of length `window` over `values`, normalized by `law`,
/// each with the following value as target. In trace order.
WindowSet make_windows(const std::vector<double>& values, const SignalLaw& law,
                       std::size_t window, std::size_t tag);

/// Windows of every trace (trace k normalized by laws[k] and tagged k),
/// shuffled with a seeded stream, then split: the first floor(fraction * N)
/// go to train and the rest to holdout.
/// Throws ConfigError if a trace is not longer than the window or the
/// fraction is outside (0, 1).
DatasetSplit split_windows(const std::vector<const Trace*>& traces,
                           const std::vector<SignalLaw>& laws, std::size_t window,
                           double train_fraction, std::uint64_t seed, std::uint64_t stream);

struct AgentDatasets {
  DatasetSplit application;  // user request levels
  DatasetSplit physical;     // per-band achievable rates, band-tagged
  DatasetSplit network;      // end-to-end bandwidth
};

AgentDatasets build_datasets(const TraceConfig& cfg, const TraceBundle& traces,
                             std::size_t window, double train_fraction, std::uint64_t seed);

}  // namespace agentcoord
