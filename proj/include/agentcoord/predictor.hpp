#pragma once

// Shared-backbone time-series predictor. A linear backbone maps a window of
// w normalized values to F features; agent i reads its prediction off its own
// linear head:
//
//   p_i(x) = h_i^T (W x + b) + c_i
//
// Parameters are laid out as [W (F x w, row-major) | b (F)] followed by one
// [h_i (F) | c_i] block per agent, matching the JointModel slices "backbone"
// and "head:<i>".

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "agentcoord/gradient_matrix.hpp"
#include "agentcoord/losses.hpp"
#include "agentcoord/rng.hpp"
#include "agentcoord/task.hpp"

namespace agentcoord {

struct PredictorShape {
  std::size_t window = 8;
  std::size_t features = 4;
  std::size_t heads = 3;

  std::size_t backbone_size() const noexcept { return features * window + features; }
  std::size_t head_size() const noexcept { return features + 1; }
  std::size_t head_offset(std::size_t head) const noexcept {
    return backbone_size() + head * head_size();
  }
  std::size_t parameter_count() const noexcept { return backbone_size() + heads * head_size(); }
  std::vector<ParamSlice> layout() const;
};

/// Windows of normalized values with next-value targets. `tags` identifies
/// the source signal of each window (e.g. the band), indexing SignalLaw lists.
struct WindowSet {
  std::size_t window = 0;
  std::vector<double> inputs;  // size() x window, row-major
  std::vector<double> targets;
  std::vector<std::size_t> tags;

  std::size_t size() const noexcept { return targets.size(); }
  bool empty() const noexcept { return targets.empty(); }
  std::span<const double> row(std::size_t i) const { return {inputs.data() + i * window, window}; }
  void push_back(std::span<const double> x, double target, std::size_t tag);
};

/// A batch handed to one agent's loss: the windows plus which agent and which
/// sample slot produced it.
struct SampleBatch {
  WindowSet windows;
  std::size_t agent = 0;
  int slot = 0;
};

/// Generating law of one signal, plus the affine normalization applied before
/// windowing: normalized = (raw - offset) / scale.
struct SignalLaw {
  enum class Kind { kAr1, kUniformLevels };
  Kind kind = Kind::kAr1;
  std::string name;
  double mean = 0.0;
  double phi = 0.0;
  double sigma = 0.0;
  std::size_t levels = 0;  // kUniformLevels: values are 0..levels-1
  double offset = 0.0;
  double scale = 1.0;

  double stationary_mean() const;
  double stationary_std() const;
  double normalize(double raw) const { return (raw - offset) / scale; }
  double denormalize(double z) const { return z * scale + offset; }
  /// Draws one window of `window` inputs plus its next-value target from the
  /// stationary law (values clipped at zero like the generated traces).
  void draw_window(KeyedRng& rng, std::size_t window, std::span<double> out) const;
};

struct DatasetSplit {
  WindowSet train;
  WindowSet holdout;
  std::vector<SignalLaw> laws;  // indexed by window tag
};

double predict(const PredictorShape& shape, std::span<const double> params, std::size_t head,
               std::span<const double> window);

/// Adds scale * d p_head / d params to `grad`.
void accumulate_prediction_gradient(const PredictorShape& shape, std::span<const double> params,
                                    std::size_t head, std::span<const double> window,
                                    double scale, std::span<double> grad);

/// Mean per-sample loss gradient of head `head` over `windows`, with respect
/// to the whole parameter vector. Other heads' slices are exactly zero.
/// Throws InvalidInput on an empty batch or a window-length mismatch.
std::vector<double> agent_loss_gradient(const PredictorShape& shape,
                                        std::span<const double> params, std::size_t head,
                                        const WindowSet& windows, LossKind kind);

double agent_mean_loss(const PredictorShape& shape, std::span<const double> params,
                       std::size_t head, const WindowSet& windows, LossKind kind);

/// `samples` fresh windows, each drawn from a law chosen uniformly among
/// `laws` (tagged with the law's index), on the stream keyed by
/// (seed, stream_key). Throws ConfigError when there is no law.
WindowSet draw_windows(const std::vector<SignalLaw>& laws, std::size_t window,
                       std::size_t samples, std::uint64_t seed, std::uint64_t stream_key);

/// Monte-Carlo population gradient: mean loss gradient over `samples` fresh
/// windows, each drawn from a law chosen uniformly among `laws`, with the
/// stream keyed by (seed, head, stream_key). Throws ConfigError when there
/// is no law or no sampling budget.
PopulationEstimate predictor_population_gradient(const PredictorShape& shape,
                                                 std::span<const double> params,
                                                 std::size_t head,
                                                 const std::vector<SignalLaw>& laws,
                                                 LossKind kind, std::size_t samples,
                                                 std::uint64_t seed, std::uint64_t stream_key);

}  // namespace agentcoord
