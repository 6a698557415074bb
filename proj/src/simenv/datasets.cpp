#include "agentcoord/datasets.hpp"

#include <cmath>
#include <numeric>

#include "agentcoord/error.hpp"
#include "agentcoord/rng.hpp"

namespace agentcoord {

WindowSet make_windows(const std::vector<double>& values, const SignalLaw& law,
                       std::size_t window, std::size_t tag) {
  if (window == 0) throw ConfigError("window length must be positive");
  if (values.size() <= window) {
    throw ConfigError("trace of length " + std::to_string(values.size()) +
                      " is too short for window " + std::to_string(window));
  }
  WindowSet out;
  out.window = window;
  std::vector<double> norm(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) norm[i] = law.normalize(values[i]);
  for (std::size_t s = 0; s + window < norm.size(); ++s) {
    out.push_back({norm.data() + s, window}, norm[s + window], tag);
  }
  return out;
}

DatasetSplit split_windows(const std::vector<const Trace*>& traces,
                           const std::vector<SignalLaw>& laws, std::size_t window,
                           double train_fraction, std::uint64_t seed, std::uint64_t stream) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
  if (traces.size() != laws.size() || traces.empty()) {
    throw ConfigError("need one signal law per trace");
  }
  WindowSet all;
  all.window = window;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const WindowSet w = make_windows(traces[k]->values, laws[k], window, k);
    for (std::size_t i = 0; i < w.size(); ++i) all.push_back(w.row(i), w.targets[i], k);
  }

  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  KeyedRng rng(seed, StreamTag::kSplit, {stream});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

  const auto n_train =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(all.size())));
  DatasetSplit split;
  split.train.window = split.holdout.window = window;
  split.laws = laws;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t k = order[i];
    (i < n_train ? split.train : split.holdout).push_back(all.row(k), all.targets[k], all.tags[k]);
  }
  if (split.train.empty()) throw ConfigError("training split is empty");
  return split;
}

AgentDatasets build_datasets(const TraceConfig& cfg, const TraceBundle& traces,
                             std::size_t window, double train_fraction, std::uint64_t seed) {
  cfg.validate();
  if (traces.bands.size() != cfg.bands.size()) {
    throw ConfigError("band trace count does not match the configuration");
  }
  AgentDatasets out;
  out.application = split_windows({&traces.requests}, {cfg.request_law()}, window,
                                  train_fraction, seed, 0);
  std::vector<const Trace*> bands;
  std::vector<SignalLaw> band_laws;
  for (std::size_t b = 0; b < traces.bands.size(); ++b) {
    bands.push_back(&traces.bands[b]);
    band_laws.push_back(cfg.band_law(b));
  }
  out.physical = split_windows(bands, band_laws, window, train_fraction, seed, 1);
  out.network = split_windows({&traces.bandwidth}, {cfg.bandwidth_law()}, window,
                              train_fraction, seed, 2);
  return out;
}

}  // namespace agentcoord
