#include "agentcoord/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "agentcoord/error.hpp"
#include "agentcoord/kernels.hpp"

namespace agentcoord {

std::vector<ParamSlice> PredictorShape::layout() const {
  std::vector<ParamSlice> out{{"backbone", 0, backbone_size()}};
  for (std::size_t i = 0; i < heads; ++i) {
    out.push_back({"head:" + std::to_string(i), head_offset(i), head_size()});
  }
  return out;
}

void WindowSet::push_back(std::span<const double> x, double target, std::size_t tag) {
  if (x.size() != window) throw InvalidInput("window length mismatch");
  inputs.insert(inputs.end(), x.begin(), x.end());
  targets.push_back(target);
  tags.push_back(tag);
}

double SignalLaw::stationary_mean() const {
  if (kind == Kind::kUniformLevels) return (static_cast<double>(levels) - 1.0) / 2.0;
  return mean;
}

double SignalLaw::stationary_std() const {
  if (kind == Kind::kUniformLevels) {
    const double L = static_cast<double>(levels);
    return std::sqrt((L * L - 1.0) / 12.0);
  }
  return sigma / std::sqrt(1.0 - phi * phi);
}

void SignalLaw::draw_window(KeyedRng& rng, std::size_t window, std::span<double> out) const {
  if (out.size() != window + 1) throw InvalidInput("draw_window: output must hold window + 1");
  if (kind == Kind::kUniformLevels) {
    if (levels == 0) throw ConfigError("uniform level law needs at least one level");
    for (double& v : out) v = normalize(static_cast<double>(rng.index(levels)));
    return;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  double x = std::max(mean + stationary_std() * normal(rng), 0.0);
  out[0] = normalize(x);
  for (std::size_t k = 1; k <= window; ++k) {
    x = std::max(mean + phi * (x - mean) + sigma * normal(rng), 0.0);
    out[k] = normalize(x);
  }
}

namespace {

void check_shape(const PredictorShape& shape, std::span<const double> params, std::size_t head) {
  if (params.size() != shape.parameter_count()) {
    throw InvalidInput("predictor parameter count does not match its shape");
  }
  if (head >= shape.heads) throw InvalidInput("predictor head index out of range");
}

}  // namespace

double predict(const PredictorShape& shape, std::span<const double> params, std::size_t head,
               std::span<const double> window) {
  check_shape(shape, params, head);
  if (window.size() != shape.window) throw InvalidInput("window length mismatch");
  const std::size_t F = shape.features, w = shape.window;
  const double* bias = params.data() + F * w;
  const double* h = params.data() + shape.head_offset(head);
  double p = h[F];
  for (std::size_t f = 0; f < F; ++f) {
    const double z = kernels::dot(params.subspan(f * w, w), window) + bias[f];
    p += h[f] * z;
  }
  return p;
}

void accumulate_prediction_gradient(const PredictorShape& shape, std::span<const double> params,
                                    std::size_t head, std::span<const double> window,
                                    double scale, std::span<double> grad) {
  check_shape(shape, params, head);
  if (window.size() != shape.window) throw InvalidInput("window length mismatch");
  if (grad.size() != params.size()) throw InvalidInput("gradient buffer size mismatch");
  const std::size_t F = shape.features, w = shape.window;
  const std::size_t ho = shape.head_offset(head);
  const double* h = params.data() + ho;
  for (std::size_t f = 0; f < F; ++f) {
    const double z = kernels::dot(params.subspan(f * w, w), window) + params[F * w + f];
    kernels::axpy(scale * h[f], window, grad.subspan(f * w, w));
    grad[F * w + f] += scale * h[f];
    grad[ho + f] += scale * z;
  }
  grad[ho + F] += scale;
}

std::vector<double> agent_loss_gradient(const PredictorShape& shape,
                                        std::span<const double> params, std::size_t head,
                                        const WindowSet& windows, LossKind kind) {
  check_shape(shape, params, head);
  if (windows.empty()) throw InvalidInput("agent_loss_gradient: empty batch");
  if (windows.window != shape.window) throw InvalidInput("window length mismatch");
  std::vector<double> grad(params.size(), 0.0);
  const double inv = 1.0 / static_cast<double>(windows.size());
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto x = windows.row(k);
    const double p = predict(shape, params, head, x);
    const double dl = loss_and_gradient(kind, p, windows.targets[k]).gradient;
    if (dl != 0.0) accumulate_prediction_gradient(shape, params, head, x, dl * inv, grad);
  }
  return grad;
}

double agent_mean_loss(const PredictorShape& shape, std::span<const double> params,
                       std::size_t head, const WindowSet& windows, LossKind kind) {
  if (windows.empty()) throw InvalidInput("agent_mean_loss: empty batch");
  if (windows.window != shape.window) throw InvalidInput("window length mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    sum += loss_and_gradient(kind, predict(shape, params, head, windows.row(k)),
                             windows.targets[k]).loss;
  }
  return sum / static_cast<double>(windows.size());
}

WindowSet draw_windows(const std::vector<SignalLaw>& laws, std::size_t window,
                       std::size_t samples, std::uint64_t seed, std::uint64_t stream_key) {
  if (laws.empty()) throw ConfigError("drawing windows needs a distribution descriptor");
  KeyedRng rng(seed, StreamTag::kPopulation, {stream_key});
  WindowSet out;
  out.window = window;
  out.inputs.reserve(samples * window);
  std::vector<double> buf(window + 1);
  for (std::size_t k = 0; k < samples; ++k) {
    const std::size_t tag = laws.size() == 1 ? 0 : rng.index(laws.size());
    laws[tag].draw_window(rng, window, buf);
    out.push_back(std::span<const double>(buf.data(), window), buf.back(), tag);
  }
  return out;
}

PopulationEstimate predictor_population_gradient(const PredictorShape& shape,
                                                 std::span<const double> params,
                                                 std::size_t head,
                                                 const std::vector<SignalLaw>& laws,
                                                 LossKind kind, std::size_t samples,
                                                 std::uint64_t seed, std::uint64_t stream_key) {
  check_shape(shape, params, head);
  if (laws.empty()) throw ConfigError("population gradient needs a distribution descriptor");
  if (samples < 2) throw ConfigError("population gradient needs a sampling budget");
  const std::size_t P = params.size();
  KeyedRng rng(seed, StreamTag::kPopulation, {head, stream_key});
  std::vector<double> buf(shape.window + 1), g(P), sum(P, 0.0), sum_sq(P, 0.0);
  for (std::size_t k = 0; k < samples; ++k) {
    const SignalLaw& law = laws[laws.size() == 1 ? 0 : rng.index(laws.size())];
    law.draw_window(rng, shape.window, buf);
    const std::span<const double> x{buf.data(), shape.window};
    const double dl = loss_and_gradient(kind, predict(shape, params, head, x), buf.back()).gradient;
    std::fill(g.begin(), g.end(), 0.0);
    if (dl != 0.0) accumulate_prediction_gradient(shape, params, head, x, dl, g);
    for (std::size_t r = 0; r < P; ++r) {
      sum[r] += g[r];
      sum_sq[r] += g[r] * g[r];
    }
  }
  const double n = static_cast<double>(samples);
  PopulationEstimate est;
  est.samples = samples;
  est.gradient.resize(P);
  est.std_error.resize(P);
  for (std::size_t r = 0; r < P; ++r) {
    const double mean = sum[r] / n;
    est.gradient[r] = mean;
    est.std_error[r] = std::sqrt(std::max(sum_sq[r] / n - mean * mean, 0.0) / (n - 1.0));
  }
  return est;
}

}  // namespace agentcoord
