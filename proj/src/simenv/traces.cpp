#include "agentcoord/traces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "agentcoord/error.hpp"
#include "agentcoord/rng.hpp"

namespace agentcoord {
namespace {

constexpr std::uint64_t kRequestStream = 0;
constexpr std::uint64_t kBandStreamBase = 1;
constexpr std::uint64_t kBandwidthStream = 1000;

void validate_ar1(const Ar1Params& p, const std::string& name) {
  if (!(std::abs(p.phi) < 1.0)) throw ConfigError(name + ": AR(1) coefficient must satisfy |phi| < 1");
  if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) {
    throw ConfigError(name + ": noise standard deviation must be non-negative");
  }
  if (!std::isfinite(p.mean)) throw ConfigError(name + ": mean must be finite");
}

SignalLaw ar1_law(const std::string& name, const Ar1Params& p) {
  SignalLaw law;
  law.kind = SignalLaw::Kind::kAr1;
  law.name = name;
  law.mean = p.mean;
  law.phi = p.phi;
  law.sigma = p.sigma;
  law.offset = law.stationary_mean();
  const double s = law.stationary_std();
  law.scale = s > 0.0 ? s : 1.0;
  return law;
}

std::size_t sample_count(double duration, double period) {
  return static_cast<std::size_t>(std::floor(duration / period + 1e-9));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void TraceConfig::validate() const {
  if (levels.empty()) throw ConfigError("trace config: resolution level list is empty");
  if (bands.empty()) throw ConfigError("trace config: band list is empty");
  if (band_signals.size() != bands.size()) {
    throw ConfigError("trace config: need one AR(1) parameter set per band");
  }
  if (!(request_interval_s > 0.0) || !(sample_period_s > 0.0)) {
    throw ConfigError("trace config: intervals must be positive");
  }
  if (!(duration_s >= request_interval_s) || !(duration_s >= sample_period_s)) {
    throw ConfigError("trace config: duration must cover at least one interval");
  }
  for (std::size_t i = 0; i < bands.size(); ++i) validate_ar1(band_signals[i], bands[i]);
  validate_ar1(bandwidth, "bandwidth");
}

SignalLaw TraceConfig::request_law() const {
  SignalLaw law;
  law.kind = SignalLaw::Kind::kUniformLevels;
  law.name = "requests";
  law.levels = levels.size();
  law.offset = law.stationary_mean();
  const double s = law.stationary_std();
  law.scale = s > 0.0 ? s : 1.0;
  return law;
}

SignalLaw TraceConfig::band_law(std::size_t band) const {
  return ar1_law(bands.at(band), band_signals.at(band));
}

SignalLaw TraceConfig::bandwidth_law() const { return ar1_law("bandwidth", bandwidth); }

std::vector<double> generate_ar1(const Ar1Params& p, std::size_t length, std::uint64_t seed,
                                 std::uint64_t stream) {
  KeyedRng rng(seed, StreamTag::kTrace, {stream});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(length);
  double x = std::max(p.mean, 0.0);
  for (std::size_t k = 0; k < length; ++k) {
    out[k] = x;
    x = std::max(p.mean + p.phi * (x - p.mean) + p.sigma * normal(rng), 0.0);
  }
  return out;
}

Trace generate_user_requests(const TraceConfig& cfg) {
  cfg.validate();
  KeyedRng rng(cfg.seed, StreamTag::kTrace, {kRequestStream});
  Trace t{"requests", cfg.request_interval_s, "level", {}};
  t.values.resize(sample_count(cfg.duration_s, cfg.request_interval_s));
  for (double& v : t.values) v = static_cast<double>(rng.index(cfg.levels.size()));
  return t;
}

std::vector<Trace> generate_band_rate_traces(const TraceConfig& cfg) {
  cfg.validate();
  const std::size_t n = sample_count(cfg.duration_s, cfg.sample_period_s);
  std::vector<Trace> out;
  for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
    out.push_back({cfg.bands[b], cfg.sample_period_s, "Mbps",
                   generate_ar1(cfg.band_signals[b], n, cfg.seed, kBandStreamBase + b)});
  }
  return out;
}

Trace generate_bandwidth_trace(const TraceConfig& cfg) {
  cfg.validate();
  const std::size_t n = sample_count(cfg.duration_s, cfg.sample_period_s);
  return {"bandwidth", cfg.sample_period_s, "Mbps",
          generate_ar1(cfg.bandwidth, n, cfg.seed, kBandwidthStream)};
}

TraceBundle generate_all_traces(const TraceConfig& cfg) {
  return {generate_user_requests(cfg), generate_band_rate_traces(cfg),
          generate_bandwidth_trace(cfg)};
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "signal,period_s,unit\n";
  os << trace.signal << ',' << format_double(trace.period_s) << ',' << trace.unit << '\n';
  for (double v : trace.values) os << format_double(v) << '\n';
}

Trace read_trace_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError("trace CSV line " + std::to_string(lineno) + ": " + what);
  };
  auto parse = [&](const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail("not a number: '" + s + "'");
    return v;
  };
  if (!std::getline(is, line)) fail("missing header");
  ++lineno;
  if (line != "signal,period_s,unit") fail("expected header 'signal,period_s,unit'");
  if (!std::getline(is, line)) fail("missing signal description");
  ++lineno;
  const auto c1 = line.find(',');
  const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
  if (c2 == std::string::npos) fail("expected 'signal,period_s,unit' fields");
  Trace t;
  t.signal = line.substr(0, c1);
  t.period_s = parse(line.substr(c1 + 1, c2 - c1 - 1));
  t.unit = line.substr(c2 + 1);
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    t.values.push_back(parse(line));
  }
  return t;
}

}  // namespace agentcoord
