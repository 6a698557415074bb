#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "agentcoord/predictor.hpp"

namespace agentcoord {

/// AR(1) parameters of one synthetic signal:
///   x_{k+1} = mean + phi (x_k - mean) + sigma * N(0, 1), clipped at 0.
struct Ar1Params {
  double mean = 0.0;
  double phi = 0.0;
  double sigma = 0.0;
};

struct TraceConfig {
  std::uint64_t seed = 7;
  double duration_s = 600.0;
  double request_interval_s = 5.0;
  double sample_period_s = 1.0;  // rate and bandwidth signals
  std::vector<std::string> levels{"360p", "480p", "640p", "720p", "1080p"};
  std::vector<std::string> bands{"n1", "n2", "n3", "n5", "n7"};
  std::vector<Ar1Params> band_signals{
      {60.0, 0.9, 4.0}, {50.0, 0.9, 4.0}, {40.0, 0.9, 4.0}, {30.0, 0.9, 4.0}, {20.0, 0.9, 4.0}};
  Ar1Params bandwidth{50.0, 0.9, 4.0};

  /// Throws ConfigError on |phi| >= 1, negative noise, empty level or band
  /// lists, a band/parameter count mismatch, or a duration shorter than the
  /// request interval.
  void validate() const;

  SignalLaw request_law() const;
  SignalLaw band_law(std::size_t band) const;
  SignalLaw bandwidth_law() const;
};

struct Trace {
  std::string signal;
  double period_s = 1.0;
  std::string unit;
  std::vector<double> values;
};

/// One uniformly random level index per request interval.
Trace generate_user_requests(const TraceConfig& cfg);
/// One AR(1) achievable-rate series per band, each on its own stream.
std::vector<Trace> generate_band_rate_traces(const TraceConfig& cfg);
Trace generate_bandwidth_trace(const TraceConfig& cfg);

/// AR(1) series of `length` values starting at the mean.
std::vector<double> generate_ar1(const Ar1Params& p, std::size_t length, std::uint64_t seed,
                                 std::uint64_t stream);

struct TraceBundle {
  Trace requests;
  std::vector<Trace> bands;
  Trace bandwidth;
};

TraceBundle generate_all_traces(const TraceConfig& cfg);

/// CSV layout: the header line `signal,period_s,unit`, one line with those
/// three fields, then one value per line.
void write_trace_csv(std::ostream& os, const Trace& trace);
/// Throws ConfigError with a line number on malformed input.
Trace read_trace_csv(std::istream& is);

}  // namespace agentcoord
