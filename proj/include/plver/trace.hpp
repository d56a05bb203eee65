#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "plver/model.hpp"

namespace plver {

struct TraceRecord {
  ChannelId channel;
  Seconds t = 0;
  Kbps bitrate = 0;
  std::int64_t viewers = 0;
};

struct TraceWindow {
  TimeWindow window;
  // Latest sample per channel within the window.
  std::map<ChannelId, TraceRecord> channels;
};

struct Trace {
  Seconds window_length = 300;
  std::vector<TraceWindow> windows;  // ascending by window start
  std::int64_t record_count = 0;
};

struct TraceWarning {
  int line = 0;
  std::string message;
};

/// Reads a line-delimited JSON trace (fields: channel_id, t, bitrate_kbps,
/// viewers) and groups records into windows of `window_length` seconds.
/// Malformed lines raise DataError naming the line; bitrates off the ladder
/// are snapped with a warning; per-channel timestamps must be non-decreasing.
Trace load_trace(const std::string& path, Seconds window_length,
                 std::vector<TraceWarning>* warnings = nullptr);

Trace parse_trace(const std::string& text, Seconds window_length,
                  std::vector<TraceWarning>* warnings = nullptr);

void save_trace(const std::string& path, const Trace& trace);

struct SynthTraceParams {
  int channels = 24;
  double zipf_exponent = 1.0;
  std::int64_t viewers = 600;  // nominal concurrent viewers per window
  int windows = 6;
  Seconds window_length = 300;
  std::uint64_t seed = 0;
  std::string session_model = "always";  // "always" | "churn"
  double churn_online_prob = 0.8;

  bool operator==(const SynthTraceParams&) const = default;
};

/// Zipf-popular synthetic workload; per-window totals wobble within +-20% of
/// the nominal viewer count. Deterministic under the seed.
Trace synthesize_trace(const SynthTraceParams& params);

/// Mean over windows of the total demanded traffic rate (viewers x bitrate).
Kbps mean_window_demand(const Trace& trace);

}  // namespace plver
