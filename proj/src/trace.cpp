#include "plver/trace.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "plver/errors.hpp"
#include "plver/rng.hpp"
#include "plver/rounding.hpp"

namespace plver {

namespace {

using nlohmann::json;

[[noreturn]] void line_error(int line, const std::string& message) {
  throw DataError("trace: line " + std::to_string(line) + ": " + message);
}

}  // namespace

Trace parse_trace(const std::string& text, Seconds window_length,
                  std::vector<TraceWarning>* warnings) {
  if (window_length <= 0) throw ConfigError("trace: window length must be positive");

  Trace trace;
  trace.window_length = window_length;
  std::map<Seconds, TraceWindow> windows;
  std::map<ChannelId, Seconds> last_t;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      line_error(line_no, std::string("parse error: ") + e.what());
    }

    TraceRecord r;
    try {
      r.channel = rec.at("channel_id").get<std::string>();
      r.t = rec.at("t").get<Seconds>();
      r.bitrate = rec.at("bitrate_kbps").get<Kbps>();
      r.viewers = rec.at("viewers").get<std::int64_t>();
    } catch (const json::exception& e) {
      line_error(line_no, std::string("bad record: ") + e.what());
    }

    if (r.channel.empty()) line_error(line_no, "empty channel_id");
    if (r.t < 0) line_error(line_no, "negative timestamp");
    if (r.viewers < 0) line_error(line_no, "negative viewers");
    if (r.bitrate <= 0) line_error(line_no, "non-positive bitrate");
    if (!is_ladder_bitrate(r.bitrate)) {
      const Kbps snapped = snap_to_ladder(r.bitrate);
      if (warnings) {
        warnings->push_back({line_no, "bitrate " + std::to_string(r.bitrate) +
                                          " off the ladder, snapped to " +
                                          std::to_string(snapped)});
      }
      r.bitrate = snapped;
    }

    auto [it, inserted] = last_t.try_emplace(r.channel, r.t);
    if (!inserted) {
      if (r.t < it->second) {
        line_error(line_no, "timestamps for channel " + r.channel +
                                " must be non-decreasing");
      }
      it->second = r.t;
    }

    const Seconds start = (r.t / window_length) * window_length;
    TraceWindow& tw = windows[start];
    tw.window = TimeWindow{start, window_length};
    tw.channels[r.channel] = r;  // latest sample wins
    ++trace.record_count;
  }

  trace.windows.reserve(windows.size());
  for (auto& [start, tw] : windows) trace.windows.push_back(std::move(tw));
  return trace;
}

Trace load_trace(const std::string& path, Seconds window_length,
                 std::vector<TraceWarning>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("trace: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str(), window_length, warnings);
}

void save_trace(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("trace: cannot open " + path + " for writing");
  for (const TraceWindow& tw : trace.windows) {
    for (const auto& [channel, r] : tw.channels) {
      json rec{{"channel_id", r.channel},
               {"t", r.t},
               {"bitrate_kbps", r.bitrate},
               {"viewers", r.viewers}};
      out << rec.dump() << "\n";
    }
  }
}

Trace synthesize_trace(const SynthTraceParams& params) {
  if (params.channels < 1) throw ConfigError("trace synth: need at least one channel");
  if (params.windows < 1) throw ConfigError("trace synth: need at least one window");
  if (params.viewers < 0) throw ConfigError("trace synth: negative viewer count");
  if (params.zipf_exponent < 0.0) throw ConfigError("trace synth: negative zipf exponent");
  const bool churn = params.session_model == "churn";
  if (!churn && params.session_model != "always") {
    throw ConfigError("trace synth: unknown session model " + params.session_model);
  }

  Rng rng(params.seed);
  std::vector<Kbps> bitrates(params.channels);
  std::vector<double> popularity(params.channels);
  for (int c = 0; c < params.channels; ++c) {
    bitrates[c] = kBitrateLadder[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(kBitrateLadder.size()) - 1))];
    popularity[c] = 1.0 / std::pow(static_cast<double>(c + 1), params.zipf_exponent);
  }

  Trace trace;
  trace.window_length = params.window_length;
  for (int w = 0; w < params.windows; ++w) {
    TraceWindow tw;
    tw.window = TimeWindow{params.window_length * w, params.window_length};

    std::vector<double> weights = popularity;
    if (churn) {
      for (int c = 0; c < params.channels; ++c) {
        if (rng.uniform01() >= params.churn_online_prob) weights[c] = 0.0;
      }
    }
    const double wobble = 0.8 + 0.4 * rng.uniform01();
    const std::int64_t total = round_half_up(static_cast<double>(params.viewers) * wobble);
    const std::vector<std::int64_t> split = largest_remainder_split(total, weights);

    for (int c = 0; c < params.channels; ++c) {
      if (split[c] <= 0) continue;
      char name[16];
      std::snprintf(name, sizeof(name), "ch%03d", c + 1);
      TraceRecord r{name, tw.window.start, bitrates[c], split[c]};
      tw.channels[r.channel] = r;
      ++trace.record_count;
    }
    trace.windows.push_back(std::move(tw));
  }
  return trace;
}

Kbps mean_window_demand(const Trace& trace) {
  if (trace.windows.empty()) return 0;
  Kbps total = 0;
  for (const TraceWindow& tw : trace.windows) {
    for (const auto& [channel, r] : tw.channels) total += r.viewers * r.bitrate;
  }
  return total / static_cast<Kbps>(trace.windows.size());
}

}  // namespace plver
