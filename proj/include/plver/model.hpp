#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace plver {

using GroupId = std::string;
using ClusterId = std::string;
using ServerId = std::string;
using ChannelId = std::string;

// Units used throughout: bandwidth and bitrates in Kbps, data volumes in Kb,
// time in whole seconds. Kbps * Seconds = Kb.
using Kbps = std::int64_t;
using Kb = std::int64_t;
using Seconds = std::int64_t;

// Quality tiers 240p / 360p / 480p / 720p.
inline constexpr std::array<Kbps, 4> kBitrateLadder{400, 750, 1000, 2500};

bool is_ladder_bitrate(Kbps bitrate);

/// Nearest ladder tier not exceeding `bitrate`; values below the lowest tier
/// snap up to it.
Kbps snap_to_ladder(Kbps bitrate);

struct TimeWindow {
  Seconds start = 0;
  Seconds length = 0;

  Seconds end() const { return start + length; }
  auto operator<=>(const TimeWindow&) const = default;
};

/// One encoded rendition of a channel: the unit of caching and of per-viewer
/// bandwidth accounting.
struct StreamKey {
  ChannelId channel;
  Kbps bitrate = 0;

  auto operator<=>(const StreamKey&) const = default;
};

struct UserGroup {
  GroupId id;
  std::string isp;
  std::string city;
  std::string county;
  std::string state;
  double population_weight = 0.0;  // share of global viewers routed here
  Kbps demand = 0;                 // aggregate live traffic demand d_i
};

struct EdgeServer {
  ServerId id;
  Kbps bandwidth = 0;  // B_j, not sharable across viewers
  Kb cache = 0;        // c_j, sharable
};

struct EdgeCluster {
  ClusterId id;
  std::string isp;
  std::string city;
  std::string county;
  std::string state;
  std::vector<EdgeServer> servers;

  // C_j. Recomputed from members, never stored.
  Kbps capacity() const;
};

/// Bidirectional partial preference lists, most preferred first. A pair absent
/// from either side is mutually unmatchable.
struct PreferenceTables {
  std::map<GroupId, std::vector<ClusterId>> uP;
  std::map<ClusterId, std::vector<GroupId>> cP;
};

struct Channel {
  ChannelId id;
  Kbps broadcast_bitrate = 0;
  std::vector<std::pair<Seconds, Seconds>> sessions;  // disjoint, ordered
};

struct DemandKey {
  GroupId group;
  StreamKey stream;

  auto operator<=>(const DemandKey&) const = default;
};

/// Per-window viewership: viewer counts per (group, stream). A "viewer" is a
/// unit of demand, not an individual.
struct ViewershipSnapshot {
  TimeWindow window;
  std::map<DemandKey, std::int64_t> counts;

  std::int64_t total_viewers() const;
  std::int64_t channel_total(const ChannelId& channel) const;
  Kb total_traffic_kb() const;
};

/// The video data a stream produces over one window.
struct SegmentSet {
  StreamKey stream;
  TimeWindow window;
  Kb size = 0;
};

inline Kb segment_set_size(Kbps bitrate, const TimeWindow& window) {
  return bitrate * window.length;
}

inline SegmentSet make_segment_set(const StreamKey& stream, const TimeWindow& window) {
  return SegmentSet{stream, window, segment_set_size(stream.bitrate, window)};
}

}  // namespace plver
