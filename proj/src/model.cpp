#include "plver/model.hpp"

#include <algorithm>

namespace plver {

bool is_ladder_bitrate(Kbps bitrate) {
  return std::find(kBitrateLadder.begin(), kBitrateLadder.end(), bitrate) !=
         kBitrateLadder.end();
}

Kbps snap_to_ladder(Kbps bitrate) {
  Kbps snapped = kBitrateLadder.front();
  for (Kbps tier : kBitrateLadder) {
    if (tier <= bitrate) snapped = tier;
  }
  return snapped;
}

Kbps EdgeCluster::capacity() const {
  Kbps total = 0;
  for (const EdgeServer& server : servers) total += server.bandwidth;
  return total;
}

std::int64_t ViewershipSnapshot::total_viewers() const {
  std::int64_t total = 0;
  for (const auto& [key, count] : counts) total += count;
  return total;
}

std::int64_t ViewershipSnapshot::channel_total(const ChannelId& channel) const {
  std::int64_t total = 0;
  for (const auto& [key, count] : counts) {
    if (key.stream.channel == channel) total += count;
  }
  return total;
}

Kb ViewershipSnapshot::total_traffic_kb() const {
  Kb total = 0;
  for (const auto& [key, count] : counts) {
    total += count * segment_set_size(key.stream.bitrate, window);
  }
  return total;
}

}  // namespace plver
