#include "plver/viewership.hpp"

#include <algorithm>

#include "plver/errors.hpp"
#include "plver/rng.hpp"
#include "plver/rounding.hpp"

namespace plver {

TierMix uniform_tier_mix() {
  TierMix mix;
  for (Kbps tier : kBitrateLadder) mix[tier] = 1.0;
  return mix;
}

std::map<DemandKey, std::int64_t> distribute_viewers(
    const ChannelId& channel, Kbps broadcast_bitrate, std::int64_t viewers,
    const std::vector<UserGroup>& groups, const TierMix& tier_mix) {
  if (groups.empty()) throw ConfigError("distribute_viewers: empty group list");
  if (viewers < 0) throw ConfigError("distribute_viewers: negative viewer count");

  std::map<DemandKey, std::int64_t> cells;
  if (viewers == 0) return cells;

  std::vector<double> group_weights;
  group_weights.reserve(groups.size());
  for (const UserGroup& g : groups) group_weights.push_back(g.population_weight);
  const std::vector<std::int64_t> per_group =
      largest_remainder_split(viewers, group_weights);

  // Tiers at or below the broadcast bitrate, ascending.
  std::vector<Kbps> tiers;
  std::vector<double> tier_weights;
  for (Kbps tier : kBitrateLadder) {
    if (tier > broadcast_bitrate) continue;
    auto it = tier_mix.find(tier);
    const double w = it == tier_mix.end() ? 0.0 : it->second;
    if (w > 0.0) {
      tiers.push_back(tier);
      tier_weights.push_back(w);
    }
  }
  if (tiers.empty()) {
    // Mix excludes every eligible tier; fall back to the broadcast tier.
    tiers.push_back(snap_to_ladder(broadcast_bitrate));
    tier_weights.push_back(1.0);
  }

  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    if (per_group[gi] == 0) continue;
    const std::vector<std::int64_t> per_tier =
        largest_remainder_split(per_group[gi], tier_weights);
    for (std::size_t ti = 0; ti < tiers.size(); ++ti) {
      if (per_tier[ti] == 0) continue;
      cells[DemandKey{groups[gi].id, StreamKey{channel, tiers[ti]}}] = per_tier[ti];
    }
  }
  return cells;
}

ViewershipSnapshot build_snapshot(const TraceWindow& window,
                                  const std::vector<UserGroup>& groups,
                                  const TierMix& tier_mix) {
  ViewershipSnapshot snap;
  snap.window = window.window;
  for (const auto& [channel, record] : window.channels) {
    if (record.viewers == 0) continue;
    auto cells =
        distribute_viewers(channel, record.bitrate, record.viewers, groups, tier_mix);
    for (const auto& [key, count] : cells) snap.counts[key] += count;
  }
  return snap;
}

ViewershipSnapshot apply_fluctuation(const ViewershipSnapshot& snapshot,
                                     double magnitude, std::uint64_t seed) {
  if (magnitude < 0.0 || magnitude > 1.0) {
    throw ConfigError("apply_fluctuation: magnitude must be within [0, 1]");
  }
  if (magnitude == 0.0) return snapshot;

  // Channel -> its cells in key order.
  std::map<ChannelId, std::vector<std::pair<DemandKey, std::int64_t>>> by_channel;
  for (const auto& [key, count] : snapshot.counts) {
    by_channel[key.stream.channel].push_back({key, count});
  }

  ViewershipSnapshot out;
  out.window = snapshot.window;
  for (const auto& [channel, cells] : by_channel) {
    std::int64_t total = 0;
    for (const auto& [key, count] : cells) total += count;
    if (total == 0) continue;

    // Sign depends on (seed, channel) only so a sweep over magnitudes perturbs
    // each channel monotonically.
    const bool up = (Rng::derive(seed, Rng::hash_label(channel)) & 1u) != 0;
    const double factor = up ? 1.0 + magnitude : 1.0 - magnitude;
    const std::int64_t new_total =
        round_half_up(static_cast<double>(total) * factor);
    if (new_total <= 0) continue;

    std::vector<double> weights;
    weights.reserve(cells.size());
    for (const auto& [key, count] : cells) {
      weights.push_back(static_cast<double>(count));
    }
    const std::vector<std::int64_t> parts =
        largest_remainder_split(new_total, weights);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (parts[i] > 0) out.counts[cells[i].first] = parts[i];
    }
  }
  return out;
}

}  // namespace plver
