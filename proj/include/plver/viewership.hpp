#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "plver/model.hpp"
#include "plver/trace.hpp"

namespace plver {

/// Weight per ladder tier; distribute_viewers renormalizes over the tiers at
/// or below a channel's broadcast bitrate.
using TierMix = std::map<Kbps, double>;

TierMix uniform_tier_mix();

/// Splits a channel's viewer count across groups proportionally to
/// population_weight, then within each group across tiers per the mix, both
/// with largest-remainder rounding (ties to the lower index; tiers indexed in
/// ascending bitrate order). Totals are preserved exactly.
std::map<DemandKey, std::int64_t> distribute_viewers(
    const ChannelId& channel, Kbps broadcast_bitrate, std::int64_t viewers,
    const std::vector<UserGroup>& groups, const TierMix& tier_mix);

/// Snapshot for one trace window over the given groups.
ViewershipSnapshot build_snapshot(const TraceWindow& window,
                                  const std::vector<UserGroup>& groups,
                                  const TierMix& tier_mix);

/// Scales every channel's total by (1 +- magnitude), the sign drawn per
/// channel from (seed, channel) only, then re-distributes over the channel's
/// original (group, tier) cells. The input snapshot is left untouched.
ViewershipSnapshot apply_fluctuation(const ViewershipSnapshot& snapshot,
                                     double magnitude, std::uint64_t seed);

}  // namespace plver
