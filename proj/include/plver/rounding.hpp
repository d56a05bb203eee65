#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace plver {

inline std::int64_t round_half_up(double x) {
  return static_cast<std::int64_t>(std::floor(x + 0.5));
}

/// Splits `total` into integer parts proportional to `weights` using the
/// largest-remainder method; ties go to the lower index. The parts always sum
/// to `total` exactly. Weights must be non-negative; they need not sum to 1.
std::vector<std::int64_t> largest_remainder_split(std::int64_t total,
                                                  std::span<const double> weights);

}  // namespace plver
