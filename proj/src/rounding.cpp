#include "plver/rounding.hpp"

#include <algorithm>
#include <numeric>

namespace plver {

std::vector<std::int64_t> largest_remainder_split(std::int64_t total,
                                                  std::span<const double> weights) {
  const std::size_t n = weights.size();
  std::vector<std::int64_t> parts(n, 0);
  if (n == 0 || total <= 0) return parts;

  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;
  if (weight_sum <= 0.0) {
    parts[0] = total;  // degenerate: everything to the first slot
    return parts;
  }

  std::vector<double> remainders(n, 0.0);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double share = static_cast<double>(total) * (weights[i] / weight_sum);
    const double base = std::floor(share);
    parts[i] = static_cast<std::int64_t>(base);
    remainders[i] = share - base;
    assigned += parts[i];
  }

  std::int64_t leftover = total - assigned;
  if (leftover > 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return remainders[a] > remainders[b];  // ties keep index order
    });
    for (std::size_t k = 0; leftover > 0; k = (k + 1) % n, --leftover) {
      parts[order[k]] += 1;
    }
  } else if (leftover < 0) {
    // Floating-point slack: floors can overshoot only when weights are huge
    // relative to their sum; trim from the smallest remainders.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return remainders[a] < remainders[b];
    });
    for (std::size_t k = 0; leftover < 0; k = (k + 1) % n) {
      if (parts[order[k]] > 0) {
        parts[order[k]] -= 1;
        ++leftover;
      }
    }
  }
  return parts;
}

}  // namespace plver
