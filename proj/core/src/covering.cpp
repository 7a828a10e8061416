#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mledr/divergences.hpp"
#include "mledr/error.hpp"

namespace mledr {
namespace {

constexpr std::size_t kExactLimit = 16;
constexpr std::size_t kMaxRadii = 512;

std::size_t exact_cover(std::span<const double> d, std::size_t count, double epsilon) {
  std::vector<std::uint32_t> ball(count, 0);
  for (std::size_t y = 0; y < count; ++y)
    for (std::size_t x = 0; x < count; ++x)
      if (d[y * count + x] <= epsilon) ball[y] |= 1u << x;
  const std::uint32_t full = count == 32 ? ~0u : (1u << count) - 1u;
  const std::size_t masks = std::size_t{1} << count;
  std::vector<std::uint32_t> covered(masks, 0);
  std::size_t best = count;
  for (std::size_t mask = 1; mask < masks; ++mask) {
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    covered[mask] = covered[mask & (mask - 1)] | ball[low];
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size < best && covered[mask] == full) best = size;
  }
  return best;
}

std::size_t greedy_cover(std::span<const double> d, std::size_t count, double epsilon) {
  std::vector<char> covered(count, 0);
  std::size_t remaining = count, balls = 0;
  while (remaining > 0) {
    std::size_t bestCenter = 0, bestGain = 0;
    for (std::size_t y = 0; y < count; ++y) {
      std::size_t gain = 0;
      for (std::size_t x = 0; x < count; ++x)
        if (!covered[x] && d[y * count + x] <= epsilon) ++gain;
      if (gain > bestGain) {
        bestGain = gain;
        bestCenter = y;
      }
    }
    for (std::size_t x = 0; x < count; ++x)
      if (!covered[x] && d[bestCenter * count + x] <= epsilon) {
        covered[x] = 1;
        --remaining;
      }
    ++balls;
  }
  return balls;
}

}  // namespace

double kolmogorov_entropy(std::span<const double> d, std::size_t count, double epsilon) {
  if (count == 0) throw DomainError("kolmogorov_entropy: empty point set");
  if (d.size() != count * count) throw DomainError("kolmogorov_entropy: distance matrix must be count x count");
  if (!(epsilon > 0.0)) throw DomainError("kolmogorov_entropy: epsilon must be positive");
  if (count == 1) return 0.0;
  if (count <= kExactLimit) return std::log(static_cast<double>(exact_cover(d, count, epsilon)));

  // Greedy counts are not monotone in the radius, but a cover at a smaller
  // radius is also one at epsilon: take the best greedy cover over a fixed set
  // of candidate radii (the distinct distances, thinned to kMaxRadii order
  // statistics) not exceeding epsilon.
  std::vector<double> all(d.begin(), d.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> radii;
  if (all.size() <= kMaxRadii) {
    radii = all;
  } else {
    for (std::size_t k = 0; k < kMaxRadii; ++k) radii.push_back(all[k * (all.size() - 1) / (kMaxRadii - 1)]);
  }
  std::size_t best = count;
  for (auto it = radii.rbegin(); it != radii.rend() && best > 1; ++it)
    if (*it <= epsilon) best = std::min(best, greedy_cover(d, count, *it));
  return std::log(static_cast<double>(best));
}

double kolmogorov_entropy(std::size_t count, const std::function<double(std::size_t, std::size_t)>& distance,
                          double epsilon) {
  std::vector<double> d(count * count);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < count; ++j) d[i * count + j] = i == j ? 0.0 : distance(i, j);
  return kolmogorov_entropy(d, count, epsilon);
}

}  // namespace mledr
