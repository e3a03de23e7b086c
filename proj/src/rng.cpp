#include "msri/rng.hpp"

#include <cmath>
#include <numbers>

namespace msri {

namespace {
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace

double SplitMix64::next_gaussian() {
  // Box-Muller; u clamped away from 0 so log() stays finite.
  double u = next_double();
  double v = next_double();
  if (u < 0x1.0p-60) u = 0x1.0p-60;
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 0xA0761D6478BD642FULL));
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    SplitMix64& rng) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  if (k > n) k = n;
  std::vector<std::size_t> picked;
  picked.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
    picked.push_back(pool[i]);
  }
  return picked;
}

}  // namespace msri
