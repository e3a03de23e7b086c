// Deterministic 64-bit PRNG (SplitMix64, Steele et al. 2014) with derived
// per-index streams. All sampling in the library goes through this so that
// outputs are bit-reproducible across platforms and independent of iteration
// order: anything generated for "instance i" draws from derive(seed, i).
#pragma once

#include <cstdint>
#include <vector>

namespace msri {

class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n), unbiased (rejection sampling). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

  // Standard normal via Box-Muller (no cached spare: two draws per call).
  double next_gaussian();

private:
  std::uint64_t state_;
};

// Derives an independent stream seed for (seed, index). Two different indices
// give statistically independent SplitMix64 streams.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

// In-place Fisher-Yates shuffle driven by the given generator.
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

// k distinct indices drawn uniformly from [0, n), in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    SplitMix64& rng);

}  // namespace msri
