#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace kgaudit {

// All randomness flows from one base seed through named sub-streams so that
// adding a pipeline stage never perturbs the draws of earlier stages.
//
// mt19937_64 output is pinned by the standard; the bounded/shuffle helpers
// below replace std::uniform_int_distribution / std::shuffle, whose results
// are implementation-defined and would break byte-identical reruns across
// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n) via rejection sampling. n must be >= 1.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform in [0, 1).
  double unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices drawn from [0, population), in draw order.
  std::vector<std::uint32_t> sample_indices(std::uint32_t population,
                                            std::uint32_t k);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// Derives a deterministic child seed for the named stream.
std::uint64_t substream_seed(std::uint64_t base_seed, std::string_view stream,
                             std::uint64_t index = 0);

inline Rng substream(std::uint64_t base_seed, std::string_view stream,
                     std::uint64_t index = 0) {
  return Rng(substream_seed(base_seed, stream, index));
}

}  // namespace kgaudit
