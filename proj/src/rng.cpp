#include "kgaudit/rng.hpp"

#include <algorithm>
#include <unordered_set>

namespace kgaudit {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
  splitmix64(state);
  return splitmix64(state);
}

std::uint64_t substream_seed(std::uint64_t base_seed, std::string_view stream,
                             std::uint64_t index) {
  return mix_seed(mix_seed(base_seed, fnv1a(stream)), index);
}

std::vector<std::uint32_t> Rng::sample_indices(std::uint32_t population,
                                               std::uint32_t k) {
  if (k >= population) {
    std::vector<std::uint32_t> all(population);
    for (std::uint32_t i = 0; i < population; ++i) all[i] = i;
    shuffle(all);
    return all;
  }
  if (static_cast<std::uint64_t>(k) * 3 >= population) {
    // Dense case: partial Fisher-Yates over the full index range.
    std::vector<std::uint32_t> all(population);
    for (std::uint32_t i = 0; i < population; ++i) all[i] = i;
    for (std::uint32_t i = 0; i < k; ++i) {
      const std::uint64_t j = i + bounded(population - i);
      std::swap(all[i], all[j]);
    }
    all.resize(k);
    return all;
  }
  // Sparse case: rejection with a seen-set.
  std::vector<std::uint32_t> out;
  out.reserve(k);
  std::unordered_set<std::uint32_t> seen;
  seen.reserve(k * 2);
  while (out.size() < k) {
    const auto v = static_cast<std::uint32_t>(bounded(population));
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

}  // namespace kgaudit
