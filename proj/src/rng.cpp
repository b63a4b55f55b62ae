#include "moneychain/rng.hpp"

namespace moneychain {

__extension__ using u128 = unsigned __int128;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x9E3779B97F4A7C15ULL));
}

RngStream::RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

std::uint64_t RngStream::uniform_int_inclusive(std::uint64_t k) {
  if (k == 0) {
    // Still consume a value so draw counts do not depend on the bound.
    engine_();
    return 0;
  }
  const std::uint64_t range = k + 1;
  if (range == 0) return engine_();  // k == 2^64 - 1
  u128 m = static_cast<u128>(engine_()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<u128>(engine_()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace moneychain
