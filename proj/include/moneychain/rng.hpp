#pragma once

#include <cstdint>
#include <random>

namespace moneychain {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of sub-stream `stream` derived from `master`:
///   splitmix64(master ^ splitmix64(stream + 0x9E3779B97F4A7C15)).
/// Replicas, sweep points and the graph sampler each get their own index.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

/// Deterministic uniform stream. The underlying engine is mt19937_64, whose
/// output sequence is fixed by the standard, and bounded draws are made
/// without std distributions so trajectories are portable across stdlibs.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Uniform on {0, ..., k}, unbiased (multiply-shift with rejection).
  std::uint64_t uniform_int_inclusive(std::uint64_t k);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace moneychain
