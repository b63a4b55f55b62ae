#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "moneychain/dynamics.hpp"
#include "moneychain/numeric.hpp"

namespace moneychain {

/// C(n, k); zero when k < 0 or k > n. n < 0 is rejected.
BigInt binomial(std::int64_t n, std::int64_t k);

/// Direct summation  sum_{c=0}^{M} (c+1) C(M-c+K, K).  Equals C(M+K+2, K+2).
BigInt s_identity(std::int64_t M, std::int64_t K);

/// Total stationary weight over all N-vertex configurations with M coins,
/// in closed form C(M+2N-1, 2N-1).
BigInt lambda_mass(std::int64_t N, std::int64_t M);

struct StationaryWeight {
  BigInt value;
};

/// prod_z (cfg[z] + 1).
StationaryWeight stationary_weight(const MoneyConfig& cfg);
BigInt stationary_weight(std::span<const Coins> coins);

/// Law of one vertex's coin count at equilibrium, c = 0..M.
struct ExactMarginal {
  std::int64_t vertices = 0;
  Coins total_coins = 0;
  std::vector<double> probs;
  /// Reduced rationals; empty when the instance is above the retention limit.
  std::vector<Rational> exact;

  bool has_exact() const noexcept { return !exact.empty(); }
  std::size_t size() const noexcept { return probs.size(); }
  double temperature() const { return static_cast<double>(total_coins) / static_cast<double>(vertices); }
};

struct MarginalOptions {
  /// Rationals are kept in the result when M + 1 <= this.
  Coins exact_retain_limit = 4096;
  /// Above M + 2N > this, floats come from an extended-precision ratio
  /// recurrence instead of big-integer binomials (relative error < 1e-12).
  std::int64_t bigint_limit = 1'000'000;
};

/// Reshuffle:        C(M-c+N-2, N-2) / C(M+N-1, N-1)
/// Exchange, Saving: (c+1) C(M-c+2N-3, 2N-3) / C(M+2N-1, 2N-1)
/// Throws std::invalid_argument for N < 2 or M < 0.
ExactMarginal exact_marginal(ModelKind model, std::int64_t N, Coins M,
                             const MarginalOptions& options = {});

/// Large-N,T limit densities at integer c:  e^{-c/T}/T  (Reshuffle) and
/// 4c/T^2 e^{-2c/T}  (Exchange, Saving).
double asymptotic_density(ModelKind model, Coins c, double T);

}  // namespace moneychain
