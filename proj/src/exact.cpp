#include "moneychain/exact.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace moneychain {

BigInt binomial(std::int64_t n, std::int64_t k) {
  if (n < 0) throw std::invalid_argument("binomial: n must be nonnegative");
  if (k < 0 || k > n) return 0;
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

BigInt s_identity(std::int64_t M, std::int64_t K) {
  if (M < 0 || K < 0) throw std::invalid_argument("s_identity: M and K must be nonnegative");
  BigInt sum = 0;
  for (std::int64_t c = 0; c <= M; ++c) sum += to_big(c + 1) * binomial(M - c + K, K);
  return sum;
}

BigInt lambda_mass(std::int64_t N, std::int64_t M) {
  if (N < 1) throw std::invalid_argument("lambda_mass: N must be positive");
  if (M < 0) throw std::invalid_argument("lambda_mass: M must be nonnegative");
  return binomial(M + 2 * N - 1, 2 * N - 1);
}

BigInt stationary_weight(std::span<const Coins> coins) {
  BigInt w = 1;
  for (Coins c : coins) w *= to_big(c + 1);
  return w;
}

StationaryWeight stationary_weight(const MoneyConfig& cfg) { return {stationary_weight(cfg.coins())}; }

namespace {

#if defined(__SIZEOF_FLOAT128__)
__extension__ using Wide = __float128;
#else
using Wide = long double;
#endif

// Both laws are  w(c) * C(M - c + r, r) / D  with r = N-2 (w = 1) for
// Reshuffle and r = 2N-3 (w = c+1) for the gamma-2 law. The binomial factor
// walks down via C(k-1, r) = C(k, r) (k-r) / k, which divides exactly.
bool weighted_by_c(ModelKind model) { return model != ModelKind::Reshuffle; }

std::int64_t tail_rank(ModelKind model, std::int64_t N) {
  return model == ModelKind::Reshuffle ? N - 2 : 2 * N - 3;
}

void fill_bigint(ModelKind model, std::int64_t N, Coins M, const MarginalOptions& opt,
                 ExactMarginal& out) {
  const std::int64_t r = tail_rank(model, N);
  const BigInt den = weighted_by_c(model) ? binomial(M + 2 * N - 1, 2 * N - 1)
                                          : binomial(M + N - 1, N - 1);
  const bool keep = M + 1 <= opt.exact_retain_limit;
  if (keep) out.exact.reserve(static_cast<std::size_t>(M) + 1);
  BigInt tail = binomial(M + r, r);
  BigInt num;
  for (Coins c = 0; c <= M; ++c) {
    num = weighted_by_c(model) ? tail * to_big(c + 1) : tail;
    out.probs[static_cast<std::size_t>(c)] = ratio_to_double(num, den);
    if (keep) {
      Rational q(num, den);
      q.canonicalize();
      out.exact.push_back(std::move(q));
    }
    if (c < M) {
      const std::int64_t k = M - c + r;
      tail *= to_big(M - c);
      mpz_divexact_ui(tail.get_mpz_t(), tail.get_mpz_t(), static_cast<unsigned long>(k));
    }
  }
}

// P(0) in closed form, then P(c+1) = P(c) * ratio(c) with the ratio formed
// from exact integers. Two roundings per step in 113-bit arithmetic.
void fill_recurrence(ModelKind model, std::int64_t N, Coins M, ExactMarginal& out) {
  const std::int64_t r = tail_rank(model, N);
  Wide p;
  if (weighted_by_c(model)) {
    p = static_cast<Wide>((2 * N - 1) * (2 * N - 2)) /
        (static_cast<Wide>(M + 2 * N - 1) * static_cast<Wide>(M + 2 * N - 2));
  } else {
    p = static_cast<Wide>(N - 1) / static_cast<Wide>(M + N - 1);
  }
  for (Coins c = 0; c <= M; ++c) {
    out.probs[static_cast<std::size_t>(c)] = static_cast<double>(p);
    if (c == M) break;
    Wide num = static_cast<Wide>(M - c);
    Wide den = static_cast<Wide>(M - c + r);
    if (weighted_by_c(model)) {
      num *= static_cast<Wide>(c + 2);
      den *= static_cast<Wide>(c + 1);
    }
    p *= num / den;
  }
}

}  // namespace

ExactMarginal exact_marginal(ModelKind model, std::int64_t N, Coins M, const MarginalOptions& options) {
  if (N < 2) throw std::invalid_argument("exact_marginal: N must be >= 2, got " + std::to_string(N));
  if (M < 0) throw std::invalid_argument("exact_marginal: M must be nonnegative");
  ExactMarginal out;
  out.vertices = N;
  out.total_coins = M;
  out.probs.assign(static_cast<std::size_t>(M) + 1, 0.0);
  if (M + 2 * N <= options.bigint_limit) {
    fill_bigint(model, N, M, options, out);
  } else {
    fill_recurrence(model, N, M, out);
  }
  return out;
}

double asymptotic_density(ModelKind model, Coins c, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("asymptotic_density: T must be positive");
  const double x = static_cast<double>(c);
  if (model == ModelKind::Reshuffle) return std::exp(-x / T) / T;
  return 4.0 * x / (T * T) * std::exp(-2.0 * x / T);
}

}  // namespace moneychain
