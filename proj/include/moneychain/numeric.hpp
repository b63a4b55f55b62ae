#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace moneychain {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Coin counts. Signed so that intermediate differences stay representable.
using Coins = std::int64_t;

inline BigInt to_big(std::int64_t v) { return BigInt(static_cast<long>(v)); }

/// num/den rounded to double from the exact integers; den must be positive.
double ratio_to_double(const BigInt& num, const BigInt& den);

inline double to_double(const Rational& q) {
  return ratio_to_double(q.get_num(), q.get_den());
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace moneychain
