#include "moneychain/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace moneychain {

double ratio_to_double(const BigInt& num, const BigInt& den) {
  if (sgn(den) <= 0) throw std::invalid_argument("ratio_to_double: denominator must be positive");
  if (sgn(num) == 0) return 0.0;
  const bool negative = sgn(num) < 0;
  BigInt n = abs(num);
  BigInt d = den;
  // Scale so the integer quotient carries ~64 significant bits.
  const long shift = 64 - (static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2)) -
                           static_cast<long>(mpz_sizeinbase(d.get_mpz_t(), 2)));
  if (shift >= 0) {
    n <<= static_cast<mp_bitcnt_t>(shift);
  } else {
    d <<= static_cast<mp_bitcnt_t>(-shift);
  }
  BigInt q;
  BigInt r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  // Sticky bit so the round-to-nearest below sees an inexact quotient.
  if (sgn(r) != 0) q = (q << 1) + 1; else q <<= 1;
  long exponent = -shift - 1;
  const auto bits = static_cast<long>(mpz_sizeinbase(q.get_mpz_t(), 2));
  if (bits > 53) {
    const auto drop = static_cast<mp_bitcnt_t>(bits - 53);
    BigInt keep = q >> drop;
    BigInt rem = q - (keep << drop);
    BigInt half = BigInt(1) << (drop - 1);
    if (rem > half || (rem == half && mpz_odd_p(keep.get_mpz_t()))) keep += 1;
    q = keep;
    exponent += static_cast<long>(drop);
  }
  const double v = std::ldexp(q.get_d(), static_cast<int>(exponent));
  return negative ? -v : v;
}

}  // namespace moneychain
