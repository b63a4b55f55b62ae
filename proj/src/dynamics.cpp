#include "moneychain/dynamics.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace moneychain {

std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Reshuffle: return "reshuffle";
    case ModelKind::Exchange: return "exchange";
    case ModelKind::Saving: return "saving";
  }
  return "?";
}

std::optional<ModelKind> parse_model(std::string_view name) {
  for (auto m : kAllModels) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

MoneyConfig::MoneyConfig(std::vector<Coins> coins) : coins_(std::move(coins)) {
  for (Coins c : coins_) {
    if (c < 0) throw std::invalid_argument("coin counts must be nonnegative");
  }
  total_ = std::accumulate(coins_.begin(), coins_.end(), Coins{0});
}

namespace {

EdgeKernel reshuffle_kernel(Coins a, Coins b) {
  const Coins s = a + b;
  EdgeKernel k{s, std::vector<Rational>(static_cast<std::size_t>(s) + 1, Rational(1, static_cast<unsigned long>(s + 1)))};
  return k;
}

// a' = a - U1 + U2: count pairs (u1, u2) hitting each a'.
EdgeKernel exchange_kernel(Coins a, Coins b) {
  const Coins s = a + b;
  EdgeKernel k{s, std::vector<Rational>(static_cast<std::size_t>(s) + 1, Rational(0))};
  const Rational cell(1, static_cast<unsigned long>((a + 1) * (b + 1)));
  for (Coins u1 = 0; u1 <= a; ++u1)
    for (Coins u2 = 0; u2 <= b; ++u2) k.probs[static_cast<std::size_t>(a - u1 + u2)] += cell;
  return k;
}

// a' = c_x + U with U ~ {0..s - c_x - c_y}; each (c_x, c_y) contributes
// 1/((a+1)(b+1)(s-c_x-c_y+1)) to every a' in [c_x, s - c_y].
EdgeKernel saving_kernel(Coins a, Coins b) {
  const Coins s = a + b;
  EdgeKernel k{s, std::vector<Rational>(static_cast<std::size_t>(s) + 1, Rational(0))};
  for (Coins cx = 0; cx <= a; ++cx) {
    for (Coins cy = 0; cy <= b; ++cy) {
      const Coins rest = s - cx - cy;
      const Rational w(1, static_cast<unsigned long>((a + 1) * (b + 1) * (rest + 1)));
      for (Coins ap = cx; ap <= s - cy; ++ap) k.probs[static_cast<std::size_t>(ap)] += w;
    }
  }
  return k;
}

}  // namespace

EdgeKernel edge_kernel(ModelKind model, Coins a, Coins b) {
  if (a < 0 || b < 0) throw std::invalid_argument("edge_kernel: negative coin count");
  switch (model) {
    case ModelKind::Reshuffle: return reshuffle_kernel(a, b);
    case ModelKind::Exchange: return exchange_kernel(a, b);
    case ModelKind::Saving: return saving_kernel(a, b);
  }
  throw std::invalid_argument("edge_kernel: unknown model");
}

Rational self_transition_probability(ModelKind model, Coins a, Coins b) {
  if (a < 0 || b < 0) throw std::invalid_argument("self_transition_probability: negative coin count");
  switch (model) {
    case ModelKind::Reshuffle:
      return Rational(1, static_cast<unsigned long>(a + b + 1));
    case ModelKind::Exchange: {
      Rational r(static_cast<long>(std::min(a, b) + 1), static_cast<unsigned long>((a + 1) * (b + 1)));
      r.canonicalize();
      return r;
    }
    case ModelKind::Saving:
      return saving_kernel(a, b).probs[static_cast<std::size_t>(a)];
  }
  throw std::invalid_argument("self_transition_probability: unknown model");
}

}  // namespace moneychain
