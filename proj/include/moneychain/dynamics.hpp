#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "moneychain/graph.hpp"
#include "moneychain/numeric.hpp"
#include "moneychain/rng.hpp"

namespace moneychain {

enum class ModelKind { Reshuffle, Exchange, Saving };

inline constexpr ModelKind kAllModels[] = {ModelKind::Reshuffle, ModelKind::Exchange,
                                           ModelKind::Saving};

std::string_view to_string(ModelKind m);
std::optional<ModelKind> parse_model(std::string_view name);

/// Coin count per vertex. The total is fixed at construction and every
/// update through apply_step preserves it.
class MoneyConfig {
 public:
  MoneyConfig() = default;
  explicit MoneyConfig(std::vector<Coins> coins);

  std::size_t size() const noexcept { return coins_.size(); }
  Coins total() const noexcept { return total_; }
  Coins operator[](std::size_t i) const { return coins_[i]; }
  std::span<const Coins> coins() const noexcept { return coins_; }

  /// Mutable view for in-place stepping. Callers must keep the sum fixed.
  std::span<Coins> mutable_coins() noexcept { return coins_; }

  friend bool operator==(const MoneyConfig&, const MoneyConfig&) = default;

 private:
  std::vector<Coins> coins_;
  Coins total_ = 0;
};

/// Law of the first endpoint's post-interaction amount a' for a pair holding
/// (a, b); the second endpoint gets pool - a'.
struct EdgeKernel {
  Coins pool = 0;
  std::vector<Rational> probs;  // indexed by a' = 0..pool

  const Rational& prob(Coins a_after) const { return probs.at(static_cast<std::size_t>(a_after)); }
};

EdgeKernel edge_kernel(ModelKind model, Coins a, Coins b);

/// Mass of edge_kernel(model, a, b) at a' = a.
Rational self_transition_probability(ModelKind model, Coins a, Coins b);

/// One interaction on (x, y) in place. Draw order is part of the
/// reproducibility contract:
///   Reshuffle: U ~ {0..a+b}
///   Exchange:  U1 ~ {0..a}, then U2 ~ {0..b}
///   Saving:    c_x ~ {0..a}, c_y ~ {0..b}, then U ~ {0..a+b-c_x-c_y}
/// No range checks; see apply_step for the checked form. `Rng` is anything
/// with uniform_int_inclusive(k), which lets tests script the draws.
template <class Rng>
inline void step_pair(ModelKind model, Coins& a, Coins& b, Rng& rng) {
  const Coins pool = a + b;
  switch (model) {
    case ModelKind::Reshuffle: {
      a = static_cast<Coins>(rng.uniform_int_inclusive(static_cast<std::uint64_t>(pool)));
      break;
    }
    case ModelKind::Exchange: {
      // Conserving form: x gives U1 and receives U2; y the reverse.
      const auto u1 = static_cast<Coins>(rng.uniform_int_inclusive(static_cast<std::uint64_t>(a)));
      const auto u2 = static_cast<Coins>(rng.uniform_int_inclusive(static_cast<std::uint64_t>(b)));
      a = a - u1 + u2;
      break;
    }
    case ModelKind::Saving: {
      const auto cx = static_cast<Coins>(rng.uniform_int_inclusive(static_cast<std::uint64_t>(a)));
      const auto cy = static_cast<Coins>(rng.uniform_int_inclusive(static_cast<std::uint64_t>(b)));
      const auto u = static_cast<Coins>(
          rng.uniform_int_inclusive(static_cast<std::uint64_t>(pool - cx - cy)));
      a = cx + u;
      break;
    }
  }
  b = pool - a;
}

/// Returns cfg after one interaction on the ordered pair edge = (x, y).
/// Throws std::invalid_argument if x == y or either index is out of range.
template <class Rng>
MoneyConfig apply_step(ModelKind model, const MoneyConfig& cfg, std::pair<Vertex, Vertex> edge,
                       Rng& rng) {
  const auto [x, y] = edge;
  if (x == y) throw std::invalid_argument("apply_step: endpoints must differ");
  if (x >= cfg.size() || y >= cfg.size()) throw std::invalid_argument("apply_step: vertex out of range");
  MoneyConfig next = cfg;
  auto coins = next.mutable_coins();
  step_pair(model, coins[x], coins[y], rng);
  return next;
}

}  // namespace moneychain
