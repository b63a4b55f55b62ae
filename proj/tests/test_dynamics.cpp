#include <doctest.h>

#include <map>

#include "moneychain/dynamics.hpp"
#include "stats.hpp"

using namespace moneychain;

namespace {

/// Replays fixed draws; checks each against the bound the sampler asked for.
struct ScriptedDraws {
  std::vector<std::uint64_t> draws;
  std::size_t next = 0;
  std::uint64_t uniform_int_inclusive(std::uint64_t k) {
    REQUIRE(next < draws.size());
    const auto v = draws[next++];
    REQUIRE(v <= k);
    return v;
  }
};

/// Walks the draw tree of step_pair: returns the scripted prefix, then 0s,
/// remembering the bound of the first unscripted draw so the caller can
/// branch on it.
struct BranchingDraws {
  const std::vector<std::uint64_t>& prefix;
  std::size_t next = 0;
  std::optional<std::uint64_t> open_bound;
  std::uint64_t uniform_int_inclusive(std::uint64_t k) {
    if (next < prefix.size()) return prefix[next++];
    if (!open_bound) open_bound = k;
    ++next;
    return 0;
  }
};

// Exact law of a' by enumerating every draw sequence of the sampler itself,
// each weighted by the product of its 1/(k+1) factors. Independent of the
// nested-summation kernel.
void enumerate_draws(ModelKind model, Coins a, Coins b, std::vector<std::uint64_t>& prefix,
                     const Rational& weight, std::vector<Rational>& law) {
  BranchingDraws rng{prefix};
  Coins x = a, y = b;
  step_pair(model, x, y, rng);
  if (!rng.open_bound) {
    law[static_cast<std::size_t>(x)] += weight;
    return;
  }
  const std::uint64_t k = *rng.open_bound;
  const Rational w = weight / Rational(static_cast<unsigned long>(k + 1));
  for (std::uint64_t v = 0; v <= k; ++v) {
    prefix.push_back(v);
    enumerate_draws(model, a, b, prefix, w, law);
    prefix.pop_back();
  }
}

std::vector<Rational> draw_tree_law(ModelKind model, Coins a, Coins b) {
  std::vector<Rational> law(static_cast<std::size_t>(a + b) + 1, Rational(0));
  std::vector<std::uint64_t> prefix;
  enumerate_draws(model, a, b, prefix, Rational(1), law);
  return law;
}

Rational q(long n, unsigned long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

}  // namespace

TEST_CASE("model names round-trip") {
  for (auto m : kAllModels) CHECK(parse_model(to_string(m)) == m);
  CHECK_FALSE(parse_model("gamma").has_value());
}

TEST_CASE("MoneyConfig") {
  const MoneyConfig c({3, 0, 2});
  CHECK(c.total() == 5);
  CHECK(c.size() == 3);
  CHECK_THROWS_AS(MoneyConfig({1, -1}), std::invalid_argument);
}

TEST_CASE("edge_kernel examples") {
  const auto r = edge_kernel(ModelKind::Reshuffle, 1, 1);
  CHECK(r.pool == 2);
  CHECK(r.probs == std::vector<Rational>{q(1, 3), q(1, 3), q(1, 3)});

  // U1, U2 ~ {0,1}: a' = 1 - U1 + U2
  CHECK(edge_kernel(ModelKind::Exchange, 1, 1).probs == std::vector<Rational>{q(1, 4), q(1, 2), q(1, 4)});

  // c_x = 0 (1/2): U ~ {0,1}; c_x = 1 (1/2): a' = 1. So P(0) = 1/4, P(1) = 3/4.
  CHECK(edge_kernel(ModelKind::Saving, 1, 0).probs == std::vector<Rational>{q(1, 4), q(3, 4)});
}

TEST_CASE("degenerate pool is a point mass") {
  for (auto m : kAllModels) CHECK(edge_kernel(m, 0, 0).probs == std::vector<Rational>{Rational(1)});
}

TEST_CASE("edge_kernel equals the sampler's own draw-tree law") {
  for (auto m : kAllModels) {
    for (Coins a = 0; a <= 5; ++a) {
      for (Coins b = 0; a + b <= 7; ++b) {
        CAPTURE(to_string(m));
        CAPTURE(a);
        CAPTURE(b);
        CHECK(edge_kernel(m, a, b).probs == draw_tree_law(m, a, b));
      }
    }
  }
}

TEST_CASE("kernel structure") {
  for (auto m : kAllModels) {
    for (Coins a = 0; a <= 8; ++a) {
      for (Coins b = 0; a + b <= 8; ++b) {
        const auto k = edge_kernel(m, a, b);
        const auto swapped = edge_kernel(m, b, a);
        Rational total = 0;
        for (Coins ap = 0; ap <= a + b; ++ap) {
          CHECK(sgn(k.prob(ap)) >= 0);
          total += k.prob(ap);
          // relabeling x <-> y
          CHECK(k.prob(ap) == swapped.prob(a + b - ap));
        }
        CHECK(total == 1);
        if (m == ModelKind::Reshuffle) {
          for (Coins ap = 0; ap <= a + b; ++ap) CHECK(k.prob(ap) == q(1, static_cast<unsigned long>(a + b + 1)));
        }
      }
    }
  }
}

TEST_CASE("pair-level detailed balance with weight (a+1)(b+1)") {
  for (auto m : {ModelKind::Exchange, ModelKind::Saving}) {
    for (Coins s = 0; s <= 8; ++s) {
      for (Coins a = 0; a <= s; ++a) {
        for (Coins ap = 0; ap <= s; ++ap) {
          const Coins b = s - a, bp = s - ap;
          const Rational fwd = Rational((a + 1) * (b + 1)) * edge_kernel(m, a, b).prob(ap);
          const Rational back = Rational((ap + 1) * (bp + 1)) * edge_kernel(m, ap, bp).prob(a);
          CHECK(fwd == back);
        }
      }
    }
  }
}

TEST_CASE("self_transition_probability") {
  CHECK(self_transition_probability(ModelKind::Reshuffle, 3, 1) == q(1, 5));
  CHECK(self_transition_probability(ModelKind::Exchange, 2, 1) == q(1, 3));
  CHECK(self_transition_probability(ModelKind::Saving, 1, 0) == q(3, 4));
  for (auto m : kAllModels)
    for (Coins a = 0; a <= 5; ++a)
      for (Coins b = 0; b <= 5; ++b) CHECK(self_transition_probability(m, a, b) == edge_kernel(m, a, b).prob(a));
}

TEST_CASE("apply_step with scripted draws") {
  SUBCASE("reshuffle") {
    ScriptedDraws d{{2}};
    CHECK(apply_step(ModelKind::Reshuffle, MoneyConfig({3, 1}), {0, 1}, d) == MoneyConfig({2, 2}));
    CHECK(d.next == 1);
  }
  SUBCASE("exchange") {
    ScriptedDraws d{{1, 0}};
    CHECK(apply_step(ModelKind::Exchange, MoneyConfig({1, 1}), {0, 1}, d) == MoneyConfig({0, 2}));
    CHECK(d.next == 2);
  }
  SUBCASE("saving") {
    ScriptedDraws d{{1, 0, 2}};
    CHECK(apply_step(ModelKind::Saving, MoneyConfig({2, 1}), {0, 1}, d) == MoneyConfig({3, 0}));
    CHECK(d.next == 3);
  }
  SUBCASE("orientation: first endpoint of the pair receives a'") {
    ScriptedDraws d{{0}};
    CHECK(apply_step(ModelKind::Reshuffle, MoneyConfig({5, 1, 3}), {2, 0}, d) == MoneyConfig({8, 1, 0}));
  }
  SUBCASE("empty pool still consumes draws") {
    ScriptedDraws d{{0, 0, 0}};
    CHECK(apply_step(ModelKind::Saving, MoneyConfig({0, 0}), {0, 1}, d) == MoneyConfig({0, 0}));
    CHECK(d.next == 3);
  }
}

TEST_CASE("apply_step rejects bad edges") {
  RngStream rng(1);
  const MoneyConfig c({1, 2, 3});
  CHECK_THROWS_AS(apply_step(ModelKind::Reshuffle, c, {1, 1}, rng), std::invalid_argument);
  CHECK_THROWS_AS(apply_step(ModelKind::Exchange, c, {0, 3}, rng), std::invalid_argument);
}

TEST_CASE("conservation over random trajectories") {
  for (auto m : kAllModels) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RngStream rng(seed);
      MoneyConfig c({7, 0, 3, 12, 1});
      for (int t = 0; t < 2000; ++t) {
        const auto x = rng.uniform_int_inclusive(4);
        auto y = rng.uniform_int_inclusive(3);
        if (y >= x) ++y;
        c = apply_step(m, c, {x, y}, rng);
        std::int64_t sum = 0;
        for (auto v : c.coins()) {
          REQUIRE(v >= 0);
          sum += v;
        }
        REQUIRE(sum == 23);
      }
    }
  }
}

TEST_CASE("sampled outcomes match the exact kernel (chi-square, 1e5 draws, alpha 1e-3)") {
  std::uint64_t seed = 100;
  for (auto m : kAllModels) {
    for (Coins a = 0; a <= 6; ++a) {
      for (Coins b = 0; a + b <= 6; ++b) {
        const auto k = edge_kernel(m, a, b);
        std::vector<double> probs;
        for (const auto& p : k.probs) probs.push_back(to_double(p));
        std::vector<std::uint64_t> counts(probs.size(), 0);
        RngStream rng(seed++);
        for (int i = 0; i < 100000; ++i) {
          Coins x = a, y = b;
          step_pair(m, x, y, rng);
          ++counts[static_cast<std::size_t>(x)];
        }
        CAPTURE(to_string(m));
        CAPTURE(a);
        CAPTURE(b);
        const auto gof = testing::chi_square_gof(counts, probs, 1e-3);
        CHECK_FALSE(gof.reject);
      }
    }
  }
}

TEST_CASE("RngStream") {
  SUBCASE("determinism") {
    RngStream a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
      const auto x = a.uniform_int_inclusive(1000);
      CHECK(x == b.uniform_int_inclusive(1000));
      differs = differs || x != c.uniform_int_inclusive(1000);
    }
    CHECK(differs);
  }
  SUBCASE("bounds") {
    RngStream r(9);
    for (int i = 0; i < 1000; ++i) {
      CHECK(r.uniform_int_inclusive(0) == 0);
      CHECK(r.uniform_int_inclusive(6) <= 6);
    }
    (void)r.uniform_int_inclusive(~std::uint64_t{0});
  }
  SUBCASE("unbiased on awkward ranges") {
    for (std::uint64_t k : {2ULL, 6ULL, 9ULL}) {
      RngStream r(k);
      std::vector<std::uint64_t> counts(k + 1, 0);
      for (int i = 0; i < 200000; ++i) ++counts[r.uniform_int_inclusive(k)];
      const std::vector<double> probs(k + 1, 1.0 / static_cast<double>(k + 1));
      CHECK_FALSE(testing::chi_square_gof(counts, probs, 1e-3).reject);
    }
  }
  SUBCASE("split_seed separates streams") {
    CHECK(split_seed(1, 0) != split_seed(1, 1));
    CHECK(split_seed(1, 0) != split_seed(2, 0));
    CHECK(split_seed(7, 3) == split_seed(7, 3));
  }
}
