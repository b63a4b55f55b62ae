#include "moneychain/engine.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace moneychain {

MoneyConfig make_initial(const InitSpec& init, std::size_t n) {
  switch (init.kind) {
    case InitSpec::Kind::Equal:
      if (init.per_vertex < 0) throw SimulationError("equal init needs a nonnegative coin count");
      return MoneyConfig(std::vector<Coins>(n, init.per_vertex));
    case InitSpec::Kind::AllAtVertex: {
      if (init.vertex >= n) throw SimulationError("init vertex " + std::to_string(init.vertex) + " out of range");
      if (init.total < 0) throw SimulationError("init total must be nonnegative");
      std::vector<Coins> c(n, 0);
      c[init.vertex] = init.total;
      return MoneyConfig(std::move(c));
    }
    case InitSpec::Kind::Custom:
      if (init.custom.size() != n) {
        throw SimulationError("custom init has " + std::to_string(init.custom.size()) +
                              " entries for a graph with " + std::to_string(n) + " vertices");
      }
      for (Coins c : init.custom) {
        if (c < 0) throw SimulationError("custom init entries must be nonnegative");
      }
      return MoneyConfig(init.custom);
  }
  throw SimulationError("unknown init kind");
}

void Histogram::add_cross_section(const MoneyConfig& cfg) {
  for (Coins c : cfg.coins()) ++counts[static_cast<std::size_t>(c)];
  total += cfg.size();
}

SimReport run_simulation(const SimParams& p) {
  const Graph g = build(p.graph, split_seed(p.seed, kGraphStream));
  return run_simulation(p, g);
}

SimReport run_simulation(const SimParams& p, const Graph& g) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!is_connected(g)) throw SimulationError("graph is not connected");
  MoneyConfig cfg = make_initial(p.init, g.vertex_count());
  const Coins M = cfg.total();

  SimReport rep;
  rep.params = p;
  rep.vertices = g.vertex_count();
  rep.edges = g.edge_count();
  rep.histogram = Histogram(M);

  RngStream rng(split_seed(p.seed, kDynamicsStream));
  auto coins = cfg.mutable_coins();
  bool final_recorded = false;
  for (std::uint64_t t = 1; t <= p.steps; ++t) {
    const auto [x, y] = sample_edge(g, rng);
    step_pair(p.model, coins[x], coins[y], rng);
#ifndef NDEBUG
    if (coins[x] < 0 || coins[y] < 0) throw std::logic_error("negative coin count after update");
#endif
    if (p.sample_every > 0 && t > p.burn_in && (t - p.burn_in) % p.sample_every == 0) {
      rep.histogram.add_cross_section(cfg);
      final_recorded = (t == p.steps);
    }
  }
  if (!final_recorded) rep.histogram.add_cross_section(cfg);
#ifndef NDEBUG
  if (std::accumulate(coins.begin(), coins.end(), Coins{0}) != M) {
    throw std::logic_error("coin total drifted");
  }
#endif
  rep.final_config = cfg;

  const auto n = static_cast<std::int64_t>(g.vertex_count());
  const ExactMarginal exact = exact_marginal(p.model, n, M, MarginalOptions{.exact_retain_limit = 0});
  rep.tv_to_exact = tv_distance(rep.histogram, exact);
  try {
    rep.chi_square = chi_square_stat(rep.histogram, exact, p.min_expected);
  } catch (const std::invalid_argument&) {
    rep.chi_square.reset();  // too few observations to pool into 2 bins
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

double tv_distance(const Histogram& h, const ExactMarginal& m) {
  if (h.total == 0) throw std::invalid_argument("tv_distance: empty histogram");
  if (h.counts.size() != m.probs.size()) throw std::invalid_argument("tv_distance: support mismatch");
  const double total = static_cast<double>(h.total);
  double sum = 0.0;
  for (std::size_t c = 0; c < h.counts.size(); ++c) {
    sum += std::abs(static_cast<double>(h.counts[c]) / total - m.probs[c]);
  }
  return std::min(1.0, 0.5 * sum);
}

ChiSquareResult chi_square_stat(const Histogram& h, const ExactMarginal& m, double min_expected) {
  if (h.total == 0) throw std::invalid_argument("chi_square_stat: empty histogram");
  if (h.counts.size() != m.probs.size()) throw std::invalid_argument("chi_square_stat: support mismatch");
  const double total = static_cast<double>(h.total);

  struct Bin {
    std::size_t first, last;
    double observed, expected;
  };
  std::vector<Bin> bins;
  Bin open{0, 0, 0.0, 0.0};
  bool has_open = false;
  for (std::size_t c = 0; c < h.counts.size(); ++c) {
    if (!has_open) open = {c, c, 0.0, 0.0};
    has_open = true;
    open.last = c;
    open.observed += static_cast<double>(h.counts[c]);
    open.expected += total * m.probs[c];
    if (open.expected >= min_expected) {
      bins.push_back(open);
      has_open = false;
    }
  }
  if (has_open) {
    if (bins.empty()) {
      bins.push_back(open);
    } else {
      auto& last = bins.back();
      last.last = open.last;
      last.observed += open.observed;
      last.expected += open.expected;
    }
  }
  if (bins.size() < 2) throw std::invalid_argument("chi_square_stat: fewer than 2 pooled bins");

  ChiSquareResult r;
  for (const auto& b : bins) {
    const double d = b.observed - b.expected;
    r.statistic += d * d / b.expected;
    r.bins.emplace_back(b.first, b.last);
  }
  r.dof = static_cast<int>(bins.size()) - 1;
  return r;
}

}  // namespace moneychain
