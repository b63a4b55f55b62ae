#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "moneychain/dynamics.hpp"
#include "moneychain/exact.hpp"
#include "moneychain/graph.hpp"

namespace moneychain {

struct InitSpec {
  enum class Kind { Equal, AllAtVertex, Custom };
  Kind kind = Kind::Equal;
  Coins per_vertex = 0;        // Equal
  Vertex vertex = 0;           // AllAtVertex
  Coins total = 0;             // AllAtVertex
  std::vector<Coins> custom;   // Custom

  static InitSpec equal(Coins per_vertex) { return {Kind::Equal, per_vertex, 0, 0, {}}; }
  static InitSpec all_at_vertex(Vertex v, Coins total) { return {Kind::AllAtVertex, 0, v, total, {}}; }
  static InitSpec from_vector(std::vector<Coins> c) { return {Kind::Custom, 0, 0, 0, std::move(c)}; }
};

/// Builds the initial configuration for an n-vertex graph.
MoneyConfig make_initial(const InitSpec& init, std::size_t n);

struct SimParams {
  ModelKind model = ModelKind::Reshuffle;
  GraphSpec graph;
  InitSpec init;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t burn_in = 0;
  /// 0: final state only. Otherwise a cross-section is also recorded after
  /// every sample_every steps past burn_in.
  std::uint64_t sample_every = 0;
  double min_expected = 5.0;  // chi-square pooling threshold
};

/// Sub-stream indices under split_seed(seed, .).
inline constexpr std::uint64_t kGraphStream = 0;
inline constexpr std::uint64_t kDynamicsStream = 1;

struct Histogram {
  std::vector<std::uint64_t> counts;  // c = 0..M
  std::uint64_t total = 0;

  explicit Histogram(Coins M = 0) : counts(static_cast<std::size_t>(M) + 1, 0) {}
  void add_cross_section(const MoneyConfig& cfg);
  double frequency(std::size_t c) const {
    return total == 0 ? 0.0 : static_cast<double>(counts[c]) / static_cast<double>(total);
  }
};

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  /// Pooled bins as [first, last] coin values.
  std::vector<std::pair<std::size_t, std::size_t>> bins;
};

struct SimReport {
  SimParams params;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  MoneyConfig final_config;
  Histogram histogram;
  double tv_to_exact = 0.0;
  std::optional<ChiSquareResult> chi_square;
  double wall_seconds = 0.0;
};

class SimulationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Runs `steps` updates (sample_edge then apply) from the initial state.
SimReport run_simulation(const SimParams& p);
/// Same, on an already-built graph shared across replicas.
SimReport run_simulation(const SimParams& p, const Graph& g);

/// Half L1 distance between the empirical histogram and m.
double tv_distance(const Histogram& h, const ExactMarginal& m);

/// Pools consecutive bins from c = 0 upward until each has expected count
/// >= min_expected; a short tail is merged into the last closed bin.
/// Throws std::invalid_argument on an empty histogram or fewer than 2 bins.
ChiSquareResult chi_square_stat(const Histogram& h, const ExactMarginal& m, double min_expected);

}  // namespace moneychain
