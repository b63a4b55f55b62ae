#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "moneychain/dynamics.hpp"
#include "moneychain/exact.hpp"
#include "moneychain/graph.hpp"
#include "moneychain/numeric.hpp"

namespace moneychain::oracle {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Limits {
  /// Cap on card(C_{N,M}).
  std::size_t max_states = 1'000'000;
  /// Cap on dense entries (dim^2) for the exact linear solve.
  std::size_t max_dense_entries = 1'000'000;
};

/// Reads MONEYCHAIN_ORACLE_MAX_STATES if set; defaults otherwise.
Limits limits_from_env();

/// All configurations on N vertices with M coins, in ascending
/// lexicographic order of the coin vector.
class ConfigSpace {
 public:
  ConfigSpace(std::int64_t N, Coins M, const Limits& limits = {});

  std::int64_t vertices() const noexcept { return n_; }
  Coins total_coins() const noexcept { return m_; }
  std::size_t size() const noexcept { return count_; }

  std::span<const Coins> at(std::size_t index) const {
    return {flat_.data() + index * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  MoneyConfig unrank(std::size_t index) const;
  std::size_t rank(std::span<const Coins> coins) const;

  std::string describe(std::size_t index) const;

 private:
  // compositions_[k][m] = card(C_{k,m})
  std::uint64_t compositions(std::int64_t k, Coins m) const;

  std::int64_t n_;
  Coins m_;
  std::size_t count_;
  std::vector<std::vector<std::uint64_t>> table_;
  std::vector<Coins> flat_;
};

ConfigSpace enumerate_configs(std::int64_t N, Coins M, const Limits& limits = {});

/// Sparse exact stochastic matrix, rows sorted by column.
class TransitionMatrix {
 public:
  struct Entry {
    std::size_t col;
    Rational value;
  };

  explicit TransitionMatrix(std::size_t dim) : rows_(dim) {}

  std::size_t dim() const noexcept { return rows_.size(); }
  const std::vector<Entry>& row(std::size_t i) const { return rows_[i]; }
  std::vector<Entry>& mutable_row(std::size_t i) { return rows_[i]; }

  /// Zero when absent.
  Rational at(std::size_t i, std::size_t j) const;

  static TransitionMatrix identity(std::size_t dim);

  friend bool operator==(const TransitionMatrix& a, const TransitionMatrix& b);

 private:
  std::vector<std::vector<Entry>> rows_;
};

/// entry(xi, eta) = (1/|E|) sum over edges of kernel(xi(x), xi(y) -> eta(x), eta(y))
/// for configurations that agree off {x, y}.
TransitionMatrix transition_matrix(ModelKind model, const Graph& g, Coins M,
                                   const Limits& limits = {});
TransitionMatrix transition_matrix(ModelKind model, const Graph& g, const ConfigSpace& space);

struct CheckReport {
  std::string name;
  bool passed = true;
  std::string counterexample;  // first violation, empty on pass
};

CheckReport check_row_sums(const TransitionMatrix& tm);

/// Passes iff the matrix is exactly symmetric.
CheckReport check_doubly_stochastic(const TransitionMatrix& tm,
                                    const ConfigSpace* space = nullptr);

/// mu(xi) P(xi, eta) == mu(eta) P(eta, xi) for every pair.
CheckReport check_detailed_balance(const TransitionMatrix& tm, std::span<const BigInt> weights,
                                   const ConfigSpace* space = nullptr);
/// Same with mu = stationary_weight.
CheckReport check_detailed_balance(const TransitionMatrix& tm, const ConfigSpace& space);

struct IrreducibilityReport {
  bool irreducible = false;
  bool aperiodic = false;             // some diagonal entry > 0
  bool all_diagonal_positive = false;
  Rational min_diagonal;
  std::string counterexample;
};

IrreducibilityReport check_irreducible_aperiodic(const TransitionMatrix& tm);

/// Unique pi with pi P = pi, sum 1, by exact Gaussian elimination.
/// Throws OracleError when the support is not strongly connected or the
/// dense system exceeds limits.max_dense_entries.
std::vector<Rational> stationary_solve(const TransitionMatrix& tm, const Limits& limits = {});

/// pi P, for fixed-point checks.
std::vector<Rational> left_multiply(std::span<const Rational> pi, const TransitionMatrix& tm);

ExactMarginal marginal_from_stationary(std::span<const Rational> pi, const ConfigSpace& space,
                                       std::size_t vertex);

}  // namespace moneychain::oracle
