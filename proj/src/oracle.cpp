#include "moneychain/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <string>

namespace moneychain::oracle {

Limits limits_from_env() {
  Limits limits;
  if (const char* env = std::getenv("MONEYCHAIN_ORACLE_MAX_STATES")) {
    const std::string_view s(env);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || value == 0) {
      throw OracleError("MONEYCHAIN_ORACLE_MAX_STATES must be a positive integer, got \"" +
                        std::string(s) + "\"");
    }
    limits.max_states = value;
  }
  return limits;
}

// ---------------------------------------------------------------------------
// ConfigSpace

ConfigSpace::ConfigSpace(std::int64_t N, Coins M, const Limits& limits) : n_(N), m_(M), count_(0) {
  if (N < 1) throw OracleError("enumerate_configs: N must be positive");
  if (M < 0) throw OracleError("enumerate_configs: M must be nonnegative");
  const BigInt card = binomial(M + N - 1, N - 1);
  if (card > to_big(static_cast<std::int64_t>(limits.max_states))) {
    throw OracleError("configuration space C_{" + std::to_string(N) + "," + std::to_string(M) +
                      "} has " + card.get_str() + " states, above the cap of " +
                      std::to_string(limits.max_states));
  }
  count_ = static_cast<std::size_t>(card.get_ui());

  table_.assign(static_cast<std::size_t>(N) + 1, std::vector<std::uint64_t>(static_cast<std::size_t>(M) + 1, 0));
  table_[0][0] = 1;
  for (std::size_t k = 1; k <= static_cast<std::size_t>(N); ++k) {
    std::uint64_t prefix = 0;
    for (std::size_t m = 0; m <= static_cast<std::size_t>(M); ++m) {
      prefix += table_[k - 1][m];
      table_[k][m] = prefix;
    }
  }

  const auto n = static_cast<std::size_t>(N);
  flat_.reserve(count_ * n);
  std::vector<Coins> cur(n, 0);
  // Depth-first fill in ascending lexicographic order.
  auto fill = [&](auto&& self, std::size_t pos, Coins remaining) -> void {
    if (pos + 1 == n) {
      cur[pos] = remaining;
      flat_.insert(flat_.end(), cur.begin(), cur.end());
      return;
    }
    for (Coins v = 0; v <= remaining; ++v) {
      cur[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  fill(fill, 0, M);
}

std::uint64_t ConfigSpace::compositions(std::int64_t k, Coins m) const {
  return table_[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)];
}

std::size_t ConfigSpace::rank(std::span<const Coins> coins) const {
  if (coins.size() != static_cast<std::size_t>(n_)) throw OracleError("rank: wrong configuration length");
  std::uint64_t r = 0;
  Coins remaining = m_;
  for (std::size_t i = 0; i + 1 < coins.size(); ++i) {
    const Coins v = coins[i];
    if (v < 0 || v > remaining) throw OracleError("rank: configuration not in C_{N,M}");
    const auto tail = n_ - static_cast<std::int64_t>(i) - 1;
    // completions with a smaller value at position i come first
    for (Coins smaller = 0; smaller < v; ++smaller) r += compositions(tail, remaining - smaller);
    remaining -= v;
  }
  if (coins.back() != remaining) throw OracleError("rank: configuration not in C_{N,M}");
  return static_cast<std::size_t>(r);
}

MoneyConfig ConfigSpace::unrank(std::size_t index) const {
  if (index >= count_) throw OracleError("unrank: index out of range");
  const auto n = static_cast<std::size_t>(n_);
  std::vector<Coins> coins(n, 0);
  std::uint64_t r = index;
  Coins remaining = m_;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto tail = n_ - static_cast<std::int64_t>(i) - 1;
    Coins v = 0;
    while (r >= compositions(tail, remaining - v)) {
      r -= compositions(tail, remaining - v);
      ++v;
    }
    coins[i] = v;
    remaining -= v;
  }
  coins[n - 1] = remaining;
  return MoneyConfig(std::move(coins));
}

std::string ConfigSpace::describe(std::size_t index) const {
  std::string s = "(";
  const auto c = at(index);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(c[i]);
  }
  return s + ")";
}

ConfigSpace enumerate_configs(std::int64_t N, Coins M, const Limits& limits) {
  return ConfigSpace(N, M, limits);
}

// ---------------------------------------------------------------------------
// TransitionMatrix

Rational TransitionMatrix::at(std::size_t i, std::size_t j) const {
  const auto& r = rows_.at(i);
  auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, std::size_t col) { return e.col < col; });
  if (it != r.end() && it->col == j) return it->value;
  return 0;
}

TransitionMatrix TransitionMatrix::identity(std::size_t dim) {
  TransitionMatrix tm(dim);
  for (std::size_t i = 0; i < dim; ++i) tm.rows_[i].push_back({i, Rational(1)});
  return tm;
}

bool operator==(const TransitionMatrix& a, const TransitionMatrix& b) {
  if (a.dim() != b.dim()) return false;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const auto& ra = a.rows_[i];
    const auto& rb = b.rows_[i];
    if (ra.size() != rb.size()) return false;
    for (std::size_t k = 0; k < ra.size(); ++k) {
      if (ra[k].col != rb[k].col || ra[k].value != rb[k].value) return false;
    }
  }
  return true;
}

TransitionMatrix transition_matrix(ModelKind model, const Graph& g, Coins M, const Limits& limits) {
  const ConfigSpace space(static_cast<std::int64_t>(g.vertex_count()), M, limits);
  return transition_matrix(model, g, space);
}

TransitionMatrix transition_matrix(ModelKind model, const Graph& g, const ConfigSpace& space) {
  if (static_cast<std::size_t>(space.vertices()) != g.vertex_count()) {
    throw OracleError("transition_matrix: graph and configuration space disagree on N");
  }
  std::map<std::pair<Coins, Coins>, EdgeKernel> kernels;
  auto kernel = [&](Coins a, Coins b) -> const EdgeKernel& {
    auto it = kernels.find({a, b});
    if (it == kernels.end()) it = kernels.emplace(std::pair{a, b}, edge_kernel(model, a, b)).first;
    return it->second;
  };

  const Rational edge_weight(1, static_cast<unsigned long>(g.edge_count()));
  TransitionMatrix tm(space.size());
  std::vector<Coins> eta;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto xi = space.at(i);
    std::map<std::size_t, Rational> acc;
    for (const auto& e : g.edges()) {
      const Coins a = xi[e.u];
      const Coins b = xi[e.v];
      const EdgeKernel& k = kernel(a, b);
      eta.assign(xi.begin(), xi.end());
      for (Coins ap = 0; ap <= k.pool; ++ap) {
        const Rational& p = k.probs[static_cast<std::size_t>(ap)];
        if (sgn(p) == 0) continue;
        eta[e.u] = ap;
        eta[e.v] = k.pool - ap;
        acc[space.rank(eta)] += p;
      }
    }
    auto& row = tm.mutable_row(i);
    row.reserve(acc.size());
    for (auto& [col, value] : acc) row.push_back({col, value * edge_weight});
  }
  return tm;
}

// ---------------------------------------------------------------------------
// Checks

namespace {

std::string state_name(const ConfigSpace* space, std::size_t i) {
  return space ? space->describe(i) : "#" + std::to_string(i);
}

}  // namespace

CheckReport check_row_sums(const TransitionMatrix& tm) {
  CheckReport rep{"row_sums", true, {}};
  for (std::size_t i = 0; i < tm.dim(); ++i) {
    Rational sum = 0;
    for (const auto& e : tm.row(i)) {
      if (sgn(e.value) < 0) {
        rep.passed = false;
        rep.counterexample = "negative entry in row " + std::to_string(i);
        return rep;
      }
      sum += e.value;
    }
    if (sum != 1) {
      rep.passed = false;
      rep.counterexample = "row " + std::to_string(i) + " sums to " + sum.get_str();
      return rep;
    }
  }
  return rep;
}

CheckReport check_doubly_stochastic(const TransitionMatrix& tm, const ConfigSpace* space) {
  CheckReport rep{"doubly_stochastic", true, {}};
  for (std::size_t i = 0; i < tm.dim(); ++i) {
    for (const auto& e : tm.row(i)) {
      const Rational back = tm.at(e.col, i);
      if (back != e.value) {
        rep.passed = false;
        rep.counterexample = "P(" + state_name(space, i) + "->" + state_name(space, e.col) + ") = " +
                             e.value.get_str() + " but P(" + state_name(space, e.col) + "->" +
                             state_name(space, i) + ") = " + back.get_str();
        return rep;
      }
    }
  }
  // Symmetric with unit row sums means unit column sums too.
  const CheckReport rows = check_row_sums(tm);
  if (!rows.passed) {
    rep.passed = false;
    rep.counterexample = rows.counterexample;
  }
  return rep;
}

CheckReport check_detailed_balance(const TransitionMatrix& tm, std::span<const BigInt> weights,
                                   const ConfigSpace* space) {
  CheckReport rep{"detailed_balance", true, {}};
  if (weights.size() != tm.dim()) {
    rep.passed = false;
    rep.counterexample = "weight vector length does not match matrix dimension";
    return rep;
  }
  for (std::size_t i = 0; i < tm.dim(); ++i) {
    for (const auto& e : tm.row(i)) {
      const Rational lhs = Rational(weights[i]) * e.value;
      const Rational rhs = Rational(weights[e.col]) * tm.at(e.col, i);
      if (lhs != rhs) {
        rep.passed = false;
        rep.counterexample = "mu(xi)P(xi,eta) = " + lhs.get_str() + " != mu(eta)P(eta,xi) = " +
                             rhs.get_str() + " for xi=" + state_name(space, i) +
                             ", eta=" + state_name(space, e.col);
        return rep;
      }
    }
  }
  return rep;
}

CheckReport check_detailed_balance(const TransitionMatrix& tm, const ConfigSpace& space) {
  std::vector<BigInt> weights;
  weights.reserve(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) weights.push_back(stationary_weight(space.at(i)));
  return check_detailed_balance(tm, weights, &space);
}

IrreducibilityReport check_irreducible_aperiodic(const TransitionMatrix& tm) {
  IrreducibilityReport rep;
  const std::size_t n = tm.dim();
  if (n == 0) {
    rep.counterexample = "empty matrix";
    return rep;
  }
  std::vector<std::vector<std::size_t>> reverse(n);
  rep.all_diagonal_positive = true;
  bool first_diag = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Rational d = tm.at(i, i);
    if (sgn(d) > 0) rep.aperiodic = true;
    if (sgn(d) <= 0 && rep.all_diagonal_positive) {
      rep.all_diagonal_positive = false;
      rep.counterexample = "zero diagonal at state " + std::to_string(i);
    }
    if (first_diag || d < rep.min_diagonal) rep.min_diagonal = d;
    first_diag = false;
    for (const auto& e : tm.row(i)) {
      if (sgn(e.value) > 0) reverse[e.col].push_back(i);
    }
  }

  auto reach_all = [&](auto&& neighbours) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      neighbours(u, [&](std::size_t w) {
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
      });
    }
    return count == n;
  };
  const bool forward = reach_all([&](std::size_t u, auto&& visit) {
    for (const auto& e : tm.row(u))
      if (sgn(e.value) > 0) visit(e.col);
  });
  const bool backward = reach_all([&](std::size_t u, auto&& visit) {
    for (std::size_t w : reverse[u]) visit(w);
  });
  rep.irreducible = forward && backward;
  if (!rep.irreducible) rep.counterexample = "support graph is not strongly connected";
  return rep;
}

std::vector<Rational> stationary_solve(const TransitionMatrix& tm, const Limits& limits) {
  const std::size_t n = tm.dim();
  if (n == 0) throw OracleError("stationary_solve: empty matrix");
  if (!check_irreducible_aperiodic(tm).irreducible) {
    throw OracleError("stationary_solve: chain is not irreducible");
  }
  if (n > limits.max_dense_entries / n) {
    throw OracleError("stationary_solve: " + std::to_string(n) + "x" + std::to_string(n) +
                      " system exceeds the dense-entry cap");
  }
  // Rows 0..n-2: (P^T - I) pi = 0. Row n-1: sum pi = 1. Column n holds the rhs.
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : tm.row(i)) {
      if (e.col + 1 < n) a[e.col][i] += e.value;
    }
    if (i + 1 < n) a[i][i] -= 1;
  }
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1;
  a[n - 1][n] = 1;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(a[pivot][col]) == 0) ++pivot;
    if (pivot == n) throw OracleError("stationary_solve: singular system");
    std::swap(a[pivot], a[col]);
    const Rational inv = 1 / a[col][col];
    for (std::size_t j = col; j <= n; ++j) a[col][j] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a[r][col]) == 0) continue;
      const Rational f = a[r][col];
      for (std::size_t j = col; j <= n; ++j) {
        if (sgn(a[col][j]) != 0) a[r][j] -= f * a[col][j];
      }
    }
  }
  std::vector<Rational> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = a[i][n];
  return pi;
}

std::vector<Rational> left_multiply(std::span<const Rational> pi, const TransitionMatrix& tm) {
  if (pi.size() != tm.dim()) throw OracleError("left_multiply: dimension mismatch");
  std::vector<Rational> out(tm.dim(), Rational(0));
  for (std::size_t i = 0; i < tm.dim(); ++i) {
    if (sgn(pi[i]) == 0) continue;
    for (const auto& e : tm.row(i)) out[e.col] += pi[i] * e.value;
  }
  return out;
}

ExactMarginal marginal_from_stationary(std::span<const Rational> pi, const ConfigSpace& space,
                                       std::size_t vertex) {
  if (pi.size() != space.size()) throw OracleError("marginal_from_stationary: dimension mismatch");
  if (vertex >= static_cast<std::size_t>(space.vertices())) {
    throw OracleError("marginal_from_stationary: vertex out of range");
  }
  ExactMarginal m;
  m.vertices = space.vertices();
  m.total_coins = space.total_coins();
  m.exact.assign(static_cast<std::size_t>(m.total_coins) + 1, Rational(0));
  for (std::size_t i = 0; i < space.size(); ++i) {
    m.exact[static_cast<std::size_t>(space.at(i)[vertex])] += pi[i];
  }
  m.probs.reserve(m.exact.size());
  for (const auto& q : m.exact) m.probs.push_back(to_double(q));
  return m;
}

}  // namespace moneychain::oracle
