#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "moneychain/rng.hpp"

namespace moneychain {

using Vertex = std::size_t;

struct Edge {
  Vertex u;  // u < v
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class GraphError : public std::runtime_error {
 public:
  enum class Kind {
    InvalidParameter,
    Parse,
    SelfLoop,
    DuplicateEdge,
    OutOfRange,
    NoEdges,
    Disconnected,
    AttemptsExhausted,
  };

  GraphError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Undirected, simple, connected interaction graph on vertices 0..n-1.
/// Immutable once built.
class Graph {
 public:
  /// Validates every invariant; edges may be given in either orientation.
  static Graph create(std::size_t n, std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Canonical "u v" lines, sorted.
  std::string to_edge_list() const;

 private:
  Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {}

  std::size_t n_;
  std::vector<Edge> edges_;
};

enum class GraphFamily { Complete, Path, Cycle, Star, Grid, ErdosRenyi, EdgeList };

std::string_view to_string(GraphFamily f);
std::optional<GraphFamily> parse_graph_family(std::string_view name);

struct GraphSpec {
  GraphFamily family = GraphFamily::Complete;
  std::size_t n = 0;
  std::size_t width = 0;   // grid only
  std::size_t height = 0;  // grid only
  double p = 0.0;          // erdos_renyi only
  std::string edge_list_text;    // edge_list only
  std::string edge_list_source;  // label echoed in reports
};

inline constexpr int kErdosRenyiMaxAttempts = 10'000;

/// Builds a named family. `seed` is required for erdos_renyi and ignored
/// otherwise. cycle(2) degenerates to the single edge {0,1}.
Graph build(const GraphSpec& spec, std::optional<std::uint64_t> seed = std::nullopt);

Graph complete_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph star_graph(std::size_t n);
Graph grid_graph(std::size_t width, std::size_t height);
Graph erdos_renyi_graph(std::size_t n, double p, std::uint64_t seed,
                        int max_attempts = kErdosRenyiMaxAttempts);

/// Parses "u v" lines; '#' starts a comment line, blank lines are skipped.
/// n is 1 + the largest index seen.
Graph from_edge_list(std::string_view text);

/// True iff a traversal from vertex 0 reaches all n vertices.
bool is_connected(std::size_t n, const std::vector<Edge>& edges);
inline bool is_connected(const Graph& g) { return is_connected(g.vertex_count(), g.edges()); }

/// Uniform edge, then uniform orientation. Two draws per call.
std::pair<Vertex, Vertex> sample_edge(const Graph& g, RngStream& rng);

}  // namespace moneychain
