#include "moneychain/graph.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace moneychain {

namespace {

using Kind = GraphError::Kind;

Edge canonical(Vertex a, Vertex b) { return a < b ? Edge{a, b} : Edge{b, a}; }

void require_vertices(std::size_t n) {
  if (n < 2) throw GraphError(Kind::InvalidParameter, "graph needs n >= 2, got " + std::to_string(n));
}

std::string edge_str(const Edge& e) {
  return std::to_string(e.u) + " " + std::to_string(e.v);
}

}  // namespace

Graph Graph::create(std::size_t n, std::vector<Edge> edges) {
  if (n == 0) throw GraphError(Kind::InvalidParameter, "graph needs at least one vertex");
  std::set<Edge> seen;
  for (auto& e : edges) {
    if (e.u == e.v) throw GraphError(Kind::SelfLoop, "self-loop at vertex " + std::to_string(e.u));
    if (e.u >= n || e.v >= n) {
      throw GraphError(Kind::OutOfRange, "edge " + edge_str(e) + " references a vertex >= n = " +
                                             std::to_string(n));
    }
    e = canonical(e.u, e.v);
    if (!seen.insert(e).second) throw GraphError(Kind::DuplicateEdge, "duplicate edge " + edge_str(e));
  }
  if (edges.empty()) throw GraphError(Kind::NoEdges, "graph has no edges");
  if (!is_connected(n, edges)) throw GraphError(Kind::Disconnected, "graph is not connected");
  std::sort(edges.begin(), edges.end());
  return Graph(n, std::move(edges));
}

std::string Graph::to_edge_list() const {
  std::string out;
  for (const auto& e : edges_) out += edge_str(e) + "\n";
  return out;
}

std::string_view to_string(GraphFamily f) {
  switch (f) {
    case GraphFamily::Complete: return "complete";
    case GraphFamily::Path: return "path";
    case GraphFamily::Cycle: return "cycle";
    case GraphFamily::Star: return "star";
    case GraphFamily::Grid: return "grid";
    case GraphFamily::ErdosRenyi: return "erdos_renyi";
    case GraphFamily::EdgeList: return "edge_list";
  }
  return "?";
}

std::optional<GraphFamily> parse_graph_family(std::string_view name) {
  for (auto f : {GraphFamily::Complete, GraphFamily::Path, GraphFamily::Cycle, GraphFamily::Star,
                 GraphFamily::Grid, GraphFamily::ErdosRenyi, GraphFamily::EdgeList}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

Graph complete_graph(std::size_t n) {
  require_vertices(n);
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
  return Graph::create(n, std::move(edges));
}

Graph path_graph(std::size_t n) {
  require_vertices(n);
  std::vector<Edge> edges;
  for (Vertex u = 0; u + 1 < n; ++u) edges.push_back({u, u + 1});
  return Graph::create(n, std::move(edges));
}

Graph cycle_graph(std::size_t n) {
  require_vertices(n);
  if (n == 2) return path_graph(2);
  std::vector<Edge> edges;
  for (Vertex u = 0; u + 1 < n; ++u) edges.push_back({u, u + 1});
  edges.push_back({0, n - 1});
  return Graph::create(n, std::move(edges));
}

Graph star_graph(std::size_t n) {
  require_vertices(n);
  std::vector<Edge> edges;
  for (Vertex v = 1; v < n; ++v) edges.push_back({0, v});
  return Graph::create(n, std::move(edges));
}

Graph grid_graph(std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) throw GraphError(Kind::InvalidParameter, "grid needs positive width and height");
  const std::size_t n = width * height;
  require_vertices(n);
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const Vertex v = r * width + c;
      if (c + 1 < width) edges.push_back({v, v + 1});
      if (r + 1 < height) edges.push_back({v, v + width});
    }
  }
  return Graph::create(n, std::move(edges));
}

Graph erdos_renyi_graph(std::size_t n, double p, std::uint64_t seed, int max_attempts) {
  require_vertices(n);
  if (!(p > 0.0 && p <= 1.0)) {
    throw GraphError(Kind::InvalidParameter, "erdos_renyi needs 0 < p <= 1, got " + std::to_string(p));
  }
  RngStream rng(seed);
  // Bernoulli(p) from 53 random bits; comparing integers keeps it exact.
  constexpr std::uint64_t kScale = std::uint64_t{1} << 53;
  const auto cutoff = static_cast<std::uint64_t>(p * static_cast<double>(kScale));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) {
        if ((rng.next_u64() >> 11) < cutoff) edges.push_back({u, v});
      }
    }
    if (!edges.empty() && is_connected(n, edges)) return Graph::create(n, std::move(edges));
  }
  throw GraphError(Kind::AttemptsExhausted, "erdos_renyi produced no connected sample in " +
                                                std::to_string(max_attempts) + " attempts");
}

Graph build(const GraphSpec& spec, std::optional<std::uint64_t> seed) {
  switch (spec.family) {
    case GraphFamily::Complete: return complete_graph(spec.n);
    case GraphFamily::Path: return path_graph(spec.n);
    case GraphFamily::Cycle: return cycle_graph(spec.n);
    case GraphFamily::Star: return star_graph(spec.n);
    case GraphFamily::Grid:
      if (spec.n != 0 && spec.n != spec.width * spec.height) {
        throw GraphError(Kind::InvalidParameter, "grid needs n = width * height");
      }
      return grid_graph(spec.width, spec.height);
    case GraphFamily::ErdosRenyi:
      if (!seed) throw GraphError(Kind::InvalidParameter, "erdos_renyi needs a seed");
      return erdos_renyi_graph(spec.n, spec.p, *seed);
    case GraphFamily::EdgeList: {
      Graph g = from_edge_list(spec.edge_list_text);
      if (spec.n != 0 && spec.n != g.vertex_count()) {
        throw GraphError(Kind::InvalidParameter, "edge list has " + std::to_string(g.vertex_count()) +
                                                     " vertices, expected " + std::to_string(spec.n));
      }
      return g;
    }
  }
  throw GraphError(Kind::InvalidParameter, "unknown graph family");
}

Graph from_edge_list(std::string_view text) {
  std::vector<Edge> edges;
  std::size_t n = 0;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    fields >> a >> b;
    auto parse_index = [&](const std::string& tok, std::size_t& out) {
      const auto* end = tok.data() + tok.size();
      auto [ptr, ec] = std::from_chars(tok.data(), end, out);
      return !tok.empty() && ec == std::errc{} && ptr == end;
    };
    Vertex u = 0, v = 0;
    if (!parse_index(a, u) || !parse_index(b, v) || (fields >> extra)) {
      throw GraphError(Kind::Parse, "line " + std::to_string(line_no) + ": expected \"u v\", got \"" + line + "\"");
    }
    if (u == v) throw GraphError(Kind::SelfLoop, "line " + std::to_string(line_no) + ": self-loop at vertex " + a);
    edges.push_back(canonical(u, v));
    n = std::max(n, std::max(u, v) + 1);
  }
  if (edges.empty()) throw GraphError(Kind::NoEdges, "edge list has no edges");
  return Graph::create(n, std::move(edges));
}

bool is_connected(std::size_t n, const std::vector<Edge>& edges) {
  if (n == 0) return false;
  std::vector<std::vector<Vertex>> adj(n);
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) return false;
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<char> seen(n, 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    for (Vertex w : adj[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

std::pair<Vertex, Vertex> sample_edge(const Graph& g, RngStream& rng) {
  const auto& e = g.edges()[rng.uniform_int_inclusive(g.edge_count() - 1)];
  if (rng.uniform_int_inclusive(1) == 0) return {e.u, e.v};
  return {e.v, e.u};
}

}  // namespace moneychain
