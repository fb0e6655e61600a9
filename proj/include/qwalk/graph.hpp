#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qwalk {

/// Undirected graph on nodes 1..n. Self-loops are ordinary edges.
///
/// Edges are stored as unordered pairs normalized to (min, max); all indices
/// exposed through this interface are 1-based.
class Graph {
 public:
  using Edge = std::pair<int, int>;

  explicit Graph(int n);
  Graph(int n, const std::vector<Edge>& edges);

  int size() const noexcept { return n_; }
  const std::set<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool has_edge(int j, int k) const;

  /// Copy with (j,k) added; a no-op if already present.
  Graph with_edge(int j, int k) const;

  /// Copy without (j,k). Throws NotFoundError if the edge is absent.
  Graph without_edge(int j, int k) const;

  /// Nodes adjacent to j (including j itself for a self-loop), ascending.
  std::vector<int> neighbors(int j) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  Edge normalized(int j, int k) const;

  int n_;
  std::set<Edge> edges_;
};

/// All unordered pairs plus every self-loop: n(n+1)/2 edges.
Graph complete_graph(int n);

/// Ring 1-2-...-n-1 without self-loops. Requires n >= 3.
Graph cycle_graph(int n);

/// Path 1-2-...-n without self-loops.
Graph path_graph(int n);

inline Graph remove_edge(const Graph& g, int j, int k) { return g.without_edge(j, k); }

/// Symmetric Boolean presence matrix; present(j,k) is true iff (j,k) is an edge.
class EdgeMask {
 public:
  explicit EdgeMask(const Graph& g);

  int size() const noexcept { return n_; }
  bool present(int j, int k) const { return bits_[idx(j, k)] != 0; }

  /// Row j as a length-n Boolean vector (0-based positions).
  std::vector<bool> row(int j) const;

 private:
  std::size_t idx(int j, int k) const;

  int n_;
  std::vector<char> bits_;
};

inline EdgeMask edge_mask(const Graph& g) { return EdgeMask(g); }

/// Parses either the edge-list text form ("n" then one "j k" per line, '#'
/// comments allowed) or a JSON object {"n": int, "edges": [[j,k], ...]}.
/// Duplicate edges collapse; directed input is rejected.
Graph parse_graph(std::string_view text);

/// Edge-list text form accepted by parse_graph.
std::string format_graph(const Graph& g);

}  // namespace qwalk
