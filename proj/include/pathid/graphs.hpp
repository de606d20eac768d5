#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pathid/engine.hpp"

namespace pathid {

/// Bi-colored weighted edge: a source emitting one photon in mode `color_u`
/// on vertex u and one in `color_v` on vertex v.
struct GraphEdge {
  std::size_t u = 0, v = 0;
  InternalMode color_u, color_v;
  Complex weight = 1.0;
};

/// Undirected multigraph over path names. Parallel edges are kept separately.
class ColoredWeightedGraph {
 public:
  ColoredWeightedGraph() = default;
  explicit ColoredWeightedGraph(std::vector<std::string> vertices);

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  std::size_t vertex_count() const { return vertices_.size(); }

  /// Index of a vertex, adding it when absent.
  std::size_t vertex(const std::string& name);
  /// Throws ValidationError for u == v or unknown indices.
  void add_edge(GraphEdge e);
  void add_edge(const std::string& a, const std::string& b, Complex weight = 1.0, InternalMode ca = {},
                InternalMode cb = {});

  /// Weighted adjacency matrix; parallel edges are summed.
  Eigen::MatrixXcd adjacency() const;
  int degree(std::size_t v) const;
  int max_degree() const;

  /// Presence amplitude used to build a random network; absent-edge amplitude
  /// recorded as given.
  std::optional<double> edge_amplitude;
  std::optional<double> absent_amplitude;

 private:
  std::vector<std::string> vertices_;
  std::vector<GraphEdge> edges_;
};

/// Edge indices, sorted ascending.
using Matching = std::vector<std::size_t>;

/// Translates a crystal network into its graph. Supports crystals (two paths),
/// phase shifters, OAM shifters, polarization-set shifters and path
/// identifications; other elements raise ValidationError. Vertices are the
/// detector paths in declared order followed by any further endpoint paths in
/// sorted order. Sources whose two photons end on one path are dropped since
/// they never enter a perfect matching.
ColoredWeightedGraph from_experiment(const ExperimentSetup& setup, const Bindings& bindings = {});

/// All perfect matchings, each edge used at most once per matching. Order is
/// deterministic: recursion always matches the lowest unmatched vertex first,
/// trying its edges in index order.
std::vector<Matching> perfect_matchings(const ColoredWeightedGraph& g);

/// Number of perfect matchings without materializing them.
std::uint64_t count_perfect_matchings(const ColoredWeightedGraph& g);

/// Sum over perfect matchings of the product of edge weights (the Hafnian of
/// the weighted adjacency), by direct enumeration.
Complex weighted_matching_sum(const ColoredWeightedGraph& g);

/// Hafnian of a symmetric matrix by dynamic programming over vertex subsets;
/// diagonal ignored. Limited to 24 vertices.
Complex hafnian(const Eigen::MatrixXcd& a);

/// Permanent by Ryser's formula with Gray-code updates.
Complex permanent(const Eigen::MatrixXcd& a);

/// Bipartite double cover: rows r0.., columns c0.., edge weight b(i,j) for
/// every non-zero entry.
ColoredWeightedGraph bipartite_graph(const Eigen::MatrixXcd& b);

/// Complete graph on n vertices named v0..v{n-1}, every edge of weight `w`.
ColoredWeightedGraph complete_graph(std::size_t n, Complex w = 1.0);

/// Collision-free, post-selected n-fold state: every perfect matching adds
/// the product of its edge weights to the term with one photon per vertex in
/// the endpoint colors. Not normalized; terms sit at degree n/2.
PureState state_from_graph(const ColoredWeightedGraph& g);

struct FeasibilityOptions {
  int max_vertices = 8;
  /// Only examine subsets that are lexicographically minimal among their
  /// vertex relabelings.
  bool dedup_isomorphic = false;
  /// Enumerate edges in a seeded random order instead of natural order.
  std::optional<std::uint64_t> permutation_seed;
};

struct FeasibilityResult {
  int n = 0, d = 0;
  bool feasible = false;
  std::optional<ColoredWeightedGraph> witness;  // one PM per color l0, l1, ...
  std::uint64_t subsets_total = 0;    // 2^(edges of K_n)
  std::uint64_t subsets_examined = 0;
};

/// Searches simple graphs on n vertices for exactly d perfect matchings that
/// are pairwise edge-disjoint. Exhaustive: a negative verdict covers every
/// edge subset of K_n (or every canonical one with dedup). Throws
/// ValidationError for odd n, n above the bound, or d < 2.
FeasibilityResult ghz_feasibility_search(int n, int d, const FeasibilityOptions& options = {});

/// K_N with every edge amplitude p. With keep_fraction < 1 each edge is kept
/// with that probability using a generator seeded by `seed`.
ColoredWeightedGraph random_network(std::size_t n, double p, std::uint64_t seed, double keep_fraction = 1.0);

/// DOT text with vertices and edges in stored order; weights printed with
/// nine significant digits as "re+im i".
std::string to_dot(const ColoredWeightedGraph& g);

}  // namespace pathid
