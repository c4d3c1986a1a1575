#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nibblepack/points.hpp"
#include "nibblepack/rng.hpp"

namespace nibblepack {

/// Undirected simple graph, immutable after construction. Adjacency is a
/// compressed-row layout with sorted neighbor lists; codegree work runs on
/// sorted ranges.
class Graph {
 public:
  Graph() = default;

  /// Builds from an edge list. Self-loops are rejected; duplicates merged.
  static Graph from_edges(std::uint32_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

  /// Builds from per-vertex neighbor lists (need not be sorted).
  static Graph from_adjacency(std::vector<std::vector<std::uint32_t>> adjacency);

  std::uint32_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return adj_.size() / 2; }

  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(std::uint32_t v) const {
    return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]);
  }
  bool has_edge(std::uint32_t u, std::uint32_t v) const;

  /// Edges as sorted (u, v) pairs with u < v.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_list() const;

 private:
  std::uint32_t n_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> adj_;
};

struct DegreeProfile {
  std::uint32_t max_degree = 0;
  std::uint32_t max_codegree = 0;
  std::vector<std::size_t> degree_histogram;  // index = degree
};

/// Exact maximum degree, maximum codegree and degree histogram. Codegree is
/// accumulated over wedges, so the cost is O(sum_v deg(v)^2).
DegreeProfile degree_profile(const Graph& g);

/// True iff dist_G(u, v) >= k (truncated BFS to depth k-1).
bool dist_at_least(const Graph& g, std::uint32_t u, std::uint32_t v, std::uint32_t k);

/// k vertex-disjoint copies; copy c maps vertex v to c*n + v.
Graph disjoint_copies(const Graph& g, std::uint32_t k);

/// Induced subgraph on `keep` (strictly increasing vertex ids). Vertex i of
/// the result is keep[i].
Graph induced_subgraph(const Graph& g, std::span<const std::uint32_t> keep);

/// Threshold graph on a point cloud: edge whenever the pairwise separation
/// is <= threshold (distance for box/ball, angle for the sphere; both
/// closed conditions, boundary ties included). Cell-grid accelerated where
/// that wins; output is identical to the all-pairs scan.
Graph build_geometric_graph(const PointCloud& cloud, double threshold);

struct SharpnessResult {
  Graph graph;
  std::uint32_t realized_max_codegree = 0;
  std::size_t repair_steps = 0;
};

/// Disjoint cliques of size eta*delta overlaid with a (1-eta)*delta-regular
/// graph (pairing model; conflicting pairs are re-matched until the overlay
/// is simple and disjoint from the cliques). Every vertex ends at degree
/// delta-1 unless the overlay could not be realized, which throws.
SharpnessResult sharpness_construction(std::uint32_t n, std::uint32_t delta, double eta, Rng& rng);

struct RegularResult {
  Graph graph;
  int attempts = 0;
};

/// delta-regular simple graph resampled until the maximum codegree is at
/// most codegree_cap. Throws RetriesExhausted when the attempt budget runs out.
RegularResult random_regular_capped(std::uint32_t n, std::uint32_t delta,
                                    std::uint32_t codegree_cap, Rng& rng,
                                    int max_attempts = 64);

/// Bipartite point/hyperplane incidence graph of the 3-dimensional
/// projective geometry over GF(q), for q a prime or prime power <= 32.
/// Both sides have q^3+q^2+q+1 vertices; the graph is (q^2+q+1)-regular
/// with every same-side codegree exactly q+1. A deterministic test bed
/// with very large degree and provably tiny codegree.
Graph projective_incidence_graph(std::uint32_t q);

std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);
void save_graph_json(const Graph& g, const std::string& path);
Graph load_graph_json(const std::string& path);

// Binary format for large instances: u32 n, u32 m, then m little-endian
// (u32, u32) pairs with u < v, sorted.
void save_graph_binary(const Graph& g, const std::string& path);
Graph load_graph_binary(const std::string& path);

}  // namespace nibblepack
