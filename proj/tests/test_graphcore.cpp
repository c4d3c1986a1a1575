#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include <doctest.h>

#include "nibblepack/analysis.hpp"
#include "nibblepack/graph.hpp"
#include "nibblepack/pointproc.hpp"
#include "oracles.hpp"

using namespace nibblepack;

namespace {

Graph complete_graph(std::uint32_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, std::move(edges));
}

bool same_edge_set(const Graph& a, const Graph& b) {
  return a.num_vertices() == b.num_vertices() && a.edge_list() == b.edge_list();
}

}  // namespace

TEST_CASE("threshold boundary is a closed condition") {
  PointCloud cloud;
  cloud.domain = Domain::periodic_box(1, 10.0);
  cloud.coords = {1.0, 3.0};  // distance exactly 2
  const Graph g = build_geometric_graph(cloud, 2.0);
  CHECK(g.num_edges() == 1);
  CHECK(g.has_edge(0, 1));
  const Graph g2 = build_geometric_graph(cloud, 1.9999999);
  CHECK(g2.num_edges() == 0);
}

TEST_CASE("single point gives an edgeless graph") {
  PointCloud cloud;
  cloud.domain = Domain::ball(3, 1.0);
  cloud.coords = {0.1, 0.2, 0.3};
  const Graph g = build_geometric_graph(cloud, 0.5);
  CHECK(g.num_vertices() == 1);
  CHECK(g.num_edges() == 0);
}

TEST_CASE("torus cell grid equals brute force on 1e3 points") {
  Rng rng(321);
  const Domain domain = Domain::periodic_box(3, 1.0);
  const auto cloud = sample_poisson(domain, 1000.0, rng);
  const Graph fast = build_geometric_graph(cloud, 0.2);
  const Graph brute = oracles::geometric_graph_brute(cloud, 0.2);
  CHECK(same_edge_set(fast, brute));
  CHECK(fast.num_edges() > 0);
}

TEST_CASE("geometric graph equals brute force across domains and sizes") {
  Rng rng(5551);
  for (int trial = 0; trial < 30; ++trial) {
    const int pick = trial % 3;
    const int dim = 2 + static_cast<int>(rng.uniform_below(3));
    Domain domain = pick == 0   ? Domain::periodic_box(dim, 1.0 + rng.uniform01())
                    : pick == 1 ? Domain::ball(dim, 1.0)
                                : Domain::unit_sphere(dim);
    const double mean_points = 100.0 + rng.uniform01() * 1900.0;
    const double intensity = mean_points / domain.measure();
    Rng draw = rng.derive(trial);
    const auto cloud = sample_poisson(domain, intensity, draw);
    const double threshold = pick == 2 ? 0.3 + rng.uniform01() * 0.8
                                       : (0.05 + rng.uniform01() * 0.3) * domain.param;
    const Graph fast = build_geometric_graph(cloud, threshold);
    const Graph brute = oracles::geometric_graph_brute(cloud, threshold);
    REQUIRE(same_edge_set(fast, brute));
  }
}

TEST_CASE("wraparound shows up in the torus metric") {
  PointCloud cloud;
  cloud.domain = Domain::periodic_box(2, 10.0);
  cloud.coords = {0.5, 5.0, 9.5, 5.0};  // distance 1 across the seam
  const Graph g = build_geometric_graph(cloud, 1.5);
  CHECK(g.num_edges() == 1);
}

TEST_CASE("degree profile on canned graphs") {
  const Graph k5 = complete_graph(5);
  const auto p5 = degree_profile(k5);
  CHECK(p5.max_degree == 4);
  CHECK(p5.max_codegree == 3);
  CHECK(p5.degree_histogram[4] == 5);

  const Graph edgeless = Graph::from_edges(7, {});
  const auto pe = degree_profile(edgeless);
  CHECK(pe.max_degree == 0);
  CHECK(pe.max_codegree == 0);

  for (std::uint32_t n : {6, 9}) {
    const auto p = degree_profile(complete_graph(n));
    CHECK(p.max_degree == n - 1);
    CHECK(p.max_codegree == n - 2);
  }
}

TEST_CASE("degree profile codegree agrees with the per-pair recount") {
  Rng rng(808);
  for (int trial = 0; trial < 100; ++trial) {
    Rng draw = rng.derive(trial);
    const Graph g = oracles::gnp(30 + draw.uniform_below(30), 0.15, draw);
    REQUIRE(degree_profile(g).max_codegree == oracles::max_codegree_brute(g));
  }
}

TEST_CASE("dist_at_least basics") {
  // Path 0-1-2-3-4.
  const Graph path = Graph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  CHECK(!dist_at_least(path, 0, 1, 2));  // adjacent
  CHECK(dist_at_least(path, 0, 4, 4));   // distance exactly 4
  CHECK(!dist_at_least(path, 0, 4, 5));
  CHECK(dist_at_least(path, 0, 3, 3));
  CHECK(!dist_at_least(path, 0, 3, 4));

  const Graph two = Graph::from_edges(4, {{0, 1}, {2, 3}});
  CHECK(dist_at_least(two, 0, 2, 4));
  CHECK(dist_at_least(two, 0, 2, 100));
}

TEST_CASE("disjoint copies preserve local structure") {
  const Graph k3 = complete_graph(3);
  const Graph one = disjoint_copies(k3, 1);
  CHECK(same_edge_set(one, k3));

  const Graph two = disjoint_copies(k3, 2);
  CHECK(two.num_vertices() == 6);
  CHECK(two.num_edges() == 6);
  const auto profile = degree_profile(two);
  CHECK(profile.max_degree == 2);
  CHECK(profile.max_codegree == 1);

  // MIS scales exactly with the number of copies.
  Rng rng(2718);
  const Graph base = oracles::gnp(8, 0.4, rng);
  const auto single = brute_force_mis(base);
  const auto tripled = brute_force_mis(disjoint_copies(base, 3));
  CHECK(tripled.size == 3 * single.size);
}

TEST_CASE("sharpness construction with eta=1 is a clique partition") {
  Rng rng(11);
  const auto built = sharpness_construction(24, 4, 1.0, rng);
  CHECK(built.graph.num_vertices() == 24);
  CHECK(built.graph.num_edges() == 6 * 6);  // 6 cliques of K4
  const auto mis = brute_force_mis(built.graph);
  CHECK(mis.size == 6);  // one vertex per clique
  CHECK(built.realized_max_codegree == 2);
}

TEST_CASE("sharpness construction degrees are exactly delta-1") {
  Rng rng(77);
  const auto built = sharpness_construction(240, 12, 1.0 / 3.0, rng);
  REQUIRE(built.graph.num_vertices() == 240);
  for (std::uint32_t v = 0; v < 240; ++v) {
    REQUIRE(built.graph.degree(v) == 11);  // 3 clique + 8 overlay
  }
  // Overlay must not duplicate clique edges: edge count pins this down.
  CHECK(built.graph.num_edges() == 60 * 6 + 240 * 8 / 2);
}

TEST_CASE("sharpness MIS is at most n/(eta*delta) plus the overlay defect") {
  Rng rng(3333);
  for (int trial = 0; trial < 5; ++trial) {
    Rng draw = rng.derive(trial);
    // n=24, delta=6, eta=1/2: cliques of size 3.
    const auto built = sharpness_construction(24, 6, 0.5, draw);
    const auto mis = brute_force_mis(built.graph);
    CHECK(mis.size <= 24 / 3);
    CHECK(mis.size >= 24 / 6);  // trivial floor keeps the check two-sided
  }
}

TEST_CASE("sharpness input validation") {
  Rng rng(4);
  CHECK_THROWS_AS(sharpness_construction(240, 12, 0.3, rng), ConfigError);   // 3.6 not integral
  CHECK_THROWS_AS(sharpness_construction(241, 12, 0.25, rng), ConfigError);  // 241 % 3 != 0
}

TEST_CASE("random regular graph with a codegree cap, small case") {
  Rng rng(55);
  const auto built = random_regular_capped(10, 3, 2, rng);
  CHECK(built.graph.num_vertices() == 10);
  for (std::uint32_t v = 0; v < 10; ++v) REQUIRE(built.graph.degree(v) == 3);
  CHECK(degree_profile(built.graph).max_codegree <= 2);
  CHECK(oracles::max_codegree_brute(built.graph) <= 2);
}

TEST_CASE("degree zero regular graph is edgeless") {
  Rng rng(56);
  const auto built = random_regular_capped(8, 0, 0, rng);
  CHECK(built.graph.num_edges() == 0);
}

TEST_CASE("random regular rejects impossible inputs") {
  Rng rng(57);
  CHECK_THROWS_AS(random_regular_capped(5, 3, 2, rng), ConfigError);  // odd degree sum
  // Unreachable cap: triangle-free 4-regular on 6 vertices does not exist
  // (any 4-regular graph on 6 vertices is K_{3,3}-like with codegree >= 2).
  CHECK_THROWS_AS(random_regular_capped(6, 4, 0, rng, 8), RetriesExhausted);
}

TEST_CASE("random regular meets moderate caps quickly (calibrated)") {
  // Pilot-calibrated: at n=1e4, delta=64 the max codegree concentrates
  // around 8, so cap=9 succeeds almost always. (A cap of 4 at this size is
  // essentially unreachable: ~4e3 pairs sit at codegree 5 or more in
  // expectation.)
  int ok = 0;
  for (int seed = 0; seed < 5; ++seed) {
    Rng rng(42000 + seed);
    try {
      const auto built = random_regular_capped(10000, 64, 9, rng, 20);
      if (built.attempts <= 20) ++ok;
    } catch (const RetriesExhausted&) {
    }
  }
  CHECK(ok >= 4);
}

TEST_CASE("projective incidence graph, tiny fields") {
  // q=2: 15 points, 15 planes of the binary 3-space geometry; degree
  // q^2+q+1 = 7, same-side codegree q+1 = 3.
  const Graph g2 = projective_incidence_graph(2);
  CHECK(g2.num_vertices() == 30);
  for (std::uint32_t v = 0; v < g2.num_vertices(); ++v) REQUIRE(g2.degree(v) == 7);
  CHECK(degree_profile(g2).max_codegree == 3);
  CHECK(oracles::max_codegree_brute(g2) == 3);

  const Graph g3 = projective_incidence_graph(3);
  CHECK(g3.num_vertices() == 80);
  for (std::uint32_t v = 0; v < g3.num_vertices(); ++v) REQUIRE(g3.degree(v) == 13);
  CHECK(degree_profile(g3).max_codegree == 4);

  // Prime power: GF(4).
  const Graph g4 = projective_incidence_graph(4);
  CHECK(g4.num_vertices() == 2 * (64 + 16 + 4 + 1));
  for (std::uint32_t v = 0; v < g4.num_vertices(); ++v) REQUIRE(g4.degree(v) == 21);
  CHECK(degree_profile(g4).max_codegree == 5);
}

TEST_CASE("graph json round trip is bit identical") {
  Rng rng(230);
  const Graph g = oracles::gnp(40, 0.2, rng);
  const std::string text = graph_to_json(g);
  const Graph back = graph_from_json(text);
  CHECK(same_edge_set(g, back));
  CHECK(graph_to_json(back) == text);
}

TEST_CASE("graph binary round trip") {
  Rng rng(231);
  const Graph g = oracles::gnp(64, 0.15, rng);
  const auto path = std::filesystem::temp_directory_path() / "np_test_graph.bin";
  save_graph_binary(g, path.string());
  const Graph back = load_graph_binary(path.string());
  CHECK(same_edge_set(g, back));
  std::filesystem::remove(path);
}

TEST_CASE("induced subgraph keeps exactly the chosen rows") {
  const Graph g = complete_graph(6);
  const std::vector<std::uint32_t> keep = {1, 3, 4};
  const Graph sub = induced_subgraph(g, keep);
  CHECK(sub.num_vertices() == 3);
  CHECK(sub.num_edges() == 3);

  const Graph path = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  const std::vector<std::uint32_t> ends = {0, 3};
  const Graph sub2 = induced_subgraph(path, ends);
  CHECK(sub2.num_edges() == 0);
}

TEST_CASE("from_edges rejects malformed input") {
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 0}}), InternalCheckFailure);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 5}}), InternalCheckFailure);
  // Duplicates collapse.
  const Graph g = Graph::from_edges(3, {{0, 1}, {1, 0}, {0, 1}});
  CHECK(g.num_edges() == 1);
}
