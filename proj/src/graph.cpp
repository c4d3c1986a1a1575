#include "nibblepack/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <queue>

#include <json.hpp>

namespace nibblepack {

Graph Graph::from_edges(std::uint32_t n,
                        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  for (auto& [u, v] : edges) {
    NP_CHECK(u != v, "self-loop");
    NP_CHECK(u < n && v < n, "vertex id out of range");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  Graph g;
  g.n_ = n;
  std::vector<std::uint32_t> degree(n, 0);
  for (const auto& [u, v] : edges) {
    ++degree[u];
    ++degree[v];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::uint32_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + degree[v];
  g.adj_.resize(g.offsets_[n]);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    g.adj_[cursor[u]++] = v;
    g.adj_[cursor[v]++] = u;
  }
  // Edges were processed in sorted order, so each row is already sorted for
  // the first endpoint; the mirrored entries arrive sorted as well because
  // (u, v) pairs are globally sorted.
  return g;
}

Graph Graph::from_adjacency(std::vector<std::vector<std::uint32_t>> adjacency) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  const std::uint32_t n = static_cast<std::uint32_t>(adjacency.size());
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t v : adjacency[u]) {
      if (u < v) edges.emplace_back(u, v);
    }
  }
  return from_edges(n, std::move(edges));
}

bool Graph::has_edge(std::uint32_t u, std::uint32_t v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> Graph::edge_list() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(num_edges());
  for (std::uint32_t u = 0; u < n_; ++u) {
    for (std::uint32_t v : neighbors(u)) {
      if (v > u) edges.emplace_back(u, v);
    }
  }
  return edges;
}

DegreeProfile degree_profile(const Graph& g) {
  const std::uint32_t n = g.num_vertices();
  DegreeProfile profile;
  for (std::uint32_t v = 0; v < n; ++v) {
    profile.max_degree = std::max(profile.max_degree, g.degree(v));
  }
  profile.degree_histogram.assign(profile.max_degree + 1, 0);
  for (std::uint32_t v = 0; v < n; ++v) ++profile.degree_histogram[g.degree(v)];

  // Wedge accumulation: codegree(u, v) for v > u lands in count[v] while u
  // is pinned. Scratch is reset through the touched list only.
  std::vector<std::uint32_t> count(n, 0);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t w : g.neighbors(u)) {
      for (std::uint32_t v : g.neighbors(w)) {
        if (v <= u) continue;
        if (count[v] == 0) touched.push_back(v);
        ++count[v];
      }
    }
    for (std::uint32_t v : touched) {
      profile.max_codegree = std::max(profile.max_codegree, count[v]);
      count[v] = 0;
    }
    touched.clear();
  }
  return profile;
}

bool dist_at_least(const Graph& g, std::uint32_t u, std::uint32_t v, std::uint32_t k) {
  NP_CHECK(u != v, "dist_at_least needs distinct vertices");
  if (k == 0) return false;  // every distance is >= 0 but not >= anything past itself
  if (k == 1) return true;   // distinct vertices are at distance >= 1
  std::vector<std::uint32_t> dist(g.num_vertices(), UINT32_MAX);
  std::queue<std::uint32_t> frontier;
  dist[u] = 0;
  frontier.push(u);
  while (!frontier.empty()) {
    const std::uint32_t x = frontier.front();
    frontier.pop();
    if (dist[x] >= k - 1) continue;
    for (std::uint32_t y : g.neighbors(x)) {
      if (dist[y] != UINT32_MAX) continue;
      dist[y] = dist[x] + 1;
      if (y == v) return false;
      frontier.push(y);
    }
  }
  return true;
}

Graph disjoint_copies(const Graph& g, std::uint32_t k) {
  NP_CHECK(k >= 1, "need k >= 1 copies");
  const std::uint32_t n = g.num_vertices();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(g.num_edges() * k);
  const auto base = g.edge_list();
  for (std::uint32_t c = 0; c < k; ++c) {
    const std::uint32_t shift = c * n;
    for (const auto& [u, v] : base) edges.emplace_back(u + shift, v + shift);
  }
  return Graph::from_edges(n * k, std::move(edges));
}

Graph induced_subgraph(const Graph& g, std::span<const std::uint32_t> keep) {
  std::vector<std::uint32_t> new_id(g.num_vertices(), UINT32_MAX);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    NP_CHECK(i == 0 || keep[i] > keep[i - 1], "keep list must be strictly increasing");
    new_id[keep[i]] = static_cast<std::uint32_t>(i);
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t old_u : keep) {
    const std::uint32_t u = new_id[old_u];
    for (std::uint32_t old_v : g.neighbors(old_u)) {
      if (old_v <= old_u) continue;
      const std::uint32_t v = new_id[old_v];
      if (v != UINT32_MAX) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(static_cast<std::uint32_t>(keep.size()), std::move(edges));
}

std::string graph_to_json(const Graph& g) {
  nlohmann::ordered_json j;
  j["n"] = g.num_vertices();
  auto edges = nlohmann::ordered_json::array();
  for (const auto& [u, v] : g.edge_list()) {
    edges.push_back(nlohmann::ordered_json::array({u, v}));
  }
  j["edges"] = std::move(edges);
  return j.dump();
}

Graph graph_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const std::uint32_t n = j.at("n").get<std::uint32_t>();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const auto& e : j.at("edges")) {
    if (e.size() != 2) throw ConfigError("edge must be a pair");
    edges.emplace_back(e[0].get<std::uint32_t>(), e[1].get<std::uint32_t>());
  }
  return Graph::from_edges(n, std::move(edges));
}

void save_graph_json(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << graph_to_json(g) << '\n';
}

Graph load_graph_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return graph_from_json(text);
}

namespace {
void put_u32(std::ofstream& out, std::uint32_t x) {
  unsigned char b[4] = {static_cast<unsigned char>(x), static_cast<unsigned char>(x >> 8),
                        static_cast<unsigned char>(x >> 16), static_cast<unsigned char>(x >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}
std::uint32_t get_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw ConfigError("truncated binary graph file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}
}  // namespace

void save_graph_binary(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  NP_CHECK(g.num_edges() <= UINT32_MAX, "too many edges for the binary format");
  put_u32(out, g.num_vertices());
  put_u32(out, static_cast<std::uint32_t>(g.num_edges()));
  for (const auto& [u, v] : g.edge_list()) {
    put_u32(out, u);
    put_u32(out, v);
  }
}

Graph load_graph_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path);
  const std::uint32_t n = get_u32(in);
  const std::uint32_t m = get_u32(in);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(m);
  for (std::uint32_t i = 0; i < m; ++i) {
    const std::uint32_t u = get_u32(in);
    const std::uint32_t v = get_u32(in);
    edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, std::move(edges));
}

}  // namespace nibblepack
