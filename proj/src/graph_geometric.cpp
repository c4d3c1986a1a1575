#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "nibblepack/graph.hpp"

namespace nibblepack {

namespace {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

bool within_threshold(const PointCloud& cloud, std::size_t i, std::size_t j, double threshold,
                      double cos_threshold) {
  const double* a = cloud.coords.data() + i * cloud.domain.dim;
  const double* b = cloud.coords.data() + j * cloud.domain.dim;
  if (cloud.domain.kind == DomainKind::UnitSphere) {
    // Closed condition <x,y> >= cos(theta), compared in dot space.
    double dot = 0.0;
    for (int k = 0; k < cloud.domain.dim; ++k) dot += a[k] * b[k];
    return dot >= cos_threshold;
  }
  return pair_distance(cloud.domain, a, b) <= threshold;
}

std::vector<Edge> brute_force_edges(const PointCloud& cloud, double threshold,
                                    double cos_threshold) {
  std::vector<Edge> edges;
  const std::size_t n = cloud.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (within_threshold(cloud, i, j, threshold, cos_threshold)) {
        edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      }
    }
  }
  return edges;
}

struct CellGrid {
  int dim = 0;
  std::uint32_t cells_per_axis = 1;
  double origin = 0.0;
  double inv_side = 1.0;
  bool wrap = false;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;

  std::uint64_t key_of(const double* p) const {
    std::uint64_t key = 0;
    for (int a = 0; a < dim; ++a) {
      auto c = static_cast<std::int64_t>((p[a] - origin) * inv_side);
      c = std::clamp<std::int64_t>(c, 0, cells_per_axis - 1);
      key = key * cells_per_axis + static_cast<std::uint64_t>(c);
    }
    return key;
  }
};

std::vector<Edge> grid_edges(const PointCloud& cloud, double threshold, double cos_threshold,
                             double extent, double origin, bool wrap) {
  const int d = cloud.domain.dim;
  const std::size_t n = cloud.size();
  CellGrid grid;
  grid.dim = d;
  grid.cells_per_axis =
      std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::floor(extent / threshold)));
  grid.origin = origin;
  grid.inv_side = grid.cells_per_axis / extent;
  grid.wrap = wrap;
  for (std::size_t i = 0; i < n; ++i) {
    grid.buckets[grid.key_of(cloud.coords.data() + i * d)].push_back(
        static_cast<std::uint32_t>(i));
  }

  const std::uint32_t m = grid.cells_per_axis;
  std::vector<Edge> edges;
  std::vector<std::int64_t> cell(d);
  std::vector<std::vector<std::uint32_t>> axis_values(d);
  std::vector<std::size_t> odo(d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = cloud.coords.data() + i * d;
    for (int a = 0; a < d; ++a) {
      auto c = static_cast<std::int64_t>((p[a] - origin) * grid.inv_side);
      cell[a] = std::clamp<std::int64_t>(c, 0, m - 1);
      auto& values = axis_values[a];
      values.clear();
      for (std::int64_t off = -1; off <= 1; ++off) {
        std::int64_t cc = cell[a] + off;
        if (wrap) {
          cc = (cc % m + m) % m;
        } else if (cc < 0 || cc >= static_cast<std::int64_t>(m)) {
          continue;
        }
        values.push_back(static_cast<std::uint32_t>(cc));
      }
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
    }
    // Odometer over the per-axis neighbor coordinates.
    std::fill(odo.begin(), odo.end(), 0);
    while (true) {
      std::uint64_t key = 0;
      for (int a = 0; a < d; ++a) key = key * m + axis_values[a][odo[a]];
      auto it = grid.buckets.find(key);
      if (it != grid.buckets.end()) {
        for (std::uint32_t j : it->second) {
          if (j > i && within_threshold(cloud, i, j, threshold, cos_threshold)) {
            edges.emplace_back(static_cast<std::uint32_t>(i), j);
          }
        }
      }
      int a = d - 1;
      while (a >= 0 && ++odo[a] == axis_values[a].size()) odo[a--] = 0;
      if (a < 0) break;
    }
  }
  return edges;
}

}  // namespace

Graph build_geometric_graph(const PointCloud& cloud, double threshold) {
  NP_CHECK(threshold > 0.0, "threshold must be > 0");
  const int d = cloud.domain.dim;
  const std::size_t n = cloud.size();
  NP_CHECK(n <= UINT32_MAX, "too many points");

  const double cos_threshold =
      cloud.domain.kind == DomainKind::UnitSphere ? std::cos(std::min(threshold, 3.2)) : 0.0;

  // The grid pays off only when the 3^d neighbor-cell scan beats n per point.
  double offsets = 1.0;
  for (int a = 0; a < d && offsets < 1e9; ++a) offsets *= 3.0;
  const bool grid_worthwhile = n >= 512 && offsets * 4.0 < static_cast<double>(n);

  std::vector<Edge> edges;
  switch (cloud.domain.kind) {
    case DomainKind::PeriodicBox:
      edges = grid_worthwhile
                  ? grid_edges(cloud, threshold, cos_threshold, cloud.domain.param, 0.0, true)
                  : brute_force_edges(cloud, threshold, cos_threshold);
      break;
    case DomainKind::Ball:
      edges = grid_worthwhile
                  ? grid_edges(cloud, threshold, cos_threshold, 2.0 * cloud.domain.param,
                               -cloud.domain.param, false)
                  : brute_force_edges(cloud, threshold, cos_threshold);
      break;
    case DomainKind::UnitSphere: {
      // Chord-space grid once clouds get large; all-pairs is exact and fast
      // enough below 1e5 points.
      const double chord = 2.0 * std::sin(std::min(threshold, 3.141592653589793) / 2.0);
      if (n > 100000 && grid_worthwhile && chord < 1.0) {
        edges = grid_edges(cloud, chord, cos_threshold, 2.0, -1.0, false);
      } else {
        edges = brute_force_edges(cloud, threshold, cos_threshold);
      }
      break;
    }
  }
  return Graph::from_edges(static_cast<std::uint32_t>(n), std::move(edges));
}

}  // namespace nibblepack
