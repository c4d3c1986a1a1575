#include "nibblepack/pointproc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nibblepack/geometry.hpp"
#include "nibblepack/graph.hpp"

namespace nibblepack {

namespace {

void append_uniform_point(const Domain& domain, Rng& rng, std::vector<double>& out) {
  const int d = domain.dim;
  switch (domain.kind) {
    case DomainKind::PeriodicBox:
      for (int i = 0; i < d; ++i) out.push_back(rng.uniform01() * domain.param);
      break;
    case DomainKind::Ball: {
      // Direction from normalized Gaussians, radius via inverse CDF.
      double norm_sq = 0.0;
      const std::size_t base = out.size();
      for (int i = 0; i < d; ++i) {
        const double g = rng.normal();
        out.push_back(g);
        norm_sq += g * g;
      }
      const double r = domain.param * std::pow(rng.uniform01(), 1.0 / d);
      const double scale = norm_sq > 0.0 ? r / std::sqrt(norm_sq) : 0.0;
      for (int i = 0; i < d; ++i) out[base + i] *= scale;
      break;
    }
    case DomainKind::UnitSphere: {
      double norm_sq = 0.0;
      const std::size_t base = out.size();
      for (int i = 0; i < d; ++i) {
        const double g = rng.normal();
        out.push_back(g);
        norm_sq += g * g;
      }
      double inv = 1.0 / std::sqrt(norm_sq);
      for (int i = 0; i < d; ++i) out[base + i] *= inv;
      // Renormalize once more so the unit-norm invariant holds to 1e-12.
      double check = 0.0;
      for (int i = 0; i < d; ++i) check += out[base + i] * out[base + i];
      inv = 1.0 / std::sqrt(check);
      for (int i = 0; i < d; ++i) out[base + i] *= inv;
      break;
    }
  }
}

}  // namespace

PointCloud sample_poisson(const Domain& domain, double intensity, Rng& rng,
                          double max_expected_points) {
  if (intensity < 0.0) throw ConfigError("intensity must be >= 0");
  const double mean = intensity * domain.measure();
  if (mean > max_expected_points) {
    throw CapacityError("expected point count " + std::to_string(mean) +
                        " exceeds the budget of " + std::to_string(max_expected_points));
  }
  PointCloud cloud;
  cloud.domain = domain;
  cloud.seed = rng.seed();
  const std::uint64_t count = rng.poisson(mean);
  cloud.coords.reserve(count * domain.dim);
  for (std::uint64_t i = 0; i < count; ++i) append_uniform_point(domain, rng, cloud.coords);
  canonicalize(cloud);
  return cloud;
}

PruneResult prune(const PointCloud& cloud, const PruneSpec& spec) {
  if (spec.degree_cap < 0.0 || spec.codegree_cap < 0.0) {
    throw ConfigError("prune caps must be >= 0");
  }
  const std::size_t n = cloud.size();
  const bool spherical = cloud.domain.kind == DomainKind::UnitSphere;

  // Interaction graph at the threshold and a wider graph for candidate
  // pairs; beyond twice the interaction range two regions cannot overlap.
  const Graph near = build_geometric_graph(cloud, spec.interaction);
  const double wide_threshold =
      spherical ? std::min(2.0 * spec.interaction, std::numbers::pi) : 2.0 * spec.interaction;
  const Graph wide = build_geometric_graph(cloud, wide_threshold);

  std::vector<char> bad_degree(n, 0), bad_pair(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    // Graph degree >= degree_cap, i.e. |X ∩ region(x)| >= degree_cap + 1.
    if (static_cast<double>(near.degree(static_cast<std::uint32_t>(x))) >= spec.degree_cap) {
      bad_degree[x] = 1;
    }
  }
  if (spec.codegree_cap <= 0.0 && n >= 2) {
    // Zero points are allowed in a shared region, and every pair shares an
    // (empty) region, so everything goes.
    std::fill(bad_pair.begin(), bad_pair.end(), 1);
  }

  // closed_nbhd(x) = {x} ∪ N(x), sorted; the pair count is the size of the
  // intersection of two closed neighborhoods.
  auto closed_neighborhood = [&](std::uint32_t v) {
    const auto nb = near.neighbors(v);
    std::vector<std::uint32_t> closed;
    closed.reserve(nb.size() + 1);
    auto it = nb.begin();
    while (it != nb.end() && *it < v) closed.push_back(*it++);
    closed.push_back(v);
    while (it != nb.end()) closed.push_back(*it++);
    return closed;
  };

  std::vector<std::vector<std::uint32_t>> closed(n);
  for (std::size_t x = 0; x < n; ++x) closed[x] = closed_neighborhood(static_cast<std::uint32_t>(x));

  for (std::uint32_t x = 0; x < n; ++x) {
    for (std::uint32_t y : wide.neighbors(x)) {
      if (y < x) continue;
      std::size_t common = 0;
      const auto& a = closed[x];
      const auto& b = closed[y];
      for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
        if (a[i] < b[j]) {
          ++i;
        } else if (a[i] > b[j]) {
          ++j;
        } else {
          ++common;
          ++i;
          ++j;
        }
      }
      if (static_cast<double>(common) >= spec.codegree_cap) {
        bad_pair[x] = 1;
        bad_pair[y] = 1;
      }
    }
  }

  PruneResult result;
  result.kept.domain = cloud.domain;
  result.kept.seed = cloud.seed;
  const int d = cloud.domain.dim;
  for (std::size_t x = 0; x < n; ++x) {
    if (bad_degree[x]) {
      ++result.removed_degree;
    } else if (bad_pair[x]) {
      ++result.removed_codegree;
    } else {
      const double* p = cloud.coords.data() + x * d;
      result.kept.coords.insert(result.kept.coords.end(), p, p + d);
    }
  }

  // Removal is monotone: deleting points only shrinks counts, so the caps
  // hold on the kept set. Verified, not assumed.
  if (result.kept.size() > 0) {
    const Graph check = build_geometric_graph(result.kept, spec.interaction);
    const DegreeProfile profile = degree_profile(check);
    NP_CHECK(static_cast<double>(profile.max_degree) < spec.degree_cap,
             "kept set still has a degree violation");
    if (result.kept.size() > 1) {
      NP_CHECK(static_cast<double>(profile.max_codegree) < spec.codegree_cap,
               "kept set still has a codegree violation");
    }
  }
  return result;
}

double poisson_tail_bound(double mean, double t) {
  NP_CHECK(mean > 0.0, "mean must be > 0");
  NP_CHECK(t > 0.0, "t must be > 0");
  return std::exp(-std::min(t, t * t) * mean / 3.0);
}

ProcessPreset preset_packing(int dim) {
  NP_CHECK(dim >= 2, "needs dim >= 2");
  ProcessPreset preset;
  const double log_d = std::log(static_cast<double>(dim));
  preset.intensity = std::exp(dim * (0.5 * std::log(static_cast<double>(dim)) -
                                     std::log(8.0 * log_d)));
  const double degree_target = std::exp2(dim) * preset.intensity;
  preset.interaction = 2.0 * geometry::unit_ball_radius(dim);
  preset.degree_cap = degree_target * (1.0 + std::pow(degree_target, -1.0 / 3.0));
  preset.codegree_cap = degree_target * std::exp(-log_d * log_d / 8.0);
  return preset;
}

ProcessPreset preset_spherical(int dim, double theta) {
  NP_CHECK(dim >= 2, "needs dim >= 2");
  if (theta <= 0.0 || theta >= std::numbers::pi / 2.0) {
    throw ConfigError("spherical preset needs theta in (0, pi/2)");
  }
  ProcessPreset preset;
  const double log_d = std::log(static_cast<double>(dim));
  preset.intensity = std::exp(dim * (0.5 * std::log(static_cast<double>(dim)) -
                                     std::log(2.0 * log_d)));
  const double cap = geometry::cap_area(dim, theta);
  const double degree_target = cap * preset.intensity;
  preset.interaction = theta;
  preset.degree_cap = degree_target * (1.0 + std::pow(degree_target, -1.0 / 3.0));
  const double cot = std::cos(theta) / std::sin(theta);
  preset.codegree_cap = 2.0 * degree_target * std::exp(-(cot * cot / 16.0) * log_d * log_d);
  return preset;
}

MeckeReport mecke_check(const Domain& domain, double intensity, const PointPredicate& predicate,
                        int integrand_samples, int process_samples, Rng& rng) {
  if (integrand_samples <= 1 || process_samples <= 1) {
    throw ConfigError("mecke_check needs at least 2 samples per side");
  }
  MeckeReport report;

  {  // lhs: count points of a fresh process satisfying the predicate
    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < process_samples; ++s) {
      Rng draw = rng.derive(0xA11CE + s);
      const PointCloud cloud = sample_poisson(domain, intensity, draw);
      std::size_t count = 0;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (predicate(cloud.point(i), cloud)) ++count;
      }
      sum += static_cast<double>(count);
      sum_sq += static_cast<double>(count) * static_cast<double>(count);
    }
    const double mean = sum / process_samples;
    const double var = std::max(0.0, sum_sq / process_samples - mean * mean);
    report.lhs.value = mean;
    report.lhs.std_error = std::sqrt(var / process_samples);
  }

  {  // rhs: fresh process plus an independent uniform insertion point
    const double scale = intensity * domain.measure();
    double sum = 0.0;
    for (int s = 0; s < integrand_samples; ++s) {
      Rng draw = rng.derive(0xB0B + s);
      PointCloud cloud = sample_poisson(domain, intensity, draw);
      std::vector<double> x;
      append_uniform_point(domain, draw, x);
      cloud.coords.insert(cloud.coords.end(), x.begin(), x.end());
      const bool hit = predicate({x.data(), x.size()}, cloud);
      sum += hit ? 1.0 : 0.0;
    }
    const double p_hat = sum / integrand_samples;
    report.rhs.value = scale * p_hat;
    report.rhs.std_error = scale * std::sqrt(p_hat * (1.0 - p_hat) / integrand_samples);
  }
  return report;
}

}  // namespace nibblepack
