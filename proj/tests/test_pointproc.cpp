#include <array>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "nibblepack/geometry.hpp"
#include "nibblepack/pointproc.hpp"
#include "oracles.hpp"

using namespace nibblepack;

TEST_CASE("zero intensity gives an empty cloud") {
  Rng rng(1);
  const auto cloud = sample_poisson(Domain::periodic_box(3, 2.0), 0.0, rng);
  CHECK(cloud.size() == 0);
}

TEST_CASE("poisson count matches its mean on a box") {
  // d=2, L=2, intensity 5: mean count 20. Mean of 1e4 draws within
  // 3*sqrt(20/1e4) of 20.
  const Domain domain = Domain::periodic_box(2, 2.0);
  Rng rng(12345);
  double total = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Rng draw = rng.derive(i);
    total += static_cast<double>(sample_poisson(domain, 5.0, draw).size());
  }
  const double mean = total / draws;
  CHECK(std::fabs(mean - 20.0) <= 3.0 * std::sqrt(20.0 / draws));
}

TEST_CASE("poisson count variance matches the mean") {
  const Domain domain = Domain::periodic_box(2, 2.0);
  Rng rng(777);
  const int draws = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    Rng draw = rng.derive(i);
    const double c = static_cast<double>(sample_poisson(domain, 5.0, draw).size());
    sum += c;
    sum_sq += c * c;
  }
  const double mean = sum / draws;
  const double var = sum_sq / draws - mean * mean;
  // Var(Po(20)) = 20; allow ~4 sigma of sampling noise on the variance.
  CHECK(std::fabs(var - 20.0) <= 4.0 * std::sqrt(2.0 * 20.0 * 20.0 / draws + 20.0 / draws));
}

TEST_CASE("sphere samples are unit norm and the count is Poisson(intensity)") {
  Rng rng(9);
  const auto cloud = sample_poisson(Domain::unit_sphere(3), 1000.0, rng);
  CHECK(cloud.size() > 800);
  CHECK(cloud.size() < 1200);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double norm = 0.0;
    for (double x : cloud.point(i)) norm += x * x;
    REQUIRE(std::fabs(std::sqrt(norm) - 1.0) <= 1e-12);
  }
}

TEST_CASE("ball samples stay inside and are not clumped at the center") {
  Rng rng(5150);
  const Domain domain = Domain::ball(3, 2.0);
  const auto cloud = sample_poisson(domain, 400.0 / domain.measure(), rng);
  std::size_t inner = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double norm_sq = 0.0;
    for (double x : cloud.point(i)) norm_sq += x * x;
    REQUIRE(norm_sq <= 4.0 * (1.0 + 1e-12));
    if (norm_sq <= 1.0) ++inner;  // radius 1 holds 1/8 of the volume
  }
  CHECK(cloud.size() > 300);
  const double frac = static_cast<double>(inner) / cloud.size();
  CHECK(frac < 0.25);
  CHECK(frac > 0.04);
}

TEST_CASE("capacity budget is enforced") {
  Rng rng(2);
  CHECK_THROWS_AS(sample_poisson(Domain::periodic_box(2, 10.0), 1e9, rng), CapacityError);
}

TEST_CASE("sub-box counts are independent (chi-square at 1e-3)") {
  // Counts in the left and right halves of a box, binned into quartile-ish
  // classes, then a contingency-table test; chi^2_{9, 0.999} = 27.877.
  const Domain domain = Domain::periodic_box(2, 2.0);
  Rng rng(31415);
  const int draws = 10000;
  auto bin = [](std::size_t c) {
    if (c <= 7) return 0;
    if (c <= 9) return 1;
    if (c <= 12) return 2;
    return 3;
  };
  std::array<std::array<double, 4>, 4> table{};
  for (int i = 0; i < draws; ++i) {
    Rng draw = rng.derive(i);
    const auto cloud = sample_poisson(domain, 5.0, draw);
    std::size_t left = 0;
    for (std::size_t p = 0; p < cloud.size(); ++p) {
      if (cloud.point(p)[0] < 1.0) ++left;
    }
    table[bin(left)][bin(cloud.size() - left)] += 1.0;
  }
  std::array<double, 4> row_sum{}, col_sum{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      row_sum[r] += table[r][c];
      col_sum[c] += table[r][c];
    }
  }
  double chi_sq = 0.0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const double expected = row_sum[r] * col_sum[c] / draws;
      REQUIRE(expected > 5.0);
      chi_sq += (table[r][c] - expected) * (table[r][c] - expected) / expected;
    }
  }
  CHECK(chi_sq < 27.877);
}

TEST_CASE("prune keeps sparse clouds untouched") {
  PointCloud cloud;
  cloud.domain = Domain::periodic_box(2, 10.0);
  for (double x : {1.0, 4.0, 7.0}) {
    for (double y : {1.0, 4.0, 7.0}) {
      cloud.coords.push_back(x);
      cloud.coords.push_back(y);
    }
  }
  const auto result = prune(cloud, {0.5, 3.0, 2.0});
  CHECK(result.kept.size() == cloud.size());
  CHECK(result.removed_degree == 0);
  CHECK(result.removed_codegree == 0);
}

TEST_CASE("prune removes exactly an overcrowded cluster") {
  // Six points inside one interaction ball plus ten isolated ones;
  // degree cap 3 kills exactly the cluster.
  PointCloud cloud;
  cloud.domain = Domain::periodic_box(2, 100.0);
  for (int i = 0; i < 6; ++i) {
    cloud.coords.push_back(50.0 + 0.01 * i);
    cloud.coords.push_back(50.0);
  }
  for (int i = 0; i < 10; ++i) {
    cloud.coords.push_back(5.0 + 8.0 * i);
    cloud.coords.push_back(5.0);
  }
  PruneSpec spec;
  spec.interaction = 1.0;
  spec.degree_cap = 3.0;
  spec.codegree_cap = 1e18;
  const auto result = prune(cloud, spec);
  CHECK(result.kept.size() == 10);
  CHECK(result.removed_degree == 6);

  // Brute-force recount of the degree condition on the original cloud.
  const auto g = oracles::geometric_graph_brute(cloud, spec.interaction);
  std::size_t expected_removed = 0;
  for (std::uint32_t v = 0; v < g.num_vertices(); ++v) {
    if (g.degree(v) >= 3) ++expected_removed;
  }
  CHECK(expected_removed == result.removed_degree);
}

TEST_CASE("prune codegree condition against a brute-force recount") {
  Rng rng(606);
  const Domain domain = Domain::periodic_box(2, 6.0);
  const auto cloud = sample_poisson(domain, 4.0, rng);
  PruneSpec spec;
  spec.interaction = 1.0;
  spec.degree_cap = 9.0;
  spec.codegree_cap = 5.0;
  const auto result = prune(cloud, spec);

  const std::size_t n = cloud.size();
  const auto g = oracles::geometric_graph_brute(cloud, spec.interaction);
  std::size_t removed = 0;
  for (std::uint32_t x = 0; x < n; ++x) {
    bool bad = g.degree(x) >= 9;
    for (std::uint32_t y = 0; y < n && !bad; ++y) {
      if (y == x) continue;
      std::size_t common = 0;
      for (std::uint32_t z = 0; z < n; ++z) {
        const bool near_x = z == x || g.has_edge(x, z);
        const bool near_y = z == y || g.has_edge(y, z);
        if (near_x && near_y) ++common;
      }
      if (common >= 5) bad = true;
    }
    if (bad) ++removed;
  }
  CHECK(cloud.size() - result.kept.size() == removed);
}

TEST_CASE("prune is idempotent and monotone in the caps") {
  Rng rng(13);
  const auto cloud = sample_poisson(Domain::periodic_box(2, 5.0), 6.0, rng);
  PruneSpec spec;
  spec.interaction = 0.8;
  spec.degree_cap = 6.0;
  spec.codegree_cap = 4.0;
  const auto once = prune(cloud, spec);
  const auto twice = prune(once.kept, spec);
  CHECK(twice.kept.size() == once.kept.size());
  CHECK(twice.kept.coords == once.kept.coords);

  PruneSpec looser = spec;
  looser.degree_cap = 9.0;
  looser.codegree_cap = 6.0;
  const auto loose = prune(cloud, looser);
  CHECK(loose.kept.size() >= once.kept.size());
}

TEST_CASE("prune on the sphere honors the angular interaction") {
  Rng rng(18);
  const auto cloud = sample_poisson(Domain::unit_sphere(3), 300.0, rng);
  PruneSpec spec;
  spec.interaction = 0.6;
  spec.degree_cap = 10.0;
  spec.codegree_cap = 8.0;
  const auto result = prune(cloud, spec);
  const auto g = build_geometric_graph(result.kept, spec.interaction);
  const auto profile = degree_profile(g);
  CHECK(profile.max_degree <= 9);
  CHECK(profile.max_codegree <= 7);
}

TEST_CASE("poisson tail bound formula values") {
  CHECK(poisson_tail_bound(10.0, 1.0) == doctest::Approx(std::exp(-10.0 / 3.0)).epsilon(1e-14));
  CHECK(poisson_tail_bound(7.0, 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("poisson tail bound dominates the simulated tail") {
  // P(Y >= 30) for Y ~ Po(20), i.e. t = 0.5.
  Rng rng(246810);
  const int draws = 1000000;
  std::size_t exceed = 0;
  for (int i = 0; i < draws; ++i) {
    if (rng.poisson(20.0) >= 30) ++exceed;
  }
  const double empirical = static_cast<double>(exceed) / draws;
  CHECK(empirical <= poisson_tail_bound(20.0, 0.5));
  // The comparison is not vacuous: empirical ~ 0.022, bound ~ 0.19.
  CHECK(empirical > 0.01);
}

TEST_CASE("mecke identity: trivial predicates") {
  const Domain domain = Domain::periodic_box(2, 1.0);
  Rng rng(100);
  const auto always = mecke_check(
      domain, 5.0, [](std::span<const double>, const PointCloud&) { return true; }, 4000, 4000,
      rng);
  CHECK(std::fabs(always.lhs.value - 5.0) <= 3.0 * always.lhs.std_error);
  CHECK(always.rhs.value == doctest::Approx(5.0).epsilon(1e-12));

  Rng rng2(101);
  const auto never = mecke_check(
      domain, 5.0, [](std::span<const double>, const PointCloud&) { return false; }, 200, 200,
      rng2);
  CHECK(never.lhs.value == 0.0);
  CHECK(never.rhs.value == 0.0);
}

TEST_CASE("mecke identity: isolation predicate matches the analytic value") {
  // Expected isolated-at-radius-r count: lambda*L^2*exp(-lambda*pi*r^2);
  // r << L so the wrapped disk never overlaps itself.
  const double lambda = 5.0, radius = 0.1;
  const Domain domain = Domain::periodic_box(2, 1.0);
  auto isolated = [radius](std::span<const double> x, const PointCloud& cloud) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double dist = pair_distance(cloud.domain, x.data(), cloud.point(i).data());
      if (dist > 0.0 && dist <= radius) return false;
    }
    return true;
  };
  const double analytic = lambda * std::exp(-lambda * std::numbers::pi * radius * radius);

  Rng rng(2024);
  const auto report = mecke_check(domain, lambda, isolated, 30000, 30000, rng);
  CHECK(std::fabs(report.lhs.value - analytic) <= 3.0 * report.lhs.std_error);
  CHECK(std::fabs(report.rhs.value - analytic) <= 3.0 * report.rhs.std_error);
}

TEST_CASE("mecke lhs and rhs agree across seeded runs") {
  const Domain domain = Domain::periodic_box(2, 1.0);
  auto isolated = [](std::span<const double> x, const PointCloud& cloud) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double dist = pair_distance(cloud.domain, x.data(), cloud.point(i).data());
      if (dist > 0.0 && dist <= 0.15) return false;
    }
    return true;
  };
  for (int run = 0; run < 20; ++run) {
    Rng rng(9000 + run);
    const auto report = mecke_check(domain, 4.0, isolated, 4000, 4000, rng);
    const double combined = std::sqrt(report.lhs.std_error * report.lhs.std_error +
                                      report.rhs.std_error * report.rhs.std_error);
    REQUIRE(std::fabs(report.lhs.value - report.rhs.value) <= 3.0 * combined);
  }
}

TEST_CASE("point cloud json round trip") {
  Rng rng(44);
  auto cloud = sample_poisson(Domain::unit_sphere(4), 50.0, rng);
  const std::string text = point_cloud_to_json(cloud);
  const auto back = point_cloud_from_json(text);
  CHECK(back.domain.kind == cloud.domain.kind);
  CHECK(back.seed == cloud.seed);
  REQUIRE(back.coords.size() == cloud.coords.size());
  CHECK(back.coords == cloud.coords);  // sampling already canonicalizes
  CHECK(point_cloud_to_json(back) == text);
}

TEST_CASE("presets exist and are finite at moderate dimension") {
  const auto pack = preset_packing(32);
  CHECK(std::isfinite(pack.intensity));
  CHECK(pack.intensity < 1.0);  // far below one point per unit volume at desk scale
  const auto code = preset_spherical(16, 1.0);
  CHECK(std::isfinite(code.intensity));
  CHECK(code.degree_cap > 0.0);
}
