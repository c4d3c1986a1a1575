#include "nibblepack/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "nibblepack/nibble.hpp"

namespace nibblepack {

namespace {

struct BranchBound {
  std::vector<std::uint64_t> adjacency;  // bitmask rows, n <= 60
  std::uint32_t best = 0;
  std::uint64_t best_set = 0;

  void search(std::uint64_t available, std::uint32_t chosen, std::uint64_t chosen_set) {
    if (chosen + std::popcount(available) <= best) return;
    if (available == 0) {
      best = chosen;
      best_set = chosen_set;
      return;
    }
    // Pivot on the densest remaining vertex; isolated vertices are free.
    int pivot = -1;
    int pivot_degree = -1;
    std::uint64_t scan = available;
    while (scan) {
      const int v = std::countr_zero(scan);
      scan &= scan - 1;
      const int deg = std::popcount(adjacency[v] & available);
      if (deg == 0) {
        available &= ~(1ULL << v);
        chosen += 1;
        chosen_set |= 1ULL << v;
        continue;
      }
      if (deg > pivot_degree) {
        pivot_degree = deg;
        pivot = v;
      }
    }
    if (pivot < 0) {
      if (chosen > best) {
        best = chosen;
        best_set = chosen_set;
      }
      return;
    }
    // Include the pivot, then exclude it.
    search(available & ~(adjacency[pivot] | (1ULL << pivot)), chosen + 1,
           chosen_set | (1ULL << pivot));
    search(available & ~(1ULL << pivot), chosen, chosen_set);
  }
};

}  // namespace

MisResult brute_force_mis(const Graph& g) {
  const std::uint32_t n = g.num_vertices();
  if (n > 60) throw PreconditionViolated("exact solver is capped at 60 vertices");
  BranchBound bb;
  bb.adjacency.assign(n, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    for (std::uint32_t w : g.neighbors(v)) bb.adjacency[v] |= 1ULL << w;
  }
  // Greedy seed so pruning bites immediately.
  const auto greedy = greedy_mis(g, GreedyOrder::MinDegree);
  bb.best = greedy.empty() ? 0 : static_cast<std::uint32_t>(greedy.size()) - 1;
  bb.search(n == 64 ? ~0ULL : ((1ULL << n) - 1), 0, 0);

  MisResult result;
  result.size = bb.best;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (bb.best_set & (1ULL << v)) result.witness.push_back(v);
  }
  NP_CHECK(result.witness.size() == result.size, "witness size mismatch");
  NP_CHECK(verify_independent(g, result.witness), "witness is not independent");
  NP_CHECK(result.size >= greedy.size(), "exact size below the greedy seed");
  return result;
}

std::vector<std::uint32_t> greedy_mis(const Graph& g, GreedyOrder order, std::uint64_t seed) {
  const std::uint32_t n = g.num_vertices();
  std::vector<std::uint32_t> sequence(n);
  std::iota(sequence.begin(), sequence.end(), 0);
  switch (order) {
    case GreedyOrder::ByIndex:
      break;
    case GreedyOrder::Random: {
      Rng rng(seed);
      for (std::size_t i = n; i > 1; --i) {
        std::swap(sequence[i - 1], sequence[rng.uniform_below(i)]);
      }
      break;
    }
    case GreedyOrder::MinDegree:
      std::stable_sort(sequence.begin(), sequence.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return g.degree(a) < g.degree(b); });
      break;
  }
  std::vector<char> blocked(n, 0);
  std::vector<std::uint32_t> chosen;
  for (std::uint32_t v : sequence) {
    if (blocked[v]) continue;
    chosen.push_back(v);
    for (std::uint32_t w : g.neighbors(v)) blocked[w] = 1;
  }
  std::sort(chosen.begin(), chosen.end());
  NP_CHECK(verify_independent(g, chosen), "greedy result is not independent");
  if (n > 0) {
    const DegreeProfile profile = degree_profile(g);
    NP_CHECK(chosen.size() * (profile.max_degree + 1ULL) >= n,
             "greedy fell below n/(max_degree+1)");
  }
  return chosen;
}

ConcentrationReport concentration_tail(const Graph& g, double gamma, double alpha, int trials,
                                       Rng& rng, const ConcentrationOptions& options) {
  if (trials <= 0) throw ConfigError("trials must be >= 1");
  const std::uint32_t n = g.num_vertices();
  if (n == 0) throw ConfigError("empty graph");

  std::uint32_t delta = 0;
  for (std::uint32_t v = 0; v < n; ++v) delta = std::max(delta, g.degree(v));
  for (std::uint32_t v = 0; v < n; ++v) {
    const std::uint32_t deg = g.degree(v);
    if (deg != delta && deg + 1 != delta) {
      throw PreconditionViolated("degrees must lie in {Delta-1, Delta}");
    }
  }
  const std::uint32_t max_codegree =
      options.known_max_codegree >= 0 ? static_cast<std::uint32_t>(options.known_max_codegree)
                                      : degree_profile(g).max_codegree;

  const double eta_floor = 1.0 / std::sqrt(static_cast<double>(delta));
  double eta = options.eta_override > 0.0
                   ? options.eta_override
                   : std::max(static_cast<double>(max_codegree) / delta, eta_floor);
  if (!(gamma > 0.0 && gamma <= 0.5)) throw PreconditionViolated("need 0 < gamma <= 1/2");
  if (!(alpha >= 2.0 * gamma * gamma && alpha <= gamma)) {
    throw PreconditionViolated("need alpha in [2*gamma^2, gamma]");
  }
  if (!(eta >= eta_floor && eta <= gamma * gamma / 8.0)) {
    throw PreconditionViolated("need Delta^{-1/2} <= eta <= gamma^2/8");
  }
  if (static_cast<double>(max_codegree) > eta * delta) {
    throw PreconditionViolated("max codegree exceeds eta*Delta");
  }

  const double p = gamma / delta;
  const double degree_factor = 1.0 - gamma + alpha;
  const double codegree_threshold = degree_factor * eta * delta;
  const double mean_factor = 1.0 - gamma + gamma * gamma;
  const double bound = std::exp(-alpha * alpha / (32.0 * gamma * eta));

  // Fixed observation panels: vertices, and two-hop pairs found by short
  // walks. The shrinkage statement is per-vertex/per-pair, so pooling over
  // a fixed panel keeps the comparison against the bound valid.
  Rng panel_rng = rng.derive(0x9A9EULL);
  std::vector<std::uint32_t> vertex_panel;
  for (int i = 0; i < options.vertex_samples_per_trial; ++i) {
    vertex_panel.push_back(static_cast<std::uint32_t>(panel_rng.uniform_below(n)));
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pair_panel;
  {
    int guard = 0;
    while (static_cast<int>(pair_panel.size()) < options.pair_samples_per_trial &&
           guard < 100 * options.pair_samples_per_trial) {
      ++guard;
      const auto u = static_cast<std::uint32_t>(panel_rng.uniform_below(n));
      if (g.degree(u) == 0) continue;
      const auto nb_u = g.neighbors(u);
      const std::uint32_t w = nb_u[panel_rng.uniform_below(nb_u.size())];
      const auto nb_w = g.neighbors(w);
      const std::uint32_t v = nb_w[panel_rng.uniform_below(nb_w.size())];
      if (v == u) continue;
      pair_panel.emplace_back(std::min(u, v), std::max(u, v));
    }
  }

  std::vector<char> removed(n);
  std::vector<std::uint32_t> sample;

  std::size_t deg_samples = 0, deg_exceed = 0;
  double deg_sum = 0.0;
  std::size_t pair_samples = 0, pair_exceed = 0;
  double pair_sum = 0.0;
  std::vector<std::size_t> class_samples(2, 0), class_exceed(2, 0);

  const double log_one_minus_p = std::log1p(-p);
  for (int trial = 0; trial < trials; ++trial) {
    Rng trial_rng = rng.derive(0x7A1A1ULL + trial);
    sample.clear();
    double position = -1.0;
    while (true) {
      const double u = 1.0 - trial_rng.uniform01();
      position += 1.0 + std::floor(std::log(u) / log_one_minus_p);
      if (position >= n) break;
      sample.push_back(static_cast<std::uint32_t>(position));
    }
    std::fill(removed.begin(), removed.end(), 0);
    for (std::uint32_t a : sample) {
      removed[a] = 1;
      for (std::uint32_t b : g.neighbors(a)) removed[b] = 1;
    }

    for (std::uint32_t v : vertex_panel) {
      if (removed[v]) continue;
      std::uint32_t surviving = 0;
      for (std::uint32_t w : g.neighbors(v)) surviving += removed[w] ? 0u : 1u;
      ++deg_samples;
      deg_sum += surviving;
      const bool exceed = static_cast<double>(surviving) >= degree_factor * g.degree(v);
      const std::size_t cls = g.degree(v) == delta ? 1 : 0;
      ++class_samples[cls];
      if (exceed) {
        ++deg_exceed;
        ++class_exceed[cls];
      }
    }

    for (const auto& [u, v] : pair_panel) {
      if (removed[u] || removed[v]) continue;
      std::uint32_t surviving = 0;
      const auto nb_u = g.neighbors(u);
      const auto nb_v = g.neighbors(v);
      std::size_t i = 0, j = 0;
      while (i < nb_u.size() && j < nb_v.size()) {
        if (nb_u[i] < nb_v[j]) {
          ++i;
        } else if (nb_u[i] > nb_v[j]) {
          ++j;
        } else {
          surviving += removed[nb_u[i]] ? 0u : 1u;
          ++i;
          ++j;
        }
      }
      ++pair_samples;
      pair_sum += surviving;
      if (static_cast<double>(surviving) >= codegree_threshold) ++pair_exceed;
    }
  }

  auto finish = [&](std::size_t samples, std::size_t exceed, double sum, double mean_cap) {
    TailReport r;
    r.gamma = gamma;
    r.alpha = alpha;
    r.eta = eta;
    r.delta = delta;
    r.samples = samples;
    r.bound = bound;
    if (samples > 0) {
      r.exceed_freq = static_cast<double>(exceed) / samples;
      r.exceed_se = std::sqrt(r.exceed_freq * (1.0 - r.exceed_freq) / samples);
      r.conditional_mean = sum / samples;
    }
    r.conditional_mean_cap = mean_cap;
    r.bound_respected = r.exceed_freq <= bound;
    r.mean_respected = r.conditional_mean <= mean_cap;
    return r;
  };

  ConcentrationReport report;
  report.degrees = finish(deg_samples, deg_exceed, deg_sum, mean_factor * delta);
  report.degrees.per_class_samples = class_samples;
  report.degrees.per_class_exceed.assign(2, 0.0);
  for (int c = 0; c < 2; ++c) {
    if (class_samples[c] > 0) {
      report.degrees.per_class_exceed[c] =
          static_cast<double>(class_exceed[c]) / class_samples[c];
    }
  }
  report.codegrees = finish(pair_samples, pair_exceed, pair_sum,
                            mean_factor * static_cast<double>(max_codegree));
  return report;
}

double chung_lu_bound(std::span<const double> increment_caps,
                      std::span<const double> variance_caps, double r) {
  NP_CHECK(increment_caps.size() == variance_caps.size(), "cap lists must align");
  NP_CHECK(r >= 0.0, "deviation must be >= 0");
  double b = 0.0;
  for (std::size_t i = 0; i < increment_caps.size(); ++i) {
    NP_CHECK(increment_caps[i] > 0.0, "increment caps must be positive");
    NP_CHECK(variance_caps[i] >= 0.0, "variance caps must be nonnegative");
    b += variance_caps[i] + increment_caps[i] * increment_caps[i];
  }
  NP_CHECK(b > 0.0, "need at least one increment");
  return std::exp(-r * r / (2.0 * b));
}

}  // namespace nibblepack
