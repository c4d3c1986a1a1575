#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nibblepack/graph.hpp"
#include "nibblepack/rng.hpp"

namespace nibblepack {

struct MisResult {
  std::uint32_t size = 0;
  std::vector<std::uint32_t> witness;
};

/// Exact maximum independent set by branch and bound (greedy lower bound,
/// max-degree pivot). Hard-capped at 60 vertices.
MisResult brute_force_mis(const Graph& g);

enum class GreedyOrder { ByIndex, Random, MinDegree };

/// Sequential greedy independent set. The result is verified independent
/// and its size is at least n/(max_degree+1).
std::vector<std::uint32_t> greedy_mis(const Graph& g, GreedyOrder order, std::uint64_t seed = 0);

struct TailReport {
  double gamma = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  std::uint32_t delta = 0;
  std::size_t samples = 0;       // surviving observations pooled over trials
  double exceed_freq = 0.0;      // empirical P(survivor kept too much degree/codegree)
  double exceed_se = 0.0;
  double bound = 0.0;            // exp(-alpha^2 / (32 gamma eta))
  bool bound_respected = false;
  double conditional_mean = 0.0;       // pooled mean of the surviving quantity
  double conditional_mean_cap = 0.0;   // (1 - gamma + gamma^2) * reference
  bool mean_respected = false;
  // Split by the two admissible degrees (delta-1, delta); sizes 0 entries
  // mean that class was never observed.
  std::vector<double> per_class_exceed;
  std::vector<std::size_t> per_class_samples;
};

struct ConcentrationReport {
  TailReport degrees;
  TailReport codegrees;
};

struct ConcentrationOptions {
  int vertex_samples_per_trial = 64;
  int pair_samples_per_trial = 64;
  /// Maximum codegree of the graph, if already known; negative recomputes.
  std::int64_t known_max_codegree = -1;
  /// Bound parameter eta; defaults to max(Delta2/Delta, Delta^{-1/2}).
  double eta_override = -1.0;
};

/// Empirical shrinkage tails under one removal round: sample A at density
/// gamma/delta, remove A and its neighborhood, observe surviving degrees
/// and codegrees, and compare the exceedance frequency against
/// exp(-alpha^2/(32 gamma eta)). Degrees must lie in {Delta-1, Delta} and
/// (gamma, eta, Delta) must satisfy Delta^{-1/2} <= eta <= gamma^2/8 with
/// alpha in [2 gamma^2, gamma]; anything else is an error.
ConcentrationReport concentration_tail(const Graph& g, double gamma, double alpha, int trials,
                                       Rng& rng, const ConcentrationOptions& options = {});

/// exp(-r^2 / (2 sum(sigma_i^2 + R_i^2))): one-sided martingale deviation
/// bound from per-step increment caps and conditional variance caps.
double chung_lu_bound(std::span<const double> increment_caps,
                      std::span<const double> variance_caps, double r);

}  // namespace nibblepack
