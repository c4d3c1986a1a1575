#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "nibblepack/points.hpp"
#include "nibblepack/rng.hpp"

namespace nibblepack {

/// Homogeneous Poisson sample on the domain: the count is Poisson with mean
/// intensity * measure(domain), points i.i.d. uniform given the count.
/// Points come back in canonical (lexicographic) order. Throws CapacityError
/// when the expected count exceeds max_expected_points.
PointCloud sample_poisson(const Domain& domain, double intensity, Rng& rng,
                          double max_expected_points = 2e7);

/// Removal thresholds for the uniformization pass. `interaction` is a
/// distance (box/ball) or an angle (sphere). A point is removed when its
/// closed-neighborhood count reaches degree_cap + 1 (graph degree >=
/// degree_cap), or when some second point shares an interaction region
/// containing >= codegree_cap cloud points.
struct PruneSpec {
  double interaction = 0.0;
  double degree_cap = 0.0;
  double codegree_cap = 0.0;
};

struct PruneResult {
  PointCloud kept;
  std::size_t removed_degree = 0;    // violated the neighborhood-count condition
  std::size_t removed_codegree = 0;  // violated only the pair condition
};

/// One-pass removal of both bad-point classes, evaluated against the
/// ORIGINAL cloud. Removing a point cannot create a new violation, so a
/// single pass suffices and the result is idempotent. The returned cloud's
/// threshold graph provably has max degree <= degree_cap - 1 and max
/// codegree <= codegree_cap - 1; both are re-verified before returning.
PruneResult prune(const PointCloud& cloud, const PruneSpec& spec);

/// exp(-min{t, t^2} * mean / 3): upper bound on P(Y - mean >= t * mean)
/// for Y Poisson with that mean.
double poisson_tail_bound(double mean, double t);

/// Preset thresholds, valid as stated only for very large dimension; every
/// number is overridable. Euclidean: lambda = (sqrt(d)/(8 log d))^d with
/// degree target Delta = 2^d * lambda; spherical: lambda =
/// (sqrt(d)/(2 log d))^d with Delta = s_d(theta) * lambda.
struct ProcessPreset {
  double intensity = 0.0;
  double interaction = 0.0;
  double degree_cap = 0.0;
  double codegree_cap = 0.0;
};
ProcessPreset preset_packing(int dim);
ProcessPreset preset_spherical(int dim, double theta);

/// Predicate over (point, cloud containing that point).
using PointPredicate = std::function<bool(std::span<const double>, const PointCloud&)>;

struct MeckeSide {
  double value = 0.0;
  double std_error = 0.0;
};

struct MeckeReport {
  MeckeSide lhs;  // E |{x in X : predicate(x, X)}|
  MeckeSide rhs;  // intensity * measure * E_x P(predicate(x, X + x))
};

/// Empirical check of the defining identity of the Poisson process: the
/// expected number of points satisfying a property equals the intensity-
/// weighted integral of the probability that an inserted point satisfies it.
MeckeReport mecke_check(const Domain& domain, double intensity, const PointPredicate& predicate,
                        int integrand_samples, int process_samples, Rng& rng);

}  // namespace nibblepack
