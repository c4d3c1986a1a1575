#pragma once

#include <cstddef>
#include <cstdint>

#include "nibblepack/rng.hpp"

namespace nibblepack::geometry {

/// log Vol(B_0(t)) in d dimensions. Evaluated in log space so it stays
/// finite for dimensions far beyond where Gamma overflows.
double log_ball_volume(int dim, double radius);

/// Vol(B_0(t)) = pi^{d/2} / Gamma(d/2 + 1) * t^d.
double ball_volume(int dim, double radius);

/// Radius of the d-dimensional ball of volume 1.
double unit_ball_radius(int dim);

/// Volume of the intersection of two balls of radius R whose centers are
/// distance t apart (two equal spherical caps, regularized incomplete beta).
double lens_volume(int dim, double radius, double center_distance);

/// Closed-form cap on the lens volume at ball radius 2*r_d: 2^d * exp(-t^2/4).
/// Valid for dim >= 4 (uses r_d <= sqrt(d/8)).
double lens_upper_bound(int dim, double center_distance);

/// Normalized spherical cap area s_d(theta) in [0, 1], for theta in (0, pi].
/// Adaptive Gauss-Legendre quadrature, absolute tolerance 1e-12.
double cap_area(int dim, double theta);

/// log s_d(theta); usable when the area underflows a double.
double log_cap_area(int dim, double theta);

/// Asymptotic cap-intersection cap: s_d(theta) * exp(-c(theta) tau^2 d) with
/// c(theta) = cot^2(theta)/16. Carries an unquantified (1+o(1)); callers that
/// compare against estimates should allow a slack factor (1.1 by default in
/// the tests). Requires 0 < theta < pi/2 and 0 <= tau < 2*theta.
double cap_intersection_bound(int dim, double theta, double tau);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Monte-Carlo estimate of the normalized area of C_theta(x) ∩ C_theta(y)
/// for unit vectors at angle tau. Uniform sphere points via normalized
/// Gaussians; unbiased hit-count estimator. Requires samples >= 10^4.
McEstimate cap_intersection_area_mc(int dim, double theta, double tau,
                                    std::size_t samples, Rng& rng);

/// Regularized incomplete beta I_x(a, b) (continued fraction).
double reg_inc_beta(double a, double b, double x);

/// log I_x(a, b); accurate when I_x underflows.
double log_reg_inc_beta(double a, double b, double x);

}  // namespace nibblepack::geometry
