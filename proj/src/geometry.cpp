#include "nibblepack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "nibblepack/errors.hpp"

namespace nibblepack::geometry {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;  // converged to machine noise for all inputs we use
}

double log_beta_prefactor(double a, double b, double x) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
         b * std::log1p(-x);
}

// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton iteration
// on the Legendre polynomial.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule make_gauss_rule(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[order - 1 - i] = rule.weights[i];
  }
  return rule;
}

const GaussRule& gauss15() {
  static const GaussRule rule = make_gauss_rule(15);
  return rule;
}

// Integrand sin^{d-2}(x), evaluated through exp/log so large exponents do
// not lose accuracy near the peak.
double sin_power(int dim, double x) {
  if (dim == 2) return 1.0;
  const double s = std::sin(x);
  if (s <= 0.0) return 0.0;
  return std::exp((dim - 2) * std::log(s));
}

double gl15_panel(int dim, double a, double b) {
  const GaussRule& rule = gauss15();
  const double mid = 0.5 * (a + b);
  const double halfw = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * sin_power(dim, mid + halfw * rule.nodes[i]);
  }
  return acc * halfw;
}

double adaptive_panel(int dim, double a, double b, double whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gl15_panel(dim, a, mid);
  const double right = gl15_panel(dim, mid, b);
  const double refined = left + right;
  if (depth > 40 || std::fabs(refined - whole) <= tol) return refined;
  return adaptive_panel(dim, a, mid, left, 0.5 * tol, depth + 1) +
         adaptive_panel(dim, mid, b, right, 0.5 * tol, depth + 1);
}

// Integral of sin^{d-2} over [a, b] to absolute tolerance tol. The integrand
// peaks sharply at pi/2 for large d, so panels are pre-split there.
double sin_power_integral(int dim, double a, double b, double tol) {
  double total = 0.0;
  const double splits[] = {a, std::clamp(kPi / 2.0, a, b), b};
  for (int s = 0; s + 1 < 3; ++s) {
    const double lo = splits[s], hi = splits[s + 1];
    if (hi - lo < 1e-300) continue;
    total += adaptive_panel(dim, lo, hi, gl15_panel(dim, lo, hi), 0.5 * tol, 0);
  }
  return total;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  NP_CHECK(a > 0.0 && b > 0.0, "beta parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_beta_prefactor(a, b, x)) * beta_cont_frac(a, b, x) / a;
  }
  return 1.0 - std::exp(log_beta_prefactor(b, a, 1.0 - x)) * beta_cont_frac(b, a, 1.0 - x) / b;
}

double log_reg_inc_beta(double a, double b, double x) {
  NP_CHECK(a > 0.0 && b > 0.0, "beta parameters must be positive");
  if (x <= 0.0) return kNegInf;
  if (x >= 1.0) return 0.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return log_beta_prefactor(a, b, x) + std::log(beta_cont_frac(a, b, x) / a);
  }
  // Complement is small here, so 1 - I_{1-x}(b, a) is accurate directly.
  const double log_comp =
      log_beta_prefactor(b, a, 1.0 - x) + std::log(beta_cont_frac(b, a, 1.0 - x) / b);
  if (log_comp > -1e-17) return kNegInf;  // complement rounded to 1
  return std::log1p(-std::exp(log_comp));
}

double log_ball_volume(int dim, double radius) {
  NP_CHECK(dim >= 1, "dimension must be >= 1");
  NP_CHECK(radius >= 0.0, "radius must be >= 0");
  if (radius == 0.0) return kNegInf;
  const double half_d = 0.5 * dim;
  return half_d * std::log(kPi) - std::lgamma(half_d + 1.0) + dim * std::log(radius);
}

double ball_volume(int dim, double radius) { return std::exp(log_ball_volume(dim, radius)); }

double unit_ball_radius(int dim) {
  NP_CHECK(dim >= 1, "dimension must be >= 1");
  const double half_d = 0.5 * dim;
  return std::exp((std::lgamma(half_d + 1.0) - half_d * std::log(kPi)) / dim);
}

double lens_volume(int dim, double radius, double center_distance) {
  NP_CHECK(radius > 0.0, "radius must be > 0");
  NP_CHECK(center_distance >= 0.0, "distance must be >= 0");
  if (center_distance >= 2.0 * radius) return 0.0;
  if (center_distance == 0.0) return ball_volume(dim, radius);
  const double ratio = center_distance / (2.0 * radius);
  const double x = 1.0 - ratio * ratio;
  const double log_frac = log_reg_inc_beta(0.5 * (dim + 1), 0.5, x);
  return std::exp(log_ball_volume(dim, radius) + log_frac);
}

double lens_upper_bound(int dim, double center_distance) {
  NP_CHECK(dim >= 4, "bound needs dim >= 4");
  NP_CHECK(center_distance >= 0.0, "distance must be >= 0");
  return std::exp(dim * std::log(2.0) - center_distance * center_distance / 4.0);
}

double cap_area(int dim, double theta) {
  NP_CHECK(dim >= 2, "cap area needs dim >= 2");
  NP_CHECK(theta > 0.0 && theta <= kPi, "theta must lie in (0, pi]");
  const double log_prefactor =
      std::lgamma(0.5 * dim) - std::lgamma(0.5 * (dim - 1)) - 0.5 * std::log(kPi);
  const double integral = sin_power_integral(dim, 0.0, theta, 1e-13);
  return std::exp(log_prefactor) * integral;
}

double log_cap_area(int dim, double theta) {
  NP_CHECK(dim >= 2, "cap area needs dim >= 2");
  NP_CHECK(theta > 0.0 && theta <= kPi, "theta must lie in (0, pi]");
  const double log_prefactor =
      std::lgamma(0.5 * dim) - std::lgamma(0.5 * (dim - 1)) - 0.5 * std::log(kPi);
  // Factor the peak value out of the integrand so the integral itself stays
  // representable for very large d.
  const double peak = std::min(theta, kPi / 2.0);
  const double log_peak = (dim - 2) * std::log(std::sin(peak));
  const GaussRule& rule = gauss15();
  // Fixed fine grid in log space: split [0, theta] into panels and
  // accumulate exp((d-2)(log sin x) - log_peak).
  const int panels = 256;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = theta * p / panels;
    const double b = theta * (p + 1) / panels;
    const double mid = 0.5 * (a + b), halfw = 0.5 * (b - a);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = mid + halfw * rule.nodes[i];
      const double s = std::sin(x);
      if (s <= 0.0) continue;
      acc += rule.weights[i] * halfw * std::exp((dim - 2) * std::log(s) - log_peak);
    }
  }
  return log_prefactor + log_peak + std::log(acc);
}

double cap_intersection_bound(int dim, double theta, double tau) {
  NP_CHECK(dim >= 2, "needs dim >= 2");
  NP_CHECK(theta > 0.0 && theta < kPi / 2.0, "theta must lie in (0, pi/2)");
  NP_CHECK(tau >= 0.0 && tau < 2.0 * theta, "tau must lie in [0, 2*theta)");
  const double cot = std::cos(theta) / std::sin(theta);
  const double c_theta = cot * cot / 16.0;
  return cap_area(dim, theta) * std::exp(-c_theta * tau * tau * dim);
}

McEstimate cap_intersection_area_mc(int dim, double theta, double tau,
                                    std::size_t samples, Rng& rng) {
  NP_CHECK(dim >= 2, "needs dim >= 2");
  NP_CHECK(theta > 0.0 && theta <= kPi, "theta must lie in (0, pi]");
  NP_CHECK(tau >= 0.0 && tau <= kPi, "tau must lie in [0, pi]");
  if (samples < 10000) throw PreconditionViolated("cap_intersection_area_mc needs >= 1e4 samples");

  // Axes x = e1 and y = (cos tau, sin tau, 0, ...). Only the first two
  // coordinates of the sample enter the two cap tests.
  const double cos_theta = std::cos(theta);
  const double cos_tau = std::cos(tau);
  const double sin_tau = std::sin(tau);
  std::size_t hits = 0;
  std::vector<double> g(dim);
  for (std::size_t s = 0; s < samples; ++s) {
    double norm_sq = 0.0;
    for (int i = 0; i < dim; ++i) {
      g[i] = rng.normal();
      norm_sq += g[i] * g[i];
    }
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    const double dot_x = g[0] * inv_norm;
    const double dot_y = (g[0] * cos_tau + g[1] * sin_tau) * inv_norm;
    if (dot_x >= cos_theta && dot_y >= cos_theta) ++hits;
  }
  McEstimate est;
  est.samples = samples;
  est.mean = static_cast<double>(hits) / static_cast<double>(samples);
  est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(samples));
  return est;
}

}  // namespace nibblepack::geometry
