#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nibblepack/errors.hpp"

namespace nibblepack {

enum class DomainKind { PeriodicBox, Ball, UnitSphere };

/// Where a point process lives. PeriodicBox distances are minimum-image.
struct Domain {
  DomainKind kind = DomainKind::PeriodicBox;
  int dim = 1;
  double param = 1.0;  // side length L, ball radius R; 1.0 for the sphere

  static Domain periodic_box(int dim, double side);
  static Domain ball(int dim, double radius);
  static Domain unit_sphere(int dim);

  /// Lebesgue volume for box/ball; normalized surface measure 1 for sphere.
  double measure() const;

  std::string kind_name() const;
};

struct PointCloud {
  Domain domain;
  std::vector<double> coords;  // size() * domain.dim, row-major
  std::uint64_t seed = 0;

  std::size_t size() const { return domain.dim == 0 ? 0 : coords.size() / domain.dim; }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * domain.dim, static_cast<std::size_t>(domain.dim)};
  }
};

/// Pairwise separation in the domain's native metric: minimum-image
/// Euclidean on the torus, Euclidean in a ball, angle on the sphere.
double pair_distance(const Domain& domain, const double* a, const double* b);

/// Sorts points lexicographically (the canonical on-disk and in-memory order).
void canonicalize(PointCloud& cloud);

/// Checks the domain membership invariant (sphere points unit-norm to 1e-12,
/// box coordinates inside [0, L), ball points within radius).
bool domain_contains(const Domain& domain, std::span<const double> p);

std::string point_cloud_to_json(const PointCloud& cloud);
PointCloud point_cloud_from_json(const std::string& text);
void save_point_cloud(const PointCloud& cloud, const std::string& path);
PointCloud load_point_cloud(const std::string& path);

}  // namespace nibblepack
