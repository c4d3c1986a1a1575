#include "nibblepack/points.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "nibblepack/geometry.hpp"

namespace nibblepack {

Domain Domain::periodic_box(int dim, double side) {
  NP_CHECK(dim >= 1, "dim must be >= 1");
  if (side <= 0.0) throw ConfigError("box side must be > 0");
  return {DomainKind::PeriodicBox, dim, side};
}

Domain Domain::ball(int dim, double radius) {
  NP_CHECK(dim >= 1, "dim must be >= 1");
  if (radius <= 0.0) throw ConfigError("ball radius must be > 0");
  return {DomainKind::Ball, dim, radius};
}

Domain Domain::unit_sphere(int dim) {
  if (dim < 2) throw ConfigError("sphere domain needs dim >= 2");
  return {DomainKind::UnitSphere, dim, 1.0};
}

double Domain::measure() const {
  switch (kind) {
    case DomainKind::PeriodicBox:
      return std::pow(param, dim);
    case DomainKind::Ball:
      return geometry::ball_volume(dim, param);
    case DomainKind::UnitSphere:
      return 1.0;
  }
  return 0.0;
}

std::string Domain::kind_name() const {
  switch (kind) {
    case DomainKind::PeriodicBox:
      return "box";
    case DomainKind::Ball:
      return "ball";
    case DomainKind::UnitSphere:
      return "sphere";
  }
  return "?";
}

double pair_distance(const Domain& domain, const double* a, const double* b) {
  switch (domain.kind) {
    case DomainKind::PeriodicBox: {
      double sum = 0.0;
      for (int i = 0; i < domain.dim; ++i) {
        double diff = std::fabs(a[i] - b[i]);
        diff = std::min(diff, domain.param - diff);
        sum += diff * diff;
      }
      return std::sqrt(sum);
    }
    case DomainKind::Ball: {
      double sum = 0.0;
      for (int i = 0; i < domain.dim; ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
      }
      return std::sqrt(sum);
    }
    case DomainKind::UnitSphere: {
      double dot = 0.0;
      for (int i = 0; i < domain.dim; ++i) dot += a[i] * b[i];
      return std::acos(std::clamp(dot, -1.0, 1.0));
    }
  }
  return 0.0;
}

void canonicalize(PointCloud& cloud) {
  const int d = cloud.domain.dim;
  const std::size_t n = cloud.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  const double* data = cloud.coords.data();
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::lexicographical_compare(data + x * d, data + (x + 1) * d,
                                        data + y * d, data + (y + 1) * d);
  });
  std::vector<double> sorted;
  sorted.reserve(cloud.coords.size());
  for (std::size_t i : order) {
    sorted.insert(sorted.end(), data + i * d, data + (i + 1) * d);
  }
  cloud.coords = std::move(sorted);
}

bool domain_contains(const Domain& domain, std::span<const double> p) {
  switch (domain.kind) {
    case DomainKind::PeriodicBox:
      for (double x : p)
        if (x < 0.0 || x >= domain.param) return false;
      return true;
    case DomainKind::Ball: {
      double sum = 0.0;
      for (double x : p) sum += x * x;
      return sum <= domain.param * domain.param * (1.0 + 1e-12);
    }
    case DomainKind::UnitSphere: {
      double sum = 0.0;
      for (double x : p) sum += x * x;
      return std::fabs(std::sqrt(sum) - 1.0) <= 1e-12;
    }
  }
  return false;
}

std::string point_cloud_to_json(const PointCloud& cloud) {
  nlohmann::ordered_json j;
  j["dim"] = cloud.domain.dim;
  j["domain"] = {{"kind", cloud.domain.kind_name()}, {"param", cloud.domain.param}};
  j["seed"] = cloud.seed;
  PointCloud sorted = cloud;
  canonicalize(sorted);
  auto points = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (double x : sorted.point(i)) row.push_back(x);
    points.push_back(std::move(row));
  }
  j["points"] = std::move(points);
  return j.dump();
}

PointCloud point_cloud_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PointCloud cloud;
  const int dim = j.at("dim").get<int>();
  const std::string kind = j.at("domain").at("kind").get<std::string>();
  const double param = j.at("domain").at("param").get<double>();
  if (kind == "box") {
    cloud.domain = Domain::periodic_box(dim, param);
  } else if (kind == "ball") {
    cloud.domain = Domain::ball(dim, param);
  } else if (kind == "sphere") {
    cloud.domain = Domain::unit_sphere(dim);
  } else {
    throw ConfigError("unknown domain kind: " + kind);
  }
  cloud.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& row : j.at("points")) {
    if (static_cast<int>(row.size()) != dim) throw ConfigError("point arity mismatch");
    for (const auto& x : row) cloud.coords.push_back(x.get<double>());
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!domain_contains(cloud.domain, cloud.point(i)))
      throw ConfigError("point outside its declared domain");
  }
  return cloud;
}

void save_point_cloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << point_cloud_to_json(cloud) << '\n';
}

PointCloud load_point_cloud(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return point_cloud_from_json(text);
}

}  // namespace nibblepack
