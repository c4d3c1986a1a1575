#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nibblepack/analysis.hpp"
#include "nibblepack/geometry.hpp"
#include "nibblepack/graph.hpp"
#include "nibblepack/nibble.hpp"
#include "nibblepack/pointproc.hpp"

namespace {

constexpr const char* kVersion = "nibblepack 0.1.0";

using nibblepack::Domain;
using nibblepack::Graph;
using nibblepack::Mode;
using nibblepack::PointCloud;
using nibblepack::Rng;
using ojson = nlohmann::ordered_json;

struct CommonOptions {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string mode = "custom";
  double gamma = 0.2;
  double alpha = 0.1;
  int rounds = 8;
  int max_retries = 64;
  int threads = 0;  // accepted for compatibility; runs use one worker
  bool auto_blowup = false;
};

Mode parse_mode(const std::string& mode) {
  if (mode == "paper") return Mode::Paper;
  if (mode == "custom") return Mode::Custom;
  throw nibblepack::ConfigError("mode must be 'paper' or 'custom'");
}

Domain parse_domain(const std::string& text, int dim) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "sphere") return Domain::unit_sphere(dim);
  if (colon == std::string::npos) {
    throw nibblepack::ConfigError("domain needs a size, e.g. box:10 or ball:3.5");
  }
  const double param = std::stod(text.substr(colon + 1));
  if (kind == "box") return Domain::periodic_box(dim, param);
  if (kind == "ball") return Domain::ball(dim, param);
  throw nibblepack::ConfigError("unknown domain kind: " + kind);
}

void add_common(CLI::App* cmd, CommonOptions& opt) {
  if (const char* env = std::getenv("NIBBLEPACK_THREADS")) {
    opt.threads = std::atoi(env);
  }
  cmd->add_option("--seed", opt.seed, "RNG seed; recorded in every artifact");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--mode", opt.mode, "paper | custom")->check(CLI::IsMember({"paper", "custom"}));
  cmd->add_option("--gamma", opt.gamma, "sampling density scale (custom mode)");
  cmd->add_option("--alpha", opt.alpha, "slack (custom mode, <= gamma/2)");
  cmd->add_option("--rounds", opt.rounds, "round count (custom mode)");
  cmd->add_option("--max-retries", opt.max_retries, "attempt budget per round");
  cmd->add_option("--threads", opt.threads,
                  "worker cap; results are identical for any value (fallback: NIBBLEPACK_THREADS)");
  cmd->add_flag("--auto-blowup", opt.auto_blowup, "clone small inputs to meet size preconditions");
  cmd->set_config("--config", "", "flat key=value file mirroring the flags; flags win");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw nibblepack::ConfigError("cannot open for writing: " + path);
  out << content;
}

nibblepack::NibbleParams make_params(const CommonOptions& opt) {
  nibblepack::NibbleParams params;
  params.mode = parse_mode(opt.mode);
  params.gamma = opt.gamma;
  params.alpha = opt.alpha;
  params.rounds = opt.rounds;
  params.max_retries = opt.max_retries;
  params.auto_blowup = opt.auto_blowup;
  params.seed = opt.seed;
  return params;
}

ojson params_json(const CommonOptions& opt, std::initializer_list<std::pair<std::string, ojson>> extra) {
  ojson j;
  j["mode"] = opt.mode;
  j["gamma"] = opt.gamma;
  j["alpha"] = opt.alpha;
  j["rounds"] = opt.rounds;
  j["max_retries"] = opt.max_retries;
  j["seed"] = opt.seed;
  for (const auto& [k, v] : extra) j[k] = v;
  j["version"] = kVersion;
  return j;
}

// ---------------------------------------------------------------------------

struct PackOptions {
  CommonOptions common;
  int dim = 2;
  std::string domain = "box:10";
  double intensity = -1.0;
  double radius = -1.0;       // ball radius r; interaction threshold is 2r
  double degree_cap = -1.0;   // < 0 disables that pruning condition
  double codegree_cap = -1.0;
  bool emit_graph = false;
  double max_points = 2e7;
};

int run_pack(const PackOptions& opt) {
  const Mode mode = parse_mode(opt.common.mode);
  Domain domain = parse_domain(opt.domain, opt.dim);
  if (domain.kind == nibblepack::DomainKind::UnitSphere) {
    throw nibblepack::ConfigError("pack works on box/ball domains; use `code` for the sphere");
  }

  double intensity = opt.intensity;
  double interaction =
      opt.radius > 0.0 ? 2.0 * opt.radius : 2.0 * nibblepack::geometry::unit_ball_radius(opt.dim);
  nibblepack::PruneSpec prune_spec;
  prune_spec.interaction = interaction;
  prune_spec.degree_cap =
      opt.degree_cap < 0.0 ? std::numeric_limits<double>::infinity() : opt.degree_cap;
  prune_spec.codegree_cap =
      opt.codegree_cap < 0.0 ? std::numeric_limits<double>::infinity() : opt.codegree_cap;

  if (mode == Mode::Paper) {
    const auto preset = nibblepack::preset_packing(opt.dim);
    intensity = opt.intensity >= 0.0 ? opt.intensity : preset.intensity;
    interaction = preset.interaction;
    prune_spec = {preset.interaction, preset.degree_cap, preset.codegree_cap};
    const double degree_target = std::exp2(opt.dim) * preset.intensity;
    if (degree_target < 2048.0) {
      throw nibblepack::ScheduleInfeasible(
          "preset mode needs a degree target of at least 2^11 = 2048; at dim " +
          std::to_string(opt.dim) + " the preset target is " + std::to_string(degree_target) +
          " (the preset round count first turns positive near a degree target of 1e104)");
    }
  }
  if (intensity < 0.0) throw nibblepack::ConfigError("--intensity is required");

  std::filesystem::create_directories(opt.common.out_dir);
  Rng rng(opt.common.seed);

  PointCloud cloud = nibblepack::sample_poisson(domain, intensity, rng, opt.max_points);
  nibblepack::PruneResult pruned;
  if (std::isinf(prune_spec.degree_cap) && std::isinf(prune_spec.codegree_cap)) {
    pruned.kept = cloud;
  } else {
    pruned = nibblepack::prune(cloud, prune_spec);
  }
  nibblepack::save_point_cloud(pruned.kept, opt.common.out_dir + "/cloud.json");

  const Graph graph = nibblepack::build_geometric_graph(pruned.kept, interaction);
  if (opt.emit_graph) nibblepack::save_graph_json(graph, opt.common.out_dir + "/graph.json");

  nibblepack::ScheduleResult schedule;
  if (graph.num_vertices() > 0) {
    schedule = nibblepack::run_schedule(graph, make_params(opt.common), rng);
  } else {
    schedule.verified = true;
  }

  // Re-verify the packing property directly on the selected centers.
  double min_distance = std::numeric_limits<double>::infinity();
  const auto& kept = pruned.kept;
  for (std::size_t i = 0; i < schedule.independent_set.size(); ++i) {
    for (std::size_t j = i + 1; j < schedule.independent_set.size(); ++j) {
      const double* a = kept.coords.data() + schedule.independent_set[i] * opt.dim;
      const double* b = kept.coords.data() + schedule.independent_set[j] * opt.dim;
      min_distance = std::min(min_distance, nibblepack::pair_distance(domain, a, b));
    }
  }
  if (schedule.independent_set.size() >= 2 && min_distance < interaction) {
    throw nibblepack::InternalCheckFailure("packing has a pair below the required separation");
  }

  const double ball_vol = nibblepack::geometry::ball_volume(opt.dim, interaction / 2.0);
  const double density = schedule.independent_set.size() * ball_vol / domain.measure();

  auto params = params_json(opt.common, {{"dim", opt.dim},
                                         {"domain", opt.domain},
                                         {"intensity", intensity},
                                         {"interaction", interaction},
                                         {"degree_cap", opt.degree_cap},
                                         {"codegree_cap", opt.codegree_cap}});
  ojson result;
  result["independent_set"] = schedule.independent_set;
  result["size"] = schedule.independent_set.size();
  result["verified"] = schedule.verified;
  result["seed"] = opt.common.seed;
  result["params"] = params;
  result["sampled_points"] = cloud.size();
  result["pruned_points"] = kept.size();
  result["removed_degree"] = pruned.removed_degree;
  result["removed_codegree"] = pruned.removed_codegree;
  result["min_pairwise_distance"] =
      schedule.independent_set.size() >= 2 ? min_distance : std::numeric_limits<double>::max();
  result["density"] = density;
  result["blowup_copies"] = schedule.blowup_copies;
  result["warnings"] = schedule.warnings;
  auto centers = ojson::array();
  for (std::uint32_t v : schedule.independent_set) {
    auto row = ojson::array();
    for (double x : kept.point(v)) row.push_back(x);
    centers.push_back(std::move(row));
  }
  result["centers"] = std::move(centers);
  write_file(opt.common.out_dir + "/result.json", result.dump() + "\n");
  write_file(opt.common.out_dir + "/trace.csv", nibblepack::trace_to_csv(schedule.trace));

  std::cout << "pack: " << schedule.independent_set.size() << " centers, density " << density
            << ", min pairwise distance "
            << (schedule.independent_set.size() >= 2 ? min_distance : 0.0) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct CodeOptions {
  CommonOptions common;
  int dim = 3;
  double theta = std::numbers::pi / 3.0;
  double intensity = -1.0;
  double degree_cap = -1.0;
  double codegree_cap = -1.0;
  bool emit_graph = false;
  double max_points = 2e7;
};

int run_code(const CodeOptions& opt) {
  if (opt.theta <= 0.0 || opt.theta > std::numbers::pi) {
    throw nibblepack::ConfigError("--theta must lie in (0, pi]");
  }
  const Mode mode = parse_mode(opt.common.mode);
  Domain domain = Domain::unit_sphere(opt.dim);

  double intensity = opt.intensity;
  nibblepack::PruneSpec prune_spec;
  prune_spec.interaction = opt.theta;
  prune_spec.degree_cap =
      opt.degree_cap < 0.0 ? std::numeric_limits<double>::infinity() : opt.degree_cap;
  prune_spec.codegree_cap =
      opt.codegree_cap < 0.0 ? std::numeric_limits<double>::infinity() : opt.codegree_cap;

  if (mode == Mode::Paper) {
    const auto preset = nibblepack::preset_spherical(opt.dim, opt.theta);
    intensity = opt.intensity >= 0.0 ? opt.intensity : preset.intensity;
    prune_spec = {preset.interaction, preset.degree_cap, preset.codegree_cap};
    const double degree_target =
        nibblepack::geometry::cap_area(opt.dim, opt.theta) * preset.intensity;
    if (degree_target < 2048.0) {
      throw nibblepack::ScheduleInfeasible(
          "preset mode needs a degree target of at least 2^11 = 2048; at dim " +
          std::to_string(opt.dim) + " the preset target is " + std::to_string(degree_target));
    }
  }
  if (intensity < 0.0) throw nibblepack::ConfigError("--intensity is required");

  std::filesystem::create_directories(opt.common.out_dir);
  Rng rng(opt.common.seed);

  PointCloud cloud = nibblepack::sample_poisson(domain, intensity, rng, opt.max_points);
  nibblepack::PruneResult pruned;
  if (std::isinf(prune_spec.degree_cap) && std::isinf(prune_spec.codegree_cap)) {
    pruned.kept = cloud;
  } else {
    pruned = nibblepack::prune(cloud, prune_spec);
  }
  nibblepack::save_point_cloud(pruned.kept, opt.common.out_dir + "/cloud.json");

  const Graph graph = nibblepack::build_geometric_graph(pruned.kept, opt.theta);
  if (opt.emit_graph) nibblepack::save_graph_json(graph, opt.common.out_dir + "/graph.json");

  nibblepack::ScheduleResult schedule;
  if (graph.num_vertices() > 0) {
    schedule = nibblepack::run_schedule(graph, make_params(opt.common), rng);
  } else {
    schedule.verified = true;
  }

  // Verify the angular separation directly: max inner product <= cos(theta).
  const auto& kept = pruned.kept;
  double max_dot = -1.0;
  for (std::size_t i = 0; i < schedule.independent_set.size(); ++i) {
    for (std::size_t j = i + 1; j < schedule.independent_set.size(); ++j) {
      const double* a = kept.coords.data() + schedule.independent_set[i] * opt.dim;
      const double* b = kept.coords.data() + schedule.independent_set[j] * opt.dim;
      double dot = 0.0;
      for (int k = 0; k < opt.dim; ++k) dot += a[k] * b[k];
      max_dot = std::max(max_dot, dot);
    }
  }
  if (schedule.independent_set.size() >= 2 && max_dot > std::cos(opt.theta)) {
    throw nibblepack::InternalCheckFailure("code has a pair below the required angle");
  }
  const double min_angle = schedule.independent_set.size() >= 2
                               ? std::acos(std::clamp(max_dot, -1.0, 1.0))
                               : std::numbers::pi;
  const double cap = nibblepack::geometry::cap_area(opt.dim, opt.theta);
  const double saturation = schedule.independent_set.size() * cap;

  auto params = params_json(opt.common, {{"dim", opt.dim},
                                         {"theta", opt.theta},
                                         {"intensity", intensity},
                                         {"degree_cap", opt.degree_cap},
                                         {"codegree_cap", opt.codegree_cap}});
  ojson result;
  result["independent_set"] = schedule.independent_set;
  result["size"] = schedule.independent_set.size();
  result["verified"] = schedule.verified;
  result["seed"] = opt.common.seed;
  result["params"] = params;
  result["sampled_points"] = cloud.size();
  result["pruned_points"] = kept.size();
  result["min_pairwise_angle"] = min_angle;
  result["cap_area"] = cap;
  result["saturation_ratio"] = saturation;
  result["blowup_copies"] = schedule.blowup_copies;
  result["warnings"] = schedule.warnings;
  auto centers = ojson::array();
  for (std::uint32_t v : schedule.independent_set) {
    auto row = ojson::array();
    for (double x : kept.point(v)) row.push_back(x);
    centers.push_back(std::move(row));
  }
  result["centers"] = std::move(centers);
  write_file(opt.common.out_dir + "/result.json", result.dump() + "\n");
  write_file(opt.common.out_dir + "/trace.csv", nibblepack::trace_to_csv(schedule.trace));

  std::cout << "code: " << schedule.independent_set.size() << " points, min angle " << min_angle
            << ", saturation ratio " << saturation << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct NibbleOptions {
  CommonOptions common;
  std::string graph_path;
  bool binary_input = false;
};

int run_nibble(const NibbleOptions& opt) {
  const Graph graph = opt.binary_input ? nibblepack::load_graph_binary(opt.graph_path)
                                       : nibblepack::load_graph_json(opt.graph_path);
  std::filesystem::create_directories(opt.common.out_dir);
  Rng rng(opt.common.seed);
  nibblepack::ScheduleResult schedule = nibblepack::run_schedule(graph, make_params(opt.common), rng);

  const auto params = params_json(opt.common, {{"graph", opt.graph_path}});
  write_file(opt.common.out_dir + "/result.json",
             nibblepack::schedule_result_to_json(schedule, params.dump(), opt.common.seed) + "\n");
  write_file(opt.common.out_dir + "/trace.csv", nibblepack::trace_to_csv(schedule.trace));
  std::cout << "nibble: independent set of size " << schedule.independent_set.size()
            << " on " << graph.num_vertices() << " vertices\n";
  return 0;
}

// ---------------------------------------------------------------------------

int run_gen_cloud(const CommonOptions& common, int dim, const std::string& domain_text,
                  double intensity, const std::string& out_file, double max_points) {
  const Domain domain = parse_domain(domain_text, dim);
  Rng rng(common.seed);
  const PointCloud cloud = nibblepack::sample_poisson(domain, intensity, rng, max_points);
  nibblepack::save_point_cloud(cloud, out_file);
  std::cout << "cloud: " << cloud.size() << " points -> " << out_file << "\n";
  return 0;
}

int run_gen_sharpness(const CommonOptions& common, std::uint32_t n, std::uint32_t delta,
                      double eta, const std::string& out_file, bool binary) {
  Rng rng(common.seed);
  const auto built = nibblepack::sharpness_construction(n, delta, eta, rng);
  if (binary) {
    nibblepack::save_graph_binary(built.graph, out_file);
  } else {
    nibblepack::save_graph_json(built.graph, out_file);
  }
  std::cout << "sharpness: n=" << n << " delta=" << delta << " eta=" << eta
            << " realized max codegree " << built.realized_max_codegree << " -> " << out_file
            << "\n";
  return 0;
}

int run_gen_regular(const CommonOptions& common, std::uint32_t n, std::uint32_t delta,
                    std::uint32_t cap, const std::string& out_file, bool binary) {
  Rng rng(common.seed);
  const auto built = nibblepack::random_regular_capped(n, delta, cap, rng, common.max_retries);
  if (binary) {
    nibblepack::save_graph_binary(built.graph, out_file);
  } else {
    nibblepack::save_graph_json(built.graph, out_file);
  }
  std::cout << "regular: n=" << n << " delta=" << delta << " codegree cap " << cap << " in "
            << built.attempts << " attempt(s) -> " << out_file << "\n";
  return 0;
}

int run_gen_projective(std::uint32_t q, const std::string& out_file, bool binary) {
  const Graph g = nibblepack::projective_incidence_graph(q);
  if (binary) {
    nibblepack::save_graph_binary(g, out_file);
  } else {
    nibblepack::save_graph_json(g, out_file);
  }
  std::cout << "projective: q=" << q << " n=" << g.num_vertices() << " m=" << g.num_edges()
            << " -> " << out_file << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int run_analyze_geometry(const std::string& out_file, int d_min, int d_max) {
  std::ostringstream csv;
  csv << "d,t,vol_lower,volume,vol_upper,r_d,sqrt_d_over_8,lens_at_t,lens_bound\n";
  namespace geo = nibblepack::geometry;
  for (int d = d_min; d <= d_max; ++d) {
    const double r_d = geo::unit_ball_radius(d);
    for (double t : {0.5, 1.0, 1.5, 2.0}) {
      const double vol = geo::ball_volume(d, t);
      const double lower = std::pow(std::numbers::pi * std::numbers::e * t * t / d, d / 2.0);
      const double upper = std::pow(2.0 * std::numbers::pi * std::numbers::e * t * t / d, d / 2.0);
      const double lens = geo::lens_volume(d, 2.0 * r_d, t);
      const double bound = geo::lens_upper_bound(d, t);
      csv << d << ',' << t << ',' << lower << ',' << vol << ',' << upper << ',' << r_d << ','
          << std::sqrt(d / 8.0) << ',' << lens << ',' << bound << '\n';
    }
  }
  if (out_file.empty()) {
    std::cout << csv.str();
  } else {
    write_file(out_file, csv.str());
    std::cout << "geometry table -> " << out_file << "\n";
  }
  return 0;
}

int run_analyze_mecke(const CommonOptions& common, int dim, const std::string& domain_text,
                      double intensity, double radius, int integrand_samples, int process_samples,
                      const std::string& out_file) {
  const Domain domain = parse_domain(domain_text, dim);
  Rng rng(common.seed);
  auto isolated = [radius](std::span<const double> x, const PointCloud& cloud) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double dist = nibblepack::pair_distance(cloud.domain, x.data(), cloud.point(i).data());
      if (dist > 0.0 && dist <= radius) return false;
    }
    return true;
  };
  const auto report =
      nibblepack::mecke_check(domain, intensity, isolated, integrand_samples, process_samples, rng);
  ojson j;
  j["predicate"] = "isolated";
  j["radius"] = radius;
  j["intensity"] = intensity;
  j["lhs"] = {{"value", report.lhs.value}, {"std_error", report.lhs.std_error}};
  j["rhs"] = {{"value", report.rhs.value}, {"std_error", report.rhs.std_error}};
  j["seed"] = common.seed;
  j["version"] = kVersion;
  const std::string text = j.dump() + "\n";
  if (out_file.empty()) {
    std::cout << text;
  } else {
    write_file(out_file, text);
    std::cout << "mecke report -> " << out_file << "\n";
  }
  return 0;
}

int run_analyze_poisson_tail(const CommonOptions& common, double mean, double t, int draws) {
  Rng rng(common.seed);
  const double threshold = (1.0 + t) * mean;
  std::size_t exceed = 0;
  for (int i = 0; i < draws; ++i) {
    if (static_cast<double>(rng.poisson(mean)) - mean >= t * mean) ++exceed;
  }
  const double empirical = static_cast<double>(exceed) / draws;
  const double bound = nibblepack::poisson_tail_bound(mean, t);
  std::cout << "P(Y >= " << threshold << ") empirical " << empirical << " bound " << bound
            << (empirical <= bound ? "  [respected]" : "  [VIOLATED]") << "\n";
  return empirical <= bound ? 0 : 4;
}

int run_analyze_concentration(const CommonOptions& common, const std::string& graph_path,
                              bool binary_input, double gamma, double alpha, int trials,
                              double eta, const std::string& out_file) {
  const Graph graph = binary_input ? nibblepack::load_graph_binary(graph_path)
                                   : nibblepack::load_graph_json(graph_path);
  Rng rng(common.seed);
  nibblepack::ConcentrationOptions options;
  options.eta_override = eta;
  const auto report = nibblepack::concentration_tail(graph, gamma, alpha, trials, rng, options);
  auto tail_json = [](const nibblepack::TailReport& r) {
    ojson j;
    j["gamma"] = r.gamma;
    j["alpha"] = r.alpha;
    j["eta"] = r.eta;
    j["delta"] = r.delta;
    j["samples"] = r.samples;
    j["exceed_freq"] = r.exceed_freq;
    j["exceed_se"] = r.exceed_se;
    j["bound"] = r.bound;
    j["bound_respected"] = r.bound_respected;
    j["conditional_mean"] = r.conditional_mean;
    j["conditional_mean_cap"] = r.conditional_mean_cap;
    j["mean_respected"] = r.mean_respected;
    return j;
  };
  ojson j;
  j["degrees"] = tail_json(report.degrees);
  j["codegrees"] = tail_json(report.codegrees);
  j["seed"] = common.seed;
  j["version"] = kVersion;
  const std::string text = j.dump() + "\n";
  if (out_file.empty()) {
    std::cout << text;
  } else {
    write_file(out_file, text);
    std::cout << "concentration report -> " << out_file << "\n";
  }
  return 0;
}

int run_analyze_chunglu(double increment_cap, double variance_cap, int count, double r) {
  std::vector<double> caps(count, increment_cap);
  std::vector<double> vars(count, variance_cap);
  std::cout << nibblepack::chung_lu_bound(caps, vars, r) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson discretization + iterated nibble: packings, spherical codes, and the "
               "verification tooling around them"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // pack
  PackOptions pack;
  auto* pack_cmd = app.add_subcommand("pack", "sample, prune, and extract a packing on a box/ball");
  add_common(pack_cmd, pack.common);
  pack_cmd->add_option("--dim", pack.dim, "ambient dimension")->check(CLI::PositiveNumber);
  pack_cmd->add_option("--domain", pack.domain, "box:L | ball:R");
  pack_cmd->add_option("--intensity", pack.intensity, "points per unit volume");
  pack_cmd->add_option("--radius", pack.radius, "sphere radius r (separation 2r); default r_d");
  pack_cmd->add_option("--degree-cap", pack.degree_cap, "prune: neighborhood cap (<0 disables)");
  pack_cmd->add_option("--codegree-cap", pack.codegree_cap, "prune: shared-region cap (<0 disables)");
  pack_cmd->add_flag("--emit-graph", pack.emit_graph, "also write graph.json");
  pack_cmd->add_option("--max-points", pack.max_points, "expected-point budget");

  // code
  CodeOptions code;
  auto* code_cmd = app.add_subcommand("code", "same pipeline on the unit sphere");
  add_common(code_cmd, code.common);
  code_cmd->add_option("--dim", code.dim, "ambient dimension (sphere is S^{dim-1})")
      ->check(CLI::Range(2, 1024));
  code_cmd->add_option("--theta", code.theta, "minimum pairwise angle");
  code_cmd->add_option("--intensity", code.intensity, "expected number of sampled points");
  code_cmd->add_option("--degree-cap", code.degree_cap, "prune: neighborhood cap (<0 disables)");
  code_cmd->add_option("--codegree-cap", code.codegree_cap, "prune: shared-region cap (<0 disables)");
  code_cmd->add_flag("--emit-graph", code.emit_graph, "also write graph.json");
  code_cmd->add_option("--max-points", code.max_points, "expected-point budget");

  // nibble
  NibbleOptions nibble;
  auto* nibble_cmd = app.add_subcommand("nibble", "run the schedule on a graph file");
  add_common(nibble_cmd, nibble.common);
  nibble_cmd->add_option("--graph", nibble.graph_path, "graph JSON (or binary with --binary)")
      ->required();
  nibble_cmd->add_flag("--binary", nibble.binary_input, "input is the binary edge format");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "generators");
  gen_cmd->require_subcommand(1);

  CommonOptions gen_cloud_common;
  int gen_cloud_dim = 2;
  std::string gen_cloud_domain = "box:10";
  double gen_cloud_intensity = 1.0;
  double gen_cloud_max_points = 2e7;
  std::string gen_cloud_out = "cloud.json";
  auto* gen_cloud_cmd = gen_cmd->add_subcommand("cloud", "Poisson sample on a domain");
  gen_cloud_cmd->add_option("--dim", gen_cloud_dim)->check(CLI::PositiveNumber);
  gen_cloud_cmd->add_option("--domain", gen_cloud_domain, "box:L | ball:R | sphere");
  gen_cloud_cmd->add_option("--intensity", gen_cloud_intensity);
  gen_cloud_cmd->add_option("--seed", gen_cloud_common.seed);
  gen_cloud_cmd->add_option("--max-points", gen_cloud_max_points);
  gen_cloud_cmd->add_option("--out", gen_cloud_out, "output file");

  CommonOptions gen_sharp_common;
  std::uint32_t gen_sharp_n = 240, gen_sharp_delta = 12;
  double gen_sharp_eta = 1.0 / 3.0;
  std::string gen_sharp_out = "sharpness.json";
  bool gen_sharp_binary = false;
  auto* gen_sharp_cmd =
      gen_cmd->add_subcommand("sharpness", "disjoint cliques plus a regular overlay");
  gen_sharp_cmd->add_option("--n", gen_sharp_n)->check(CLI::PositiveNumber);
  gen_sharp_cmd->add_option("--delta", gen_sharp_delta)->check(CLI::PositiveNumber);
  gen_sharp_cmd->add_option("--eta", gen_sharp_eta);
  gen_sharp_cmd->add_option("--seed", gen_sharp_common.seed);
  gen_sharp_cmd->add_option("--out", gen_sharp_out, "output file");
  gen_sharp_cmd->add_flag("--binary", gen_sharp_binary);

  CommonOptions gen_reg_common;
  std::uint32_t gen_reg_n = 1000, gen_reg_delta = 8, gen_reg_cap = 4;
  std::string gen_reg_out = "regular.json";
  bool gen_reg_binary = false;
  auto* gen_reg_cmd = gen_cmd->add_subcommand("regular", "regular graph with a codegree cap");
  gen_reg_cmd->add_option("--n", gen_reg_n)->check(CLI::PositiveNumber);
  gen_reg_cmd->add_option("--delta", gen_reg_delta);
  gen_reg_cmd->add_option("--codegree-cap", gen_reg_cap);
  gen_reg_cmd->add_option("--seed", gen_reg_common.seed);
  gen_reg_cmd->add_option("--max-retries", gen_reg_common.max_retries);
  gen_reg_cmd->add_option("--out", gen_reg_out, "output file");
  gen_reg_cmd->add_flag("--binary", gen_reg_binary);

  std::uint32_t gen_proj_q = 3;
  std::string gen_proj_out = "projective.json";
  bool gen_proj_binary = false;
  auto* gen_proj_cmd =
      gen_cmd->add_subcommand("projective", "point/hyperplane incidence graph over GF(q)");
  gen_proj_cmd->add_option("--q", gen_proj_q, "field order (prime power <= 32)");
  gen_proj_cmd->add_option("--out", gen_proj_out, "output file");
  gen_proj_cmd->add_flag("--binary", gen_proj_binary);

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "tables and empirical checks");
  analyze_cmd->require_subcommand(1);

  std::string ageo_out;
  int ageo_dmin = 4, ageo_dmax = 64;
  auto* ageo_cmd = analyze_cmd->add_subcommand("geometry", "volume/cap inequality table");
  ageo_cmd->add_option("--out", ageo_out, "CSV file (default stdout)");
  ageo_cmd->add_option("--dmin", ageo_dmin);
  ageo_cmd->add_option("--dmax", ageo_dmax);

  CommonOptions amecke_common;
  int amecke_dim = 2;
  std::string amecke_domain = "box:1";
  double amecke_intensity = 5.0, amecke_radius = 0.1;
  int amecke_integrand = 20000, amecke_process = 20000;
  std::string amecke_out;
  auto* amecke_cmd = analyze_cmd->add_subcommand("mecke", "insertion-identity check");
  amecke_cmd->add_option("--dim", amecke_dim);
  amecke_cmd->add_option("--domain", amecke_domain);
  amecke_cmd->add_option("--intensity", amecke_intensity);
  amecke_cmd->add_option("--radius", amecke_radius, "isolation radius for the predicate");
  amecke_cmd->add_option("--integrand-samples", amecke_integrand);
  amecke_cmd->add_option("--process-samples", amecke_process);
  amecke_cmd->add_option("--seed", amecke_common.seed);
  amecke_cmd->add_option("--out", amecke_out);

  CommonOptions atail_common;
  double atail_mean = 20.0, atail_t = 0.5;
  int atail_draws = 1000000;
  auto* atail_cmd = analyze_cmd->add_subcommand("poisson-tail", "empirical tail vs bound");
  atail_cmd->add_option("--mean", atail_mean);
  atail_cmd->add_option("--t", atail_t);
  atail_cmd->add_option("--draws", atail_draws);
  atail_cmd->add_option("--seed", atail_common.seed);

  CommonOptions aconc_common;
  std::string aconc_graph;
  bool aconc_binary = false;
  double aconc_gamma = 0.5, aconc_alpha = 0.5, aconc_eta = -1.0;
  int aconc_trials = 1000;
  std::string aconc_out;
  auto* aconc_cmd = analyze_cmd->add_subcommand("concentration", "shrinkage tails vs bound");
  aconc_cmd->add_option("--graph", aconc_graph)->required();
  aconc_cmd->add_flag("--binary", aconc_binary);
  aconc_cmd->add_option("--gamma", aconc_gamma);
  aconc_cmd->add_option("--alpha", aconc_alpha);
  aconc_cmd->add_option("--eta", aconc_eta, "bound parameter (default: derived from the graph)");
  aconc_cmd->add_option("--trials", aconc_trials);
  aconc_cmd->add_option("--seed", aconc_common.seed);
  aconc_cmd->add_option("--out", aconc_out);

  double achung_r = 2.0, achung_cap = 1.0, achung_var = 0.0;
  int achung_count = 1;
  auto* achung_cmd = analyze_cmd->add_subcommand("chunglu", "martingale deviation bound value");
  achung_cmd->add_option("--r", achung_r);
  achung_cmd->add_option("--increment-cap", achung_cap);
  achung_cmd->add_option("--variance-cap", achung_var);
  achung_cmd->add_option("--count", achung_count);

  CLI11_PARSE(app, argc, argv);

  try {
    if (pack_cmd->parsed()) return run_pack(pack);
    if (code_cmd->parsed()) return run_code(code);
    if (nibble_cmd->parsed()) return run_nibble(nibble);
    if (gen_cloud_cmd->parsed()) {
      return run_gen_cloud(gen_cloud_common, gen_cloud_dim, gen_cloud_domain, gen_cloud_intensity,
                           gen_cloud_out, gen_cloud_max_points);
    }
    if (gen_sharp_cmd->parsed()) {
      return run_gen_sharpness(gen_sharp_common, gen_sharp_n, gen_sharp_delta, gen_sharp_eta,
                               gen_sharp_out, gen_sharp_binary);
    }
    if (gen_reg_cmd->parsed()) {
      return run_gen_regular(gen_reg_common, gen_reg_n, gen_reg_delta, gen_reg_cap, gen_reg_out,
                             gen_reg_binary);
    }
    if (gen_proj_cmd->parsed()) {
      return run_gen_projective(gen_proj_q, gen_proj_out, gen_proj_binary);
    }
    if (ageo_cmd->parsed()) return run_analyze_geometry(ageo_out, ageo_dmin, ageo_dmax);
    if (amecke_cmd->parsed()) {
      return run_analyze_mecke(amecke_common, amecke_dim, amecke_domain, amecke_intensity,
                               amecke_radius, amecke_integrand, amecke_process, amecke_out);
    }
    if (atail_cmd->parsed()) {
      return run_analyze_poisson_tail(atail_common, atail_mean, atail_t, atail_draws);
    }
    if (aconc_cmd->parsed()) {
      return run_analyze_concentration(aconc_common, aconc_graph, aconc_binary, aconc_gamma,
                                       aconc_alpha, aconc_trials, aconc_eta, aconc_out);
    }
    if (achung_cmd->parsed()) {
      return run_analyze_chunglu(achung_cap, achung_var, achung_count, achung_r);
    }
  } catch (const nibblepack::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const nibblepack::ScheduleInfeasible& err) {
    std::cerr << "infeasible: " << err.what() << "\n";
    return 2;
  } catch (const nibblepack::PreconditionViolated& err) {
    std::cerr << "infeasible: " << err.what() << "\n";
    return 2;
  } catch (const nibblepack::CapacityError& err) {
    std::cerr << "infeasible: " << err.what() << "\n";
    return 2;
  } catch (const nibblepack::RetriesExhausted& err) {
    std::cerr << "retries exhausted: " << err.what() << "\n";
    return 3;
  } catch (const nibblepack::InternalCheckFailure& err) {
    std::cerr << "internal invariant failure: " << err.what() << "\n";
    return 4;
  }
  return 0;
}
