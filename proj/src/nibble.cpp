#include "nibblepack/nibble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nibblepack {

namespace {

double natural_log(double x) { return std::log(x); }

}  // namespace

Schedule Schedule::paper(std::uint32_t max_degree, std::uint32_t max_codegree) {
  Schedule s;
  s.mode_ = Mode::Paper;
  if (max_degree < 2048) {
    throw ScheduleInfeasible("preset schedule needs max degree >= 2^11; got " +
                             std::to_string(max_degree));
  }
  const double log_delta = natural_log(static_cast<double>(max_degree));
  s.gamma_ = 1.0 / (log_delta * log_delta);
  s.alpha_ = 2.0 * s.gamma_ * s.gamma_;
  s.q_ = 1.0 - s.gamma_ + 2.0 * s.alpha_;
  s.degree_plus_one_ = max_degree + 1;
  s.codegree0_ = max_codegree;
  const double rounds_real = (log_delta - 32.0 * (natural_log(log_delta) + 2.0)) / s.gamma_;
  if (rounds_real < 1.0) {
    // log(D) > 32(log log(D) + 2) first holds near D ~ e^240.
    throw ScheduleInfeasible(
        "preset schedule has no positive round count at max degree " + std::to_string(max_degree) +
        "; needs log D > 32(log log D + 2), which first holds around D ~ 1e104");
  }
  s.rounds_ = static_cast<int>(rounds_real);
  return s;
}

Schedule Schedule::custom(std::uint32_t max_degree, std::uint32_t max_codegree, double gamma,
                          double alpha, int rounds) {
  if (!(gamma > 0.0 && gamma <= 0.5)) throw ConfigError("gamma must lie in (0, 1/2]");
  if (!(alpha > 0.0 && alpha <= gamma)) throw ConfigError("alpha must lie in (0, gamma]");
  if (rounds < 1) throw ConfigError("need at least one round");
  Schedule s;
  s.mode_ = Mode::Custom;
  s.gamma_ = gamma;
  s.alpha_ = alpha;
  s.q_ = 1.0 - gamma + 2.0 * alpha;
  if (s.q_ > 1.0) {
    throw ConfigError("alpha must be <= gamma/2 so the degree targets do not grow");
  }
  s.degree_plus_one_ = max_degree + 1;
  s.codegree0_ = max_codegree;
  s.rounds_ = rounds;
  return s;
}

std::uint32_t Schedule::delta(int round) const {
  const double raw = std::ceil(std::pow(q_, round) * static_cast<double>(degree_plus_one_));
  return static_cast<std::uint32_t>(std::max(1.0, raw));
}

double Schedule::codegree_budget(int round) const {
  return std::pow(q_, round) * codegree0_;
}

// ---------------------------------------------------------------------------

StepOutcome nibble_step(const Graph& g, std::uint32_t delta, double gamma, double alpha,
                        double eta, Rng& rng, int max_retries, Mode mode,
                        std::vector<std::string>* warnings) {
  const std::uint32_t n = g.num_vertices();
  NP_CHECK(delta >= 1, "delta must be >= 1");
  if (!(gamma > 0.0 && gamma <= 0.5)) throw ConfigError("gamma must lie in (0, 1/2]");
  if (!(alpha > 0.0 && alpha <= gamma)) throw ConfigError("alpha must lie in (0, gamma]");
  if (max_retries < 1) throw ConfigError("max_retries must be >= 1");

  auto complain = [&](const std::string& msg) {
    if (mode == Mode::Paper) throw PreconditionViolated(msg);
    if (warnings) warnings->push_back(msg);
  };

  for (std::uint32_t v = 0; v < n; ++v) {
    const std::uint32_t deg = g.degree(v);
    if (deg + 1 != delta && deg != delta) {
      complain("degree " + std::to_string(deg) + " at vertex " + std::to_string(v) +
               " outside {delta-1, delta} = {" + std::to_string(delta - 1) + ", " +
               std::to_string(delta) + "}");
      break;
    }
  }

  const std::uint32_t codegree_in = degree_profile(g).max_codegree;
  if (static_cast<double>(codegree_in) > eta * delta) {
    complain("max codegree " + std::to_string(codegree_in) + " exceeds eta*delta = " +
             std::to_string(eta * delta));
  }

  // Residual-shrinkage thresholds; the codegree floor is 2*sqrt(delta).
  const double eta_effective =
      std::max(static_cast<double>(codegree_in), 2.0 * std::sqrt(static_cast<double>(delta)));
  const double degree_threshold = (1.0 - gamma + alpha) * delta;
  const double codegree_threshold = (1.0 - gamma + alpha) * eta_effective;

  const double p = gamma / delta;
  const double min_nibble_size = (1.0 - alpha) * gamma * n / delta;
  const double max_nibble_edges = gamma * gamma * n / delta;
  const double min_kept_size = (1.0 - gamma - alpha) * n;

  StepOutcome outcome;
  std::vector<std::uint32_t> nibble;
  std::vector<char> removed(n);  // A ∪ N(A)
  std::vector<char> bad(n);      // degree/codegree violations in the residual
  std::vector<std::uint32_t> count(n, 0);
  std::vector<std::uint32_t> touched;

  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    ++outcome.failures.attempts;
    nibble.clear();
    // p-random sample via geometric skips.
    if (p > 0.0 && n > 0) {
      const double log_one_minus_p = std::log1p(-p);
      double position = -1.0;
      while (true) {
        const double u = 1.0 - rng.uniform01();
        position += 1.0 + std::floor(std::log(u) / log_one_minus_p);
        if (position >= n) break;
        nibble.push_back(static_cast<std::uint32_t>(position));
      }
    }

    if (static_cast<double>(nibble.size()) < min_nibble_size) {
      ++outcome.failures.nibble_size;
      continue;
    }

    std::size_t nibble_edges = 0;
    std::fill(removed.begin(), removed.end(), 0);
    for (std::uint32_t a : nibble) removed[a] = 1;
    for (std::uint32_t a : nibble) {
      for (std::uint32_t b : g.neighbors(a)) {
        if (b > a && removed[b]) ++nibble_edges;
      }
    }
    if (static_cast<double>(nibble_edges) > max_nibble_edges) {
      ++outcome.failures.nibble_edges;
      continue;
    }
    for (std::uint32_t a : nibble) {
      for (std::uint32_t b : g.neighbors(a)) removed[b] = 1;
    }

    // Residual degrees and the degree part of the bad set.
    std::fill(bad.begin(), bad.end(), 0);
    std::size_t residual_size = 0;
    std::size_t bad_count = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (removed[v]) continue;
      ++residual_size;
      std::uint32_t deg = 0;
      for (std::uint32_t w : g.neighbors(v)) deg += removed[w] ? 0u : 1u;
      if (static_cast<double>(deg) >= degree_threshold) {
        bad[v] = 1;
        ++bad_count;
      }
    }
    // Degree violations alone can already sink the size condition; skip the
    // expensive codegree scan when they do.
    if (static_cast<double>(residual_size - bad_count) < min_kept_size) {
      ++outcome.failures.kept_size;
      continue;
    }

    // Codegree part of the bad set: wedge counts within the residual.
    for (std::uint32_t u = 0; u < n; ++u) {
      if (removed[u]) continue;
      for (std::uint32_t w : g.neighbors(u)) {
        if (removed[w]) continue;
        for (std::uint32_t v : g.neighbors(w)) {
          if (v <= u || removed[v]) continue;
          if (count[v] == 0) touched.push_back(v);
          ++count[v];
        }
      }
      for (std::uint32_t v : touched) {
        if (static_cast<double>(count[v]) >= codegree_threshold) {
          if (!bad[u]) {
            bad[u] = 1;
            ++bad_count;
          }
          if (!bad[v]) {
            bad[v] = 1;
            ++bad_count;
          }
        }
        count[v] = 0;
      }
      touched.clear();
    }

    if (static_cast<double>(residual_size - bad_count) < min_kept_size) {
      ++outcome.failures.kept_size;
      continue;
    }

    outcome.nibble_set = nibble;
    outcome.kept.clear();
    outcome.kept.reserve(residual_size - bad_count);
    for (std::uint32_t v = 0; v < n; ++v) {
      if (!removed[v] && !bad[v]) outcome.kept.push_back(v);
    }
    outcome.retries = attempt;

    // Re-verify all five conclusions on the returned pair; these are hard
    // postconditions, not sampled hopes.
    NP_CHECK(static_cast<double>(outcome.nibble_set.size()) >= min_nibble_size, "|A| shrank");
    NP_CHECK(static_cast<double>(nibble_edges) <= max_nibble_edges, "e(G[A]) grew");
    NP_CHECK(static_cast<double>(outcome.kept.size()) >= min_kept_size, "|C| shrank");
    const Graph kept_graph = induced_subgraph(g, outcome.kept);
    const DegreeProfile kept_profile = degree_profile(kept_graph);
    NP_CHECK(static_cast<double>(kept_profile.max_degree) <= degree_threshold,
             "residual degree bound failed");
    NP_CHECK(static_cast<double>(kept_profile.max_codegree) <= codegree_threshold,
             "residual codegree bound failed");
    for (std::uint32_t a : outcome.nibble_set) {
      for (std::uint32_t b : g.neighbors(a)) {
        NP_CHECK(!std::binary_search(outcome.kept.begin(), outcome.kept.end(), b),
                 "kept set touches the sampled neighborhood");
      }
    }
    return outcome;
  }

  throw RetriesExhausted(
      "no admissible nibble in " + std::to_string(max_retries + 1) + " attempts (size fails: " +
          std::to_string(outcome.failures.nibble_size) + ", edge fails: " +
          std::to_string(outcome.failures.nibble_edges) + ", residual fails: " +
          std::to_string(outcome.failures.kept_size) + ")",
      outcome.failures);
}

// ---------------------------------------------------------------------------

namespace {

// Truncated BFS marking everything within the given distance of start.
// Stamps persist across calls via the epoch counter.
struct ReachMarker {
  std::vector<std::uint32_t> stamp;
  std::vector<std::uint32_t> queue;
  std::vector<std::uint32_t> depth;
  std::uint32_t epoch = 0;

  void reset(std::uint32_t n) {
    stamp.assign(n, 0);
    depth.assign(n, 0);
    epoch = 0;
  }
  void begin() { ++epoch; }
  bool marked(std::uint32_t v) const { return stamp[v] == epoch; }

  void mark_ball(const std::vector<std::vector<std::uint32_t>>& adj, std::uint32_t start,
                 std::uint32_t radius) {
    if (!marked(start)) {
      stamp[start] = epoch;
      depth[start] = 0;
      queue.push_back(start);
    } else if (depth[start] > 0) {
      depth[start] = 0;
      queue.push_back(start);
    }
    std::size_t head = queue.size() - 1;
    while (head < queue.size()) {
      const std::uint32_t x = queue[head++];
      if (depth[x] >= radius) continue;
      for (std::uint32_t y : adj[x]) {
        if (!marked(y)) {
          stamp[y] = epoch;
          depth[y] = depth[x] + 1;
          queue.push_back(y);
        } else if (depth[y] > depth[x] + 1) {
          depth[y] = depth[x] + 1;
          queue.push_back(y);
        }
      }
    }
    queue.clear();
  }
};

}  // namespace

RegularizeResult regularize(const Graph& g, std::uint32_t delta, bool strict) {
  const std::uint32_t n = g.num_vertices();
  const DegreeProfile before = degree_profile(g);
  if (strict) {
    if (before.max_degree > delta) {
      throw PreconditionViolated("max degree " + std::to_string(before.max_degree) +
                                 " exceeds target " + std::to_string(delta));
    }
    const double needed = 2.0 * std::pow(static_cast<double>(delta), 4.0);
    if (static_cast<double>(n) < needed) {
      throw PreconditionViolated("need n >= 2*delta^4 = " + std::to_string(needed) + ", got " +
                                 std::to_string(n));
    }
  }

  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    const auto nb = g.neighbors(v);
    adj[v].assign(nb.begin(), nb.end());
  }
  std::vector<std::uint32_t> deg(n);
  for (std::uint32_t v = 0; v < n; ++v) deg[v] = static_cast<std::uint32_t>(adj[v].size());

  std::set<std::uint32_t> deficient;  // degree < delta
  std::set<std::uint32_t> open;       // degree <= delta
  for (std::uint32_t v = 0; v < n; ++v) {
    if (deg[v] < delta) deficient.insert(v);
    if (deg[v] <= delta) open.insert(v);
  }

  ReachMarker marker;
  marker.reset(n);
  bool aborted = false;

  auto add_edge = [&](std::uint32_t u, std::uint32_t v) {
    adj[u].push_back(v);
    adj[v].push_back(u);
    for (std::uint32_t x : {u, v}) {
      ++deg[x];
      if (deg[x] >= delta) deficient.erase(x);
      if (deg[x] > delta) open.erase(x);
    }
  };

  // Once a vertex has no admissible partner it never regains one: partner
  // pools only shrink and edge additions only shorten distances. A single
  // ascending sweep therefore reproduces the lowest-index-first greedy.
  auto run_phase = [&](bool partners_must_be_deficient) {
    for (std::uint32_t u = 0; u < n; ++u) {
      if (deg[u] >= delta) continue;
      bool first_partner_search = true;
      while (deg[u] < delta) {
        if (first_partner_search) {
          marker.begin();
          marker.mark_ball(adj, u, 3);
          first_partner_search = false;
        }
        const auto& pool = partners_must_be_deficient ? deficient : open;
        std::uint32_t partner = UINT32_MAX;
        for (std::uint32_t w : pool) {
          if (w != u && !marker.marked(w)) {
            partner = w;
            break;
          }
        }
        if (partner == UINT32_MAX) {
          if (partners_must_be_deficient) break;  // natural end for this vertex
          if (strict) {
            // Unreachable when n >= 2*delta^4: the 3-ball around u can
            // never swallow every open vertex.
            throw InternalCheckFailure("open-pool exhaustion despite size precondition");
          }
          aborted = true;
          return;
        }
        add_edge(u, partner);
        marker.mark_ball(adj, partner, 2);  // partner's 2-ball is now within 3 of u
      }
    }
  };

  run_phase(true);
  if (!aborted) run_phase(false);

  RegularizeResult result;
  result.graph = Graph::from_adjacency(std::move(adj));
  result.completed = deficient.empty() && before.max_degree <= delta + 1;

  const DegreeProfile after = degree_profile(result.graph);
  NP_CHECK(result.graph.num_edges() >= g.num_edges(), "edges were lost");
  for (const auto& [u, v] : g.edge_list()) {
    NP_CHECK(result.graph.has_edge(u, v), "an original edge disappeared");
  }
  NP_CHECK(after.max_codegree <= std::max<std::uint32_t>(before.max_codegree, 1),
           "codegree exceeded max{codegree(G), 1}");
  if (strict) {
    NP_CHECK(result.completed, "strict regularization failed to finish");
  }
  if (result.completed) {
    for (std::uint32_t v = 0; v < n; ++v) {
      NP_CHECK(deg[v] == delta || deg[v] == delta + 1, "degree escaped {delta, delta+1}");
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

bool verify_independent(const Graph& g, std::span<const std::uint32_t> vertices) {
  std::vector<char> in_set(g.num_vertices(), 0);
  for (std::uint32_t v : vertices) {
    NP_CHECK(v < g.num_vertices(), "vertex id out of range");
    in_set[v] = 1;
  }
  for (std::uint32_t v : vertices) {
    for (std::uint32_t w : g.neighbors(v)) {
      if (in_set[w]) return false;
    }
  }
  return true;
}

ScheduleResult run_schedule(const Graph& g_in, const NibbleParams& params, Rng& rng) {
  ScheduleResult result;

  DegreeProfile profile0 = degree_profile(g_in);
  Schedule schedule =
      params.mode == Mode::Paper
          ? Schedule::paper(profile0.max_degree, profile0.max_codegree)
          : Schedule::custom(profile0.max_degree, profile0.max_codegree, params.gamma,
                             params.alpha, params.rounds);
  if (params.mode == Mode::Paper) {
    const double gamma_floor = 8.0 * std::pow(static_cast<double>(profile0.max_degree), -0.125);
    if (schedule.gamma() < gamma_floor || schedule.gamma() > 0.5) {
      throw PreconditionViolated("derived gamma outside [8*Delta^{-1/8}, 1/2]");
    }
  }

  // Enough vertices must survive T shrinking rounds to keep regularization
  // applicable; too-small inputs are cloned when auto blow-up is on.
  Graph blown;
  const Graph* work = &g_in;
  {
    const double q3 = schedule.q() - 3.0 * schedule.alpha();
    const double needed = 2.0 * std::pow(static_cast<double>(profile0.max_degree) + 1.0, 4.0) *
                          std::pow(std::max(q3, 1e-9), -static_cast<double>(schedule.rounds()));
    if (params.auto_blowup && static_cast<double>(g_in.num_vertices()) < needed) {
      const double copies_real = std::ceil(needed / std::max<double>(g_in.num_vertices(), 1));
      if (copies_real * g_in.num_vertices() > 5e6) {
        throw CapacityError("blow-up to " + std::to_string(copies_real) +
                            " copies exceeds the size budget");
      }
      result.blowup_copies = static_cast<std::uint32_t>(copies_real);
      blown = disjoint_copies(g_in, result.blowup_copies);
      work = &blown;
    }
  }
  const Graph& g = *work;
  const std::uint32_t n0 = g.num_vertices();

  Graph current = g;
  std::vector<std::uint32_t> to_original(n0);
  for (std::uint32_t v = 0; v < n0; ++v) to_original[v] = v;

  std::vector<char> claimed(n0, 0);  // union of all sampled sets, original ids

  for (int round = 0; round < schedule.rounds(); ++round) {
    if (current.num_vertices() == 0) break;
    if (current.num_edges() == 0) {
      // An edgeless residual is independent outright; sweep it and stop.
      RoundRecord record;
      record.round = round;
      record.graph_size = current.num_vertices();
      record.delta_target = schedule.delta(round);
      record.nibble_size = current.num_vertices();
      record.extracted = current.num_vertices();
      for (std::uint32_t v = 0; v < current.num_vertices(); ++v) {
        const std::uint32_t orig = to_original[v];
        NP_CHECK(!claimed[orig], "sweep hit a claimed vertex");
        result.independent_set.push_back(orig);
      }
      result.trace.push_back(record);
      break;
    }
    const auto t0 = std::chrono::steady_clock::now();

    RoundRecord record;
    record.round = round;
    record.graph_size = current.num_vertices();
    record.delta_target = schedule.delta(round);

    const DegreeProfile profile = degree_profile(current);
    record.max_degree = profile.max_degree;
    record.max_codegree = profile.max_codegree;
    if (profile.max_degree > record.delta_target - 1) {
      const std::string msg = "round " + std::to_string(round) + ": max degree " +
                              std::to_string(profile.max_degree) + " exceeds target " +
                              std::to_string(record.delta_target - 1);
      if (params.mode == Mode::Paper) throw PreconditionViolated(msg);
      result.warnings.push_back(msg);
    }

    RegularizeResult reg = regularize(current, record.delta_target - 1,
                                      /*strict=*/params.mode == Mode::Paper);
    record.regularize_completed = reg.completed;
    if (!reg.completed) {
      result.warnings.push_back("round " + std::to_string(round) +
                                ": regularization was best-effort only");
    }

    const double eta = std::max(schedule.codegree_budget(round),
                                2.0 * std::sqrt(static_cast<double>(record.delta_target))) /
                       record.delta_target;
    StepOutcome step;
    try {
      step = nibble_step(reg.graph, record.delta_target, schedule.gamma(), schedule.alpha(), eta,
                         rng, params.max_retries, params.mode, &result.warnings);
    } catch (RetriesExhausted& err) {
      throw RetriesExhausted(std::string(err.what()) + " (round " + std::to_string(round) + ")",
                             err.counts, round);
    }
    record.retries = step.retries;
    record.nibble_size = static_cast<std::uint32_t>(step.nibble_set.size());

    // Extraction uses the round's ORIGINAL edges, not the regularized ones.
    std::vector<char> in_nibble(current.num_vertices(), 0);
    for (std::uint32_t a : step.nibble_set) in_nibble[a] = 1;
    std::size_t nibble_edges = 0;
    std::vector<std::uint32_t> isolated;
    for (std::uint32_t a : step.nibble_set) {
      bool clean = true;
      for (std::uint32_t b : current.neighbors(a)) {
        if (in_nibble[b]) {
          clean = false;
          if (b > a) ++nibble_edges;
        }
      }
      if (clean) isolated.push_back(a);
    }
    record.nibble_edges = nibble_edges;
    record.extracted = static_cast<std::uint32_t>(isolated.size());
    NP_CHECK(isolated.size() + 2 * nibble_edges >= step.nibble_set.size(),
             "every internal edge disqualifies at most two sampled vertices");

    // Disjointness across rounds, in the input graph's terms: nothing
    // sampled now may touch anything sampled before.
    for (std::uint32_t a : step.nibble_set) {
      const std::uint32_t orig = to_original[a];
      NP_CHECK(!claimed[orig], "sampled vertex was claimed twice");
      for (std::uint32_t w : g.neighbors(orig)) {
        NP_CHECK(!claimed[w], "sampled set touches an earlier round's sample");
      }
    }
    for (std::uint32_t a : step.nibble_set) claimed[to_original[a]] = 1;
    for (std::uint32_t a : isolated) result.independent_set.push_back(to_original[a]);

    // Shrink: induced subgraph of the ORIGINAL round edges on the kept set.
    std::vector<std::uint32_t> next_map(step.kept.size());
    for (std::size_t i = 0; i < step.kept.size(); ++i) next_map[i] = to_original[step.kept[i]];
    current = induced_subgraph(current, step.kept);
    to_original = std::move(next_map);

    record.millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.trace.push_back(record);
  }

  std::sort(result.independent_set.begin(), result.independent_set.end());
  result.verified = verify_independent(g, result.independent_set);
  NP_CHECK(result.verified, "returned set is not independent");
  return result;
}

std::string schedule_result_to_json(const ScheduleResult& result, const std::string& params_json,
                                    std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["independent_set"] = result.independent_set;
  j["size"] = result.independent_set.size();
  j["verified"] = result.verified;
  j["seed"] = seed;
  j["params"] = nlohmann::ordered_json::parse(params_json);
  j["blowup_copies"] = result.blowup_copies;
  j["warnings"] = result.warnings;
  return j.dump();
}

std::string trace_to_csv(const std::vector<RoundRecord>& trace) {
  std::ostringstream out;
  out << "i,n_i,delta_i,delta2_i,A_i,eGA_i,I_i,retries,ms\n";
  for (const auto& r : trace) {
    out << r.round << ',' << r.graph_size << ',' << r.max_degree << ',' << r.max_codegree << ','
        << r.nibble_size << ',' << r.nibble_edges << ',' << r.extracted << ',' << r.retries << ','
        << r.millis << '\n';
  }
  return out.str();
}

}  // namespace nibblepack
