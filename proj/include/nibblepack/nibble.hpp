#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nibblepack/graph.hpp"
#include "nibblepack/rng.hpp"

namespace nibblepack {

enum class Mode { Paper, Custom };

/// Knobs for one schedule run. Paper mode derives gamma/alpha/rounds from
/// the graph and refuses to run when that derivation is infeasible; custom
/// mode takes everything explicitly and downgrades hypothesis violations to
/// warnings collected in the result.
struct NibbleParams {
  Mode mode = Mode::Custom;
  double gamma = 0.1;
  double alpha = 0.02;
  int rounds = 8;
  int max_retries = 64;
  bool auto_blowup = false;
  std::uint64_t seed = 0;
};

/// Per-round degree targets: Delta_i = ceil(q^i * (Delta(G)+1)) and
/// codegree budget q^i * Delta2(G), with q = 1 - gamma + 2*alpha.
class Schedule {
 public:
  static Schedule paper(std::uint32_t max_degree, std::uint32_t max_codegree);
  static Schedule custom(std::uint32_t max_degree, std::uint32_t max_codegree, double gamma,
                         double alpha, int rounds);

  std::uint32_t delta(int round) const;
  double codegree_budget(int round) const;
  int rounds() const { return rounds_; }
  double gamma() const { return gamma_; }
  double alpha() const { return alpha_; }
  double q() const { return q_; }
  Mode mode() const { return mode_; }

 private:
  Mode mode_ = Mode::Custom;
  double gamma_ = 0.0;
  double alpha_ = 0.0;
  double q_ = 1.0;
  std::uint32_t degree_plus_one_ = 1;
  double codegree0_ = 0.0;
  int rounds_ = 0;
};

struct StepOutcome {
  std::vector<std::uint32_t> nibble_set;  // A: near-independent sample
  std::vector<std::uint32_t> kept;        // C: shrunken residual vertex set
  int retries = 0;                        // failed attempts before success
  StepFailureCounts failures;
};

/// One nibble: sample A at density gamma/delta, drop A and its neighborhood,
/// then drop every vertex whose residual degree or codegree failed to
/// shrink. Resamples until all five guarantees hold, then re-verifies them
/// on the returned pair:
///   |A| >= (1-alpha) gamma n / delta
///   e(G[A]) <= gamma^2 n / delta
///   |C| >= (1-gamma-alpha) n
///   max degree of G[C]   <= (1-gamma+alpha) delta
///   max codegree of G[C] <= (1-gamma+alpha) max{Delta2(G), 2 sqrt(delta)}
/// Requires every degree in {delta-1, delta} and Delta2(G) <= eta*delta;
/// violations throw in paper mode and are recorded in `warnings` otherwise.
StepOutcome nibble_step(const Graph& g, std::uint32_t delta, double gamma, double alpha,
                        double eta, Rng& rng, int max_retries, Mode mode = Mode::Custom,
                        std::vector<std::string>* warnings = nullptr);

struct RegularizeResult {
  Graph graph;
  bool completed = true;  // false: best-effort pass aborted before all degrees reached the target
};

/// Edge addition until every degree lies in {delta, delta+1}, keeping the
/// maximum codegree at most max{Delta2(G), 1}. Two greedy phases, both
/// restricted to endpoint pairs at graph distance >= 4 and lowest-index
/// first: deficient-with-deficient, then deficient-with-any-room. Strict
/// mode requires n >= 2*delta^4 (which guarantees completion); best-effort
/// mode runs on any input and reports whether it finished.
RegularizeResult regularize(const Graph& g, std::uint32_t delta, bool strict = true);

struct RoundRecord {
  int round = 0;
  std::uint32_t graph_size = 0;
  std::uint32_t delta_target = 0;
  std::uint32_t max_degree = 0;     // realized, before regularization
  std::uint32_t max_codegree = 0;   // realized, before regularization
  std::uint32_t nibble_size = 0;    // |A_i|
  std::size_t nibble_edges = 0;     // e(G_i[A_i])
  std::uint32_t extracted = 0;      // |I_i|
  int retries = 0;
  double millis = 0.0;
  bool regularize_completed = true;
};

struct ScheduleResult {
  std::vector<std::uint32_t> independent_set;
  std::vector<RoundRecord> trace;
  std::vector<std::string> warnings;
  bool verified = false;
  std::uint32_t blowup_copies = 1;
};

/// Alternates regularization and nibble steps, collecting the isolated part
/// of each round's sample. The next round's graph is induced from the
/// current graph's ORIGINAL edges on the kept set; added edges exist only
/// inside the round. Every returned set is re-verified independent.
ScheduleResult run_schedule(const Graph& g, const NibbleParams& params, Rng& rng);

/// True iff no edge of g has both endpoints in `vertices`.
bool verify_independent(const Graph& g, std::span<const std::uint32_t> vertices);

std::string schedule_result_to_json(const ScheduleResult& result, const std::string& params_json,
                                    std::uint64_t seed);
std::string trace_to_csv(const std::vector<RoundRecord>& trace);

}  // namespace nibblepack
