#pragma once

#include <stdexcept>
#include <string>

namespace nibblepack {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed flags, impossible parameter combinations.
struct ConfigError : Error {
  using Error::Error;
};

/// A request would exceed a configured memory/size budget.
struct CapacityError : Error {
  using Error::Error;
};

/// An operation's documented precondition does not hold.
struct PreconditionViolated : Error {
  using Error::Error;
};

/// The preset schedule has no valid round count for the given graph.
struct ScheduleInfeasible : Error {
  using Error::Error;
};

/// Per-condition failure tally for the rejection-sampled nibble step.
struct StepFailureCounts {
  int attempts = 0;
  int nibble_size = 0;    // |A| too small
  int nibble_edges = 0;   // e(G[A]) too large
  int kept_size = 0;      // |C| too small
};

/// Rejection sampling ran out of attempts. Carries diagnostics so the
/// caller can tell which condition is infeasible.
class RetriesExhausted : public Error {
 public:
  RetriesExhausted(const std::string& msg, StepFailureCounts counts, int round = -1)
      : Error(msg), counts(counts), round(round) {}
  StepFailureCounts counts;
  int round;  // -1 when not inside a schedule
};

/// A verified invariant failed: this is a bug, not a user error.
struct InternalCheckFailure : std::logic_error {
  using std::logic_error::logic_error;
};

namespace detail {
[[noreturn]] inline void check_failed(const char* expr, const char* file, int line,
                                      const std::string& msg) {
  throw InternalCheckFailure(std::string(file) + ":" + std::to_string(line) +
                             ": check failed: " + expr + (msg.empty() ? "" : " (" + msg + ")"));
}
}  // namespace detail

// Always-on invariant check; never compiled out.
#define NP_CHECK(cond, msg)                                              \
  do {                                                                   \
    if (!(cond)) ::nibblepack::detail::check_failed(#cond, __FILE__, __LINE__, (msg)); \
  } while (0)

}  // namespace nibblepack
