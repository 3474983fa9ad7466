#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcore/expanded.hpp"
#include "bcore/instance.hpp"
#include "bcore/rng.hpp"

namespace bcore {

enum class InitMode { Zero, RandomOnGrid, Explicit };

enum class Outcome { Skipped, Matched, FailedDecrement, FailedNoOp };

const char* outcome_name(Outcome o);

struct TraceRecord {
  long long iter = 0;  // 1-based
  NodeRef proposer;
  NodeRef receiver;
  Outcome outcome = Outcome::Skipped;
  Money total_feasible_aspiration = 0;
  int matched_edges = 0;
  int f_plus_size = 0;
};

struct RunConfig {
  std::uint64_t seed = 0;
  long long horizon = 0;
  InitMode init_mode = InitMode::Zero;
  // Used when init_mode == Explicit; must be feasible (InfeasibleInitial).
  std::optional<ExpandedState> explicit_state;
  // Check for a stopping state every this many iterations (and once before
  // the first); 0 disables the check and the run always uses the full
  // horizon.
  long long core_check_period = 0;
  bool record_trace = false;
};

struct RunResult {
  ExpandedState state;
  std::vector<TraceRecord> trace;  // filled when record_trace
  bool converged = false;
  // Iteration count at which the periodic check first passed (0 when the
  // initial state already passes). Granularity is core_check_period.
  std::optional<long long> iterations_to_core;
};

// Builds the starting state for a run. RandomOnGrid draws each aspiration
// uniformly from {0, ..., max worth} (class U first, nodes ascending, copy
// indices ascending) with an empty matching. Explicit validates the given
// state and throws InfeasibleInitial if it fails check_feasible.
ExpandedState initial_state(const Instance& inst, InitMode mode,
                            std::uint64_t seed,
                            const ExpandedState* explicit_state = nullptr);

// One proposal round with the pair already chosen; deterministic. Skips if
// the nodes are matched; otherwise compares the pair worth against the sum
// of both sides' reservation aspirations (min over free copies, falling back
// to min over all copies; ties to the lowest copy index). On success the
// chosen copies drop any old edges, connect, and the proposer's copy takes
// the surplus; on failure the proposer lowers its cheapest free positive
// copy one unit, if it has one.
TraceRecord apply_proposal(ExpandedState& state, const Instance& inst,
                           NodeRef proposer, NodeRef receiver);

// Random activation: proposer uniform over all nodes (U block first), then
// receiver uniform over the opposite class. Exactly two next_below draws.
TraceRecord step(ExpandedState& state, const Instance& inst, Rng& rng);

struct EnabledTransition {
  NodeRef proposer;
  NodeRef receiver;
  bool changes_state = false;
};

// Simulates every (proposer, receiver) activation on a copy of the state and
// reports those that would change it. Empty result iff the state is
// absorbing.
std::vector<EnabledTransition> enumerate_enabled_transitions(
    const ExpandedState& state, const Instance& inst);

bool is_absorbing(const ExpandedState& state, const Instance& inst);

// Runs the proposal process for config.horizon iterations (trace numbering
// starts at 1), optionally stopping early at the periodic stopping-state
// check. One Rng stream seeded with config.seed supplies the random-init
// draws (if any) followed by the per-iteration proposer/receiver draws.
RunResult run(const Instance& inst, const RunConfig& config);

// CSV with header
// iter,proposer,receiver,outcome,total_feasible_aspiration,matched_edges,f_plus_size
std::string trace_csv(const std::vector<TraceRecord>& trace,
                      const Instance& inst);

// Sidecar describing a trace: epsilon, seed, horizon, instance digest.
std::string trace_metadata_json(const Instance& inst, const RunConfig& config);

}  // namespace bcore
