#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bcore/expanded.hpp"
#include "bcore/instance.hpp"

namespace bcore {

// How far a single corrective step moves aspirations: one grid unit, or the
// largest amount that keeps the state short of the next structural change
// (a new tight pair or an aspiration hitting zero).
enum class StepMode { SingleUnit, MinDelta };

struct SolverConfig {
  StepMode step_mode = StepMode::SingleUnit;
  // Class whose copies start at max worth; the other class starts at zero.
  Side over_aspirated_class = Side::V;
  // Re-verify feasibility and pairwise stability after every step; failures
  // throw std::logic_error. Cheap at test scale.
  bool check_invariants = false;
  bool record_iterations = false;
};

enum class StepCase {
  DecreasingAspiration,
  AugmentingPath,
  CopiesExchange,
  AspirationTransfer,
};

const char* step_case_name(StepCase c);

struct IterationRecord {
  long long iter = 0;  // 1-based across the whole solve
  StepCase step_case = StepCase::DecreasingAspiration;
  int f_plus = 0;             // free positive copies after the step
  Money total_v_aspiration = 0;
  Money total_u_aspiration = 0;
  long long outer = 0;        // index of the enclosing free-copy pass
};

struct SolveResult {
  ExpandedState state;
  long long iterations = 0;
  std::vector<IterationRecord> log;  // filled when record_iterations
};

// Directed graph on copies that the solver walks: matched edges point
// u_i -> v_j; tight unmatched-pair edges (a(u_i) + a(v_j) == W(u, v) with
// (u, v) not matched at node level) point v_j -> u_i. Arcs sorted by
// (tail, head).
struct EqualityDigraph {
  std::vector<std::pair<CopyId, CopyId>> arcs;
};

EqualityDigraph build_equality_digraph(const ExpandedState& state,
                                       const Instance& inst);

// Sets every copy of the chosen class to the best worth its node can see
// (max over the opposite class), leaving the other class at zero. From an
// all-zero empty state this yields a feasible, pairwise-stable start.
void over_aspirate(ExpandedState& state, const Instance& inst, Side cls);

// Drives an empty zero state to a stopping state of check_copies_core:
// repeatedly picks the lowest free positive copy and settles it by
// decreasing aspirations, flipping an alternating path to a free opposite
// copy, exchanging onto a zero-aspiration copy of the same class, or
// shifting aspiration across the reachable set. Deterministic; throws
// InternalNonTermination if the safety cap on iterations is hit.
SolveResult solve(const Instance& inst, const SolverConfig& cfg = {});

// CSV with header iter,case,f_plus,total_v_aspiration,total_u_aspiration.
std::string iteration_log_csv(const std::vector<IterationRecord>& log);

}  // namespace bcore
