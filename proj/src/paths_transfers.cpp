#include "bcore/paths_transfers.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "bcore/errors.hpp"

namespace bcore {

namespace {

// Contiguous numbering of all copies: class U block then class V, nodes
// ascending, copy indices ascending.
struct CopyIndexer {
  std::array<std::vector<std::vector<int>>, 2> index_of_copy;
  std::vector<CopyId> copies;

  explicit CopyIndexer(const ExpandedState& state) {
    for (Side s : {Side::U, Side::V}) {
      auto& per_node = index_of_copy[static_cast<int>(s)];
      per_node.resize(state.num_nodes(s));
      for (int n = 0; n < state.num_nodes(s); ++n) {
        for (int i = 1; i <= state.num_copies(s, n); ++i) {
          per_node[n].push_back(static_cast<int>(copies.size()));
          copies.push_back(CopyId{s, n, i});
        }
      }
    }
  }

  int total() const { return static_cast<int>(copies.size()); }
  int of(const CopyId& c) const {
    return index_of_copy[static_cast<int>(c.side)][c.node][c.index - 1];
  }
};

struct BfsResult {
  std::vector<int> parent;  // -1 unvisited, -2 root
  std::vector<int> depth;
};

BfsResult bfs(int root, const std::vector<std::vector<int>>& out) {
  BfsResult r;
  r.parent.assign(out.size(), -1);
  r.depth.assign(out.size(), 0);
  r.parent[root] = -2;
  std::deque<int> queue{root};
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    for (int y : out[x]) {
      if (r.parent[y] == -1) {
        r.parent[y] = x;
        r.depth[y] = r.depth[x] + 1;
        queue.push_back(y);
      }
    }
  }
  return r;
}

class Solver {
 public:
  Solver(const Instance& inst, const SolverConfig& cfg)
      : inst_(inst), cfg_(cfg), state_(inst), ix_(state_) {}

  SolveResult run() {
    over_aspirate(state_, inst_, cfg_.over_aspirated_class);
    if (cfg_.check_invariants) verify_invariants("after over-aspiration");

    // Aspiration mass only ever leaves the over-aspirated class one unit or
    // more per corrective step, which bounds the iteration count; anything
    // past the cap is a bug, not a slow instance.
    const Money cap =
        state_.total_aspiration(cfg_.over_aspirated_class) +
        state_.total_copies() + 16;

    for (;;) {
      const auto f_plus = free_positive_copies(state_);
      if (f_plus.empty()) break;
      ++outer_;
      const CopyId considered = f_plus.front();
      settle(considered, cap);
    }

    SolveResult result;
    result.state = state_;
    result.iterations = iter_;
    result.log = std::move(log_);
    return result;
  }

 private:
  // Applies corrective steps to one considered copy until it is matched or
  // its aspiration reaches zero.
  void settle(const CopyId& considered, Money cap) {
    while (state_.is_free(considered) && state_.aspiration(considered) > 0) {
      if (iter_ >= cap) {
        throw InternalNonTermination(
            "solver exceeded its step budget of " + std::to_string(cap));
      }
      apply_one_step(considered);
    }
  }

  void apply_one_step(const CopyId& considered) {
    const Side cls = considered.side;
    const auto oriented = oriented_adjacency(cls);
    const int root = ix_.of(considered);

    StepCase applied;
    if (oriented[root].empty()) {
      applied = StepCase::DecreasingAspiration;
      decrease_aspiration(considered);
    } else {
      const BfsResult reach = bfs(root, oriented);
      const int augment_target = pick_target(reach, root, [&](const CopyId& c) {
        return c.side != cls && state_.is_free(c);
      });
      const int exchange_target = pick_target(reach, root, [&](const CopyId& c) {
        return c.side == cls && state_.aspiration(c) == 0;
      });
      if (augment_target >= 0) {
        applied = StepCase::AugmentingPath;
        flip_path(reach, augment_target);
      } else if (exchange_target >= 0) {
        applied = StepCase::CopiesExchange;
        flip_path(reach, exchange_target);
      } else {
        applied = StepCase::AspirationTransfer;
        transfer_aspiration(considered, reach, root);
      }
    }

    ++iter_;
    if (cfg_.record_iterations) {
      log_.push_back(IterationRecord{
          iter_, applied, free_positive_count(state_),
          state_.total_aspiration(Side::V), state_.total_aspiration(Side::U),
          outer_});
    }
    if (cfg_.check_invariants) {
      verify_invariants(step_case_name(applied));
    }
  }

  // Adjacency over global copy indices, oriented so that walks start from
  // the considered copy's class: class V walks the digraph as built, class U
  // walks every arc backwards (the mirrored digraph).
  std::vector<std::vector<int>> oriented_adjacency(Side cls) const {
    const EqualityDigraph dg = build_equality_digraph(state_, inst_);
    std::vector<std::vector<int>> out(ix_.total());
    for (const auto& [tail, head] : dg.arcs) {
      if (cls == Side::V) {
        out[ix_.of(tail)].push_back(ix_.of(head));
      } else {
        out[ix_.of(head)].push_back(ix_.of(tail));
      }
    }
    for (auto& list : out) std::sort(list.begin(), list.end());
    return out;
  }

  // Lowest (depth, copy id) reached copy satisfying pred, or -1.
  template <typename Pred>
  int pick_target(const BfsResult& reach, int root, Pred pred) const {
    int best = -1;
    for (int x = 0; x < ix_.total(); ++x) {
      if (x == root || reach.parent[x] == -1) continue;
      if (!pred(ix_.copies[x])) continue;
      if (best == -1 || reach.depth[x] < reach.depth[best] ||
          (reach.depth[x] == reach.depth[best] &&
           ix_.copies[x] < ix_.copies[best])) {
        best = x;
      }
    }
    return best;
  }

  // Alternately adds the tight unmatched edges and removes the matched ones
  // along the parent chain root -> target. Removals first so the adds land
  // on free copies.
  void flip_path(const BfsResult& reach, int target) {
    std::vector<int> path;
    for (int x = target; x != -2; x = reach.parent[x]) path.push_back(x);
    std::reverse(path.begin(), path.end());

    std::vector<CopyEdge> to_add;
    std::vector<CopyEdge> to_remove;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const CopyId a = ix_.copies[path[i]];
      const CopyId b = ix_.copies[path[i + 1]];
      const CopyId u_copy = a.side == Side::U ? a : b;
      const CopyId v_copy = a.side == Side::U ? b : a;
      if (state_.matched_copy(u_copy) == std::optional<CopyId>(v_copy)) {
        to_remove.emplace_back(u_copy, v_copy);
      } else {
        to_add.emplace_back(u_copy, v_copy);
      }
    }
    for (const auto& [u, v] : to_remove) state_.remove_edge(u, v);
    for (const auto& [u, v] : to_add) state_.add_edge(u, v);
  }

  // Step size for lowering the considered copy alone: its whole aspiration,
  // or just enough to make some unmatched pair tight.
  Money decrease_delta(const CopyId& considered) const {
    if (cfg_.step_mode == StepMode::SingleUnit) return 1;
    const NodesSolution sol = reduce(state_, inst_);
    Money delta = state_.aspiration(considered);
    for_each_unmatched_slack(considered, sol, [&](const CopyId&, Money slack) {
      delta = std::min(delta, slack);
    });
    return delta;
  }

  void decrease_aspiration(const CopyId& considered) {
    const Money delta = decrease_delta(considered);
    if (delta < 1) {
      throw std::logic_error("corrective decrease must move at least a unit");
    }
    state_.add_aspiration(considered, -delta);
  }

  // Everything the walk reached splits into the considered copy's class
  // (lowered, together with the considered copy) and the opposite class
  // (raised); matched pairs straddle the split so their sums are unchanged.
  void transfer_aspiration(const CopyId& considered, const BfsResult& reach,
                           int root) {
    std::vector<CopyId> lowered{considered};
    std::vector<CopyId> raised;
    std::vector<bool> raised_mask(ix_.total(), false);
    for (int x = 0; x < ix_.total(); ++x) {
      if (x == root || reach.parent[x] == -1) continue;
      const CopyId c = ix_.copies[x];
      if (c.side == considered.side) {
        lowered.push_back(c);
      } else {
        raised.push_back(c);
        raised_mask[x] = true;
      }
    }

    Money delta = 1;
    if (cfg_.step_mode == StepMode::MinDelta) {
      const NodesSolution sol = reduce(state_, inst_);
      delta = state_.aspiration(lowered.front());
      for (const CopyId& d : lowered) {
        delta = std::min(delta, state_.aspiration(d));
        for_each_unmatched_slack(d, sol, [&](const CopyId& o, Money slack) {
          if (!raised_mask[ix_.of(o)]) delta = std::min(delta, slack);
        });
      }
    }
    if (delta < 1) {
      throw std::logic_error("aspiration transfer must move at least a unit");
    }
    for (const CopyId& d : lowered) state_.add_aspiration(d, -delta);
    for (const CopyId& r : raised) state_.add_aspiration(r, delta);
  }

  // Calls fn(opposite_copy, slack) for every copy of every node the given
  // copy's node is not matched with; slack is the distance from tightness.
  template <typename Fn>
  void for_each_unmatched_slack(const CopyId& c, const NodesSolution& sol,
                                Fn fn) const {
    const Side os = opposite(c.side);
    const Money a = state_.aspiration(c);
    for (int n = 0; n < state_.num_nodes(os); ++n) {
      const bool matched = c.side == Side::U ? sol.pair_matched[c.node][n]
                                             : sol.pair_matched[n][c.node];
      if (matched) continue;
      const Money w =
          c.side == Side::U ? inst_.weight(c.node, n) : inst_.weight(n, c.node);
      for (int i = 1; i <= state_.num_copies(os, n); ++i) {
        const CopyId o{os, n, i};
        fn(o, a + state_.aspiration(o) - w);
      }
    }
  }

  void verify_invariants(const char* context) const {
    const FeasibilityReport feas = check_feasible(state_, inst_);
    const CoreReport core = check_copies_core(state_, inst_);
    if (!feas.ok() || !core.edge_saturation || !core.pairwise_stability) {
      throw std::logic_error(std::string("solver invariant broken ") +
                             context);
    }
  }

  const Instance& inst_;
  SolverConfig cfg_;
  ExpandedState state_;
  CopyIndexer ix_;
  long long iter_ = 0;
  long long outer_ = 0;
  std::vector<IterationRecord> log_;
};

}  // namespace

const char* step_case_name(StepCase c) {
  switch (c) {
    case StepCase::DecreasingAspiration: return "decreasing-aspiration";
    case StepCase::AugmentingPath: return "augmenting-path";
    case StepCase::CopiesExchange: return "copies-exchange";
    case StepCase::AspirationTransfer: return "aspiration-transfer";
  }
  return "?";
}

EqualityDigraph build_equality_digraph(const ExpandedState& state,
                                       const Instance& inst) {
  EqualityDigraph dg;
  for (const auto& [u, v] : state.edges()) dg.arcs.emplace_back(u, v);

  const NodesSolution sol = reduce(state, inst);
  for (int u = 0; u < inst.num_u(); ++u) {
    for (int v = 0; v < inst.num_v(); ++v) {
      if (sol.pair_matched[u][v]) continue;
      for (int j = 1; j <= state.num_copies(Side::V, v); ++j) {
        for (int i = 1; i <= state.num_copies(Side::U, u); ++i) {
          const CopyId ui{Side::U, u, i};
          const CopyId vj{Side::V, v, j};
          if (state.aspiration(ui) + state.aspiration(vj) ==
              inst.weight(u, v)) {
            dg.arcs.emplace_back(vj, ui);
          }
        }
      }
    }
  }
  std::sort(dg.arcs.begin(), dg.arcs.end());
  return dg;
}

void over_aspirate(ExpandedState& state, const Instance& inst, Side cls) {
  for (int n = 0; n < state.num_nodes(cls); ++n) {
    Money best = 0;
    for (int o = 0; o < inst.num_nodes(opposite(cls)); ++o) {
      const Money w =
          cls == Side::U ? inst.weight(n, o) : inst.weight(o, n);
      best = std::max(best, w);
    }
    for (int i = 1; i <= state.num_copies(cls, n); ++i) {
      state.set_aspiration(CopyId{cls, n, i}, best);
    }
  }
}

SolveResult solve(const Instance& inst, const SolverConfig& cfg) {
  return Solver(inst, cfg).run();
}

std::string iteration_log_csv(const std::vector<IterationRecord>& log) {
  std::ostringstream out;
  out << "iter,case,f_plus,total_v_aspiration,total_u_aspiration\n";
  for (const auto& rec : log) {
    out << rec.iter << ',' << step_case_name(rec.step_case) << ','
        << rec.f_plus << ',' << rec.total_v_aspiration << ','
        << rec.total_u_aspiration << '\n';
  }
  return out.str();
}

}  // namespace bcore
