#include "bcore/dynamics.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "bcore/errors.hpp"

namespace bcore {

namespace {

// Reservation aspiration of a node: the cheapest free copy, or the cheapest
// copy overall when none is free (it would abandon its old edge). Ties go to
// the lowest copy index.
CopyId reservation_copy(const ExpandedState& state, NodeRef g) {
  const auto free = free_copies(state, g);
  CopyId best{g.side, g.node, 0};
  if (!free.empty()) {
    for (const CopyId& c : free) {
      if (best.index == 0 || state.aspiration(c) < state.aspiration(best)) {
        best = c;
      }
    }
    return best;
  }
  for (int i = 1; i <= state.num_copies(g.side, g.node); ++i) {
    const CopyId c{g.side, g.node, i};
    if (best.index == 0 || state.aspiration(c) < state.aspiration(best)) {
      best = c;
    }
  }
  return best;
}

void fill_counters(const ExpandedState& state, TraceRecord& rec) {
  rec.total_feasible_aspiration = state.total_feasible_aspiration();
  rec.matched_edges = state.matched_edge_count();
  rec.f_plus_size = free_positive_count(state);
}

// Uniform on {0, ..., max worth} per copy: class U first, nodes ascending,
// copy indices ascending.
void draw_random_aspirations(ExpandedState& state, const Instance& inst,
                             Rng& rng) {
  const Money top = inst.max_weight();
  for (Side s : {Side::U, Side::V}) {
    for (int n = 0; n < state.num_nodes(s); ++n) {
      for (int i = 1; i <= state.num_copies(s, n); ++i) {
        state.set_aspiration(CopyId{s, n, i},
                             static_cast<Money>(rng.next_below(
                                 static_cast<std::uint64_t>(top) + 1)));
      }
    }
  }
}

}  // namespace

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Skipped: return "skipped";
    case Outcome::Matched: return "matched";
    case Outcome::FailedDecrement: return "failed-decrement";
    case Outcome::FailedNoOp: return "failed-no-op";
  }
  return "?";
}

ExpandedState initial_state(const Instance& inst, InitMode mode,
                            std::uint64_t seed,
                            const ExpandedState* explicit_state) {
  if (mode == InitMode::Explicit) {
    if (explicit_state == nullptr) {
      throw InfeasibleInitial("explicit initial state missing");
    }
    if (!explicit_state->shape_matches(inst)) {
      throw InfeasibleInitial("initial state shape does not match instance");
    }
    if (!check_feasible(*explicit_state, inst).ok()) {
      throw InfeasibleInitial("initial state fails the feasibility check");
    }
    return *explicit_state;
  }
  ExpandedState state(inst);
  if (mode == InitMode::RandomOnGrid) {
    Rng rng(seed);
    draw_random_aspirations(state, inst, rng);
  }
  return state;
}

TraceRecord apply_proposal(ExpandedState& state, const Instance& inst,
                           NodeRef proposer, NodeRef receiver) {
  if (proposer.side == receiver.side) {
    throw std::logic_error("proposals run between opposite classes");
  }
  TraceRecord rec;
  rec.proposer = proposer;
  rec.receiver = receiver;

  const NodesSolution sol = reduce(state, inst);
  const int u_node = proposer.side == Side::U ? proposer.node : receiver.node;
  const int v_node = proposer.side == Side::U ? receiver.node : proposer.node;
  if (sol.pair_matched[u_node][v_node]) {
    rec.outcome = Outcome::Skipped;
    fill_counters(state, rec);
    return rec;
  }

  const Money w = inst.weight(u_node, v_node);
  const CopyId p_copy = reservation_copy(state, proposer);
  const CopyId r_copy = reservation_copy(state, receiver);
  const Money ask_p = state.aspiration(p_copy);
  const Money ask_r = state.aspiration(r_copy);

  // The strict comparison is the grid form of "p can raise its claim by one
  // unit and the pair still fits".
  assert((ask_p + ask_r < w) == (ask_p + 1 + ask_r <= w));
  if (ask_p + ask_r < w) {
    if (const auto old = state.matched_copy(p_copy)) {
      const CopyId& u = p_copy.side == Side::U ? p_copy : *old;
      const CopyId& v = p_copy.side == Side::U ? *old : p_copy;
      state.remove_edge(u, v);
    }
    if (const auto old = state.matched_copy(r_copy)) {
      const CopyId& u = r_copy.side == Side::U ? r_copy : *old;
      const CopyId& v = r_copy.side == Side::U ? *old : r_copy;
      state.remove_edge(u, v);
    }
    const CopyId& u = p_copy.side == Side::U ? p_copy : r_copy;
    const CopyId& v = p_copy.side == Side::U ? r_copy : p_copy;
    state.add_edge(u, v);
    // The proposer pockets the whole surplus; the receiver keeps its ask.
    state.set_aspiration(p_copy, w - ask_r);
    rec.outcome = Outcome::Matched;
  } else {
    const auto lowerable = free_copies(state, proposer, /*positive_only=*/true);
    if (!lowerable.empty()) {
      CopyId lowest = lowerable.front();
      for (const CopyId& c : lowerable) {
        if (state.aspiration(c) < state.aspiration(lowest)) lowest = c;
      }
      state.add_aspiration(lowest, -1);
      rec.outcome = Outcome::FailedDecrement;
    } else {
      rec.outcome = Outcome::FailedNoOp;
    }
  }
  fill_counters(state, rec);
  return rec;
}

TraceRecord step(ExpandedState& state, const Instance& inst, Rng& rng) {
  const int nu = inst.num_u();
  const int nv = inst.num_v();
  const int p = static_cast<int>(rng.next_below(nu + nv));
  const NodeRef proposer =
      p < nu ? NodeRef{Side::U, p} : NodeRef{Side::V, p - nu};
  const int opp = proposer.side == Side::U ? nv : nu;
  const NodeRef receiver{opposite(proposer.side),
                         static_cast<int>(rng.next_below(opp))};
  return apply_proposal(state, inst, proposer, receiver);
}

std::vector<EnabledTransition> enumerate_enabled_transitions(
    const ExpandedState& state, const Instance& inst) {
  std::vector<EnabledTransition> out;
  auto consider = [&](NodeRef proposer, NodeRef receiver) {
    ExpandedState probe = state;
    apply_proposal(probe, inst, proposer, receiver);
    if (!(probe == state)) {
      out.push_back(EnabledTransition{proposer, receiver, true});
    }
  };
  for (int u = 0; u < inst.num_u(); ++u) {
    for (int v = 0; v < inst.num_v(); ++v) {
      consider(NodeRef{Side::U, u}, NodeRef{Side::V, v});
    }
  }
  for (int v = 0; v < inst.num_v(); ++v) {
    for (int u = 0; u < inst.num_u(); ++u) {
      consider(NodeRef{Side::V, v}, NodeRef{Side::U, u});
    }
  }
  return out;
}

bool is_absorbing(const ExpandedState& state, const Instance& inst) {
  return enumerate_enabled_transitions(state, inst).empty();
}

RunResult run(const Instance& inst, const RunConfig& config) {
  Rng rng(config.seed);
  RunResult result;
  // The random-init draws come off the same stream as the activation draws,
  // in that order.
  if (config.init_mode == InitMode::RandomOnGrid) {
    result.state = ExpandedState(inst);
    draw_random_aspirations(result.state, inst, rng);
  } else {
    result.state = initial_state(
        inst, config.init_mode, config.seed,
        config.explicit_state ? &*config.explicit_state : nullptr);
  }

  const bool checking = config.core_check_period > 0;
  if (checking && check_copies_core(result.state, inst).is_core) {
    result.converged = true;
    result.iterations_to_core = 0;
    return result;
  }
  for (long long h = 1; h <= config.horizon; ++h) {
    const TraceRecord rec = [&] {
      TraceRecord r = step(result.state, inst, rng);
      r.iter = h;
      return r;
    }();
    if (config.record_trace) result.trace.push_back(rec);
    if (checking &&
        (h % config.core_check_period == 0 || h == config.horizon) &&
        check_copies_core(result.state, inst).is_core) {
      result.converged = true;
      result.iterations_to_core = h;
      break;
    }
  }
  return result;
}

std::string trace_csv(const std::vector<TraceRecord>& trace,
                      const Instance& inst) {
  std::ostringstream out;
  out << "iter,proposer,receiver,outcome,total_feasible_aspiration,"
         "matched_edges,f_plus_size\n";
  for (const auto& rec : trace) {
    out << rec.iter << ',' << inst.node_id(rec.proposer) << ','
        << inst.node_id(rec.receiver) << ',' << outcome_name(rec.outcome)
        << ',' << rec.total_feasible_aspiration << ',' << rec.matched_edges
        << ',' << rec.f_plus_size << '\n';
  }
  return out.str();
}

std::string trace_metadata_json(const Instance& inst,
                                const RunConfig& config) {
  nlohmann::json j;
  j["epsilon"] = to_decimal_string(inst.epsilon);
  j["horizon"] = config.horizon;
  j["instance_digest"] = instance_digest(inst);
  j["seed"] = config.seed;
  return j.dump(2);
}

}  // namespace bcore
