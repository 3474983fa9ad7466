#include "bcore/expanded.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "bcore/errors.hpp"

namespace bcore {

namespace {

using nlohmann::json;

std::string copy_label(const Instance& inst, const CopyId& c) {
  return inst.node_id(c.node_ref()) + "#" + std::to_string(c.index);
}

}  // namespace

std::ostream& operator<<(std::ostream& os, const CopyId& c) {
  return os << side_name(c.side) << c.node << "#" << c.index;
}

ExpandedState::ExpandedState(const Instance& inst) {
  for (Side s : {Side::U, Side::V}) {
    const int si = static_cast<int>(s);
    asp_[si].resize(inst.num_nodes(s));
    mate_[si].resize(inst.num_nodes(s));
    for (int n = 0; n < inst.num_nodes(s); ++n) {
      asp_[si][n].assign(inst.b_value(NodeRef{s, n}), 0);
      mate_[si][n].assign(inst.b_value(NodeRef{s, n}), kFree);
    }
  }
}

int ExpandedState::total_copies() const {
  int total = 0;
  for (const auto& side : asp_) {
    for (const auto& node : side) total += static_cast<int>(node.size());
  }
  return total;
}

bool ExpandedState::shape_matches(const Instance& inst) const {
  for (Side s : {Side::U, Side::V}) {
    if (num_nodes(s) != inst.num_nodes(s)) return false;
    for (int n = 0; n < inst.num_nodes(s); ++n) {
      if (num_copies(s, n) != inst.b_value(NodeRef{s, n})) return false;
    }
  }
  return true;
}

void ExpandedState::check_copy(const CopyId& c) const {
  const int si = static_cast<int>(c.side);
  if (c.node < 0 || c.node >= static_cast<int>(asp_[si].size()) ||
      c.index < 1 || c.index > static_cast<int>(asp_[si][c.node].size())) {
    throw std::logic_error("copy id out of range");
  }
}

Money ExpandedState::aspiration(const CopyId& c) const {
  check_copy(c);
  return asp_[static_cast<int>(c.side)][c.node][c.index - 1];
}

void ExpandedState::set_aspiration(const CopyId& c, Money a) {
  check_copy(c);
  asp_[static_cast<int>(c.side)][c.node][c.index - 1] = a;
}

void ExpandedState::add_aspiration(const CopyId& c, Money delta) {
  check_copy(c);
  asp_[static_cast<int>(c.side)][c.node][c.index - 1] += delta;
}

std::optional<CopyId> ExpandedState::matched_copy(const CopyId& c) const {
  check_copy(c);
  const auto mate = mate_[static_cast<int>(c.side)][c.node][c.index - 1];
  if (mate == kFree) return std::nullopt;
  return CopyId{opposite(c.side), mate.first, mate.second};
}

void ExpandedState::add_edge(const CopyId& u_copy, const CopyId& v_copy) {
  if (u_copy.side != Side::U || v_copy.side != Side::V) {
    throw std::logic_error("edge endpoints must be a U copy and a V copy");
  }
  if (!is_free(u_copy) || !is_free(v_copy)) {
    throw std::logic_error("edge endpoints must both be free");
  }
  mate_[0][u_copy.node][u_copy.index - 1] = {v_copy.node, v_copy.index};
  mate_[1][v_copy.node][v_copy.index - 1] = {u_copy.node, u_copy.index};
}

void ExpandedState::remove_edge(const CopyId& u_copy, const CopyId& v_copy) {
  check_copy(u_copy);
  check_copy(v_copy);
  if (u_copy.side != Side::U || v_copy.side != Side::V ||
      mate_[0][u_copy.node][u_copy.index - 1] !=
          std::pair<int, int>{v_copy.node, v_copy.index}) {
    throw std::logic_error("removing an edge that is not present");
  }
  mate_[0][u_copy.node][u_copy.index - 1] = kFree;
  mate_[1][v_copy.node][v_copy.index - 1] = kFree;
}

std::vector<CopyEdge> ExpandedState::edges() const {
  std::vector<CopyEdge> out;
  for (int n = 0; n < num_nodes(Side::U); ++n) {
    for (int i = 1; i <= num_copies(Side::U, n); ++i) {
      const CopyId u{Side::U, n, i};
      if (const auto mate = matched_copy(u)) out.emplace_back(u, *mate);
    }
  }
  return out;
}

int ExpandedState::matched_edge_count() const {
  return static_cast<int>(edges().size());
}

Money ExpandedState::total_aspiration(Side s) const {
  Money total = 0;
  for (const auto& node : asp_[static_cast<int>(s)]) {
    for (Money a : node) total += a;
  }
  return total;
}

Money ExpandedState::total_feasible_aspiration() const {
  Money total = 0;
  for (const auto& [u, v] : edges()) total += aspiration(u) + aspiration(v);
  return total;
}

std::vector<CopyId> free_copies(const ExpandedState& state, NodeRef g,
                                bool positive_only) {
  std::vector<CopyId> out;
  for (int i = 1; i <= state.num_copies(g.side, g.node); ++i) {
    const CopyId c{g.side, g.node, i};
    if (state.is_free(c) && (!positive_only || state.aspiration(c) > 0)) {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<CopyId> free_positive_copies(const ExpandedState& state) {
  std::vector<CopyId> out;
  for (Side s : {Side::U, Side::V}) {
    for (int n = 0; n < state.num_nodes(s); ++n) {
      for (const CopyId& c : free_copies(state, NodeRef{s, n}, true)) {
        out.push_back(c);
      }
    }
  }
  return out;
}

int free_positive_count(const ExpandedState& state) {
  return static_cast<int>(free_positive_copies(state).size());
}

std::optional<NodeRef> partner(const ExpandedState& state, const CopyId& c) {
  const auto mate = state.matched_copy(c);
  if (!mate) return std::nullopt;
  return mate->node_ref();
}

Money NodesSolution::total() const {
  Money total = 0;
  for (Money x : x_u) total += x;
  for (Money x : x_v) total += x;
  return total;
}

NodesSolution reduce(const ExpandedState& state, const Instance& inst) {
  NodesSolution sol;
  sol.x_u.assign(inst.num_u(), 0);
  sol.x_v.assign(inst.num_v(), 0);
  sol.pair_matched.assign(inst.num_u(), std::vector<bool>(inst.num_v(), false));
  for (int n = 0; n < state.num_nodes(Side::U); ++n) {
    for (int i = 1; i <= state.num_copies(Side::U, n); ++i) {
      sol.x_u[n] += state.aspiration(CopyId{Side::U, n, i});
    }
  }
  for (int n = 0; n < state.num_nodes(Side::V); ++n) {
    for (int i = 1; i <= state.num_copies(Side::V, n); ++i) {
      sol.x_v[n] += state.aspiration(CopyId{Side::V, n, i});
    }
  }
  for (const auto& [u, v] : state.edges()) {
    if (!sol.pair_matched[u.node][v.node]) {
      sol.pair_matched[u.node][v.node] = true;
      sol.matching.emplace_back(u.node, v.node);
    }
  }
  std::sort(sol.matching.begin(), sol.matching.end());
  return sol;
}

FeasibilityReport check_feasible(const ExpandedState& state,
                                 const Instance& inst) {
  if (!state.shape_matches(inst)) {
    throw std::logic_error("state shape does not match instance capacities");
  }
  FeasibilityReport report;
  std::map<std::pair<int, int>, std::vector<CopyEdge>> per_pair;
  for (const auto& e : state.edges()) {
    per_pair[{e.first.node, e.second.node}].push_back(e);
  }
  for (const auto& [pair, list] : per_pair) {
    if (list.size() > 1) {
      report.matching_valid = false;
      for (const auto& e : list) report.duplicate_pair_edges.push_back(e);
    }
    for (const auto& e : list) {
      if (state.aspiration(e.first) + state.aspiration(e.second) !=
          inst.weight(pair.first, pair.second)) {
        report.edges_saturated = false;
        report.unsaturated_edges.push_back(e);
      }
    }
  }
  for (Side s : {Side::U, Side::V}) {
    for (int n = 0; n < state.num_nodes(s); ++n) {
      for (int i = 1; i <= state.num_copies(s, n); ++i) {
        const CopyId c{s, n, i};
        if (state.aspiration(c) < 0) {
          report.aspirations_non_negative = false;
          report.negative_copies.push_back(c);
        }
      }
    }
  }
  return report;
}

CoreReport check_copies_core(const ExpandedState& state,
                             const Instance& inst) {
  if (!state.shape_matches(inst)) {
    throw std::logic_error("state shape does not match instance capacities");
  }
  CoreReport report;
  for (const auto& [u, v] : state.edges()) {
    if (state.aspiration(u) + state.aspiration(v) !=
        inst.weight(u.node, v.node)) {
      report.edge_saturation = false;
      report.saturation_violations.emplace_back(u, v);
    }
  }

  const NodesSolution sol = reduce(state, inst);
  for (int u = 0; u < inst.num_u(); ++u) {
    for (int v = 0; v < inst.num_v(); ++v) {
      if (sol.pair_matched[u][v]) continue;
      for (int i = 1; i <= state.num_copies(Side::U, u); ++i) {
        for (int j = 1; j <= state.num_copies(Side::V, v); ++j) {
          const CopyId ui{Side::U, u, i};
          const CopyId vj{Side::V, v, j};
          if (state.aspiration(ui) + state.aspiration(vj) <
              inst.weight(u, v)) {
            report.pairwise_stability = false;
            report.stability_violations.emplace_back(ui, vj);
          }
        }
      }
    }
  }

  for (Side s : {Side::U, Side::V}) {
    for (int n = 0; n < state.num_nodes(s); ++n) {
      for (const CopyId& c : free_copies(state, NodeRef{s, n})) {
        if (state.aspiration(c) != 0) {
          report.zero_gain = false;
          report.zero_gain_violations.push_back(c);
        }
      }
    }
  }

  report.is_core =
      report.edge_saturation && report.pairwise_stability && report.zero_gain;
  return report;
}

ExpandedState load_state(const std::string& json_text, const Instance& inst) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw MalformedInput("state must be a JSON object");
  }
  if (!j.contains("aspirations") || !j.contains("matching")) {
    throw MalformedInput("state needs 'aspirations' and 'matching'");
  }

  ExpandedState state(inst);
  const auto& asp = j.at("aspirations");
  if (!asp.is_object()) throw MalformedInput("aspirations must be an object");
  std::size_t seen = 0;
  for (Side s : {Side::U, Side::V}) {
    for (int n = 0; n < inst.num_nodes(s); ++n) {
      const NodeRef g{s, n};
      const std::string& id = inst.node_id(g);
      if (!asp.contains(id)) {
        throw MalformedInput("aspirations missing node '" + id + "'");
      }
      const auto& arr = asp.at(id);
      if (!arr.is_array() ||
          static_cast<int>(arr.size()) != inst.b_value(g)) {
        throw MalformedInput("aspirations for '" + id + "' must list " +
                             std::to_string(inst.b_value(g)) + " copies");
      }
      for (int i = 0; i < inst.b_value(g); ++i) {
        if (!arr[i].is_number_integer()) {
          throw MalformedInput("aspirations for '" + id +
                               "' must be integer grid units");
        }
        state.set_aspiration(CopyId{s, n, i + 1}, arr[i].get<long long>());
      }
      ++seen;
    }
  }
  if (asp.size() != seen) {
    throw MalformedInput("aspirations contains unknown node ids");
  }

  const auto& matching = j.at("matching");
  if (!matching.is_array()) throw MalformedInput("matching must be an array");
  auto endpoint = [&](const json& e, Side expect) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() ||
        !e[1].is_number_integer()) {
      throw MalformedInput("matching endpoints must be [id, copy_index]");
    }
    const auto node = inst.find_node(e[0].get<std::string>());
    if (!node || node->side != expect) {
      throw MalformedInput("matching endpoint '" + e[0].get<std::string>() +
                           "' is not a class-" + side_name(expect) + " node");
    }
    const long long idx = e[1].get<long long>();
    if (idx < 1 || idx > inst.b_value(*node)) {
      throw MalformedInput("copy index " + std::to_string(idx) +
                           " out of range for '" + e[0].get<std::string>() +
                           "'");
    }
    return CopyId{expect, node->node, static_cast<int>(idx)};
  };
  for (const auto& entry : matching) {
    if (!entry.is_array() || entry.size() != 2) {
      throw MalformedInput("matching entries must be [[u, i], [v, j]] pairs");
    }
    const CopyId u = endpoint(entry[0], Side::U);
    const CopyId v = endpoint(entry[1], Side::V);
    if (!state.is_free(u)) {
      throw MalformedInput("copy " + copy_label(inst, u) +
                           " used by two edges");
    }
    if (!state.is_free(v)) {
      throw MalformedInput("copy " + copy_label(inst, v) +
                           " used by two edges");
    }
    // Duplicate (u, v) node pairs are representable input mistakes; they
    // load fine and check_feasible reports them.
    state.add_edge(u, v);
  }
  return state;
}

std::string serialize_state(const ExpandedState& state, const Instance& inst) {
  if (!state.shape_matches(inst)) {
    throw std::logic_error("state shape does not match instance capacities");
  }
  json j;
  json asp = json::object();
  for (Side s : {Side::U, Side::V}) {
    for (int n = 0; n < inst.num_nodes(s); ++n) {
      json arr = json::array();
      for (int i = 1; i <= state.num_copies(s, n); ++i) {
        arr.push_back(state.aspiration(CopyId{s, n, i}));
      }
      asp[inst.node_id(NodeRef{s, n})] = std::move(arr);
    }
  }
  j["aspirations"] = std::move(asp);
  json matching = json::array();
  for (const auto& [u, v] : state.edges()) {
    matching.push_back(json::array(
        {json::array({inst.u_ids[u.node], u.index}),
         json::array({inst.v_ids[v.node], v.index})}));
  }
  j["matching"] = std::move(matching);
  return j.dump(2);
}

}  // namespace bcore
