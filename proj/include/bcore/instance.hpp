#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcore/rational.hpp"

namespace bcore {

// All money amounts are integer counts of the instance's epsilon grid step.
using Money = long long;

enum class Side : int { U = 0, V = 1 };

constexpr Side opposite(Side s) { return s == Side::U ? Side::V : Side::U; }
const char* side_name(Side s);

struct NodeRef {
  Side side = Side::U;
  int node = 0;  // index into u_ids / v_ids

  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

// A bipartite valuation problem: classes U and V, per-pair worth W(u, v) >= 0
// on the epsilon grid, and per-node capacities B >= 1 already clamped to the
// size of the opposite class.
struct Instance {
  std::vector<std::string> u_ids;
  std::vector<std::string> v_ids;
  std::vector<std::vector<Money>> weights;  // [u][v], grid units
  std::vector<int> b_u;
  std::vector<int> b_v;
  Rat epsilon{1, 1};

  int num_u() const { return static_cast<int>(u_ids.size()); }
  int num_v() const { return static_cast<int>(v_ids.size()); }
  int num_nodes(Side s) const { return s == Side::U ? num_u() : num_v(); }
  int b_value(NodeRef g) const {
    return g.side == Side::U ? b_u[g.node] : b_v[g.node];
  }
  const std::string& node_id(NodeRef g) const {
    return g.side == Side::U ? u_ids[g.node] : v_ids[g.node];
  }
  Money weight(int u, int v) const { return weights[u][v]; }
  Money max_weight() const;
  int total_copies() const;
  std::optional<NodeRef> find_node(std::string_view id) const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Parses the canonical JSON form:
//   {"epsilon": "0.5", "u_nodes": [...], "v_nodes": [...],
//    "b_values": {"u1": 2, ...}, "weights": [["4.0", ...], ...]}
// Weights and epsilon are decimal strings (integer JSON numbers are also
// accepted) converted exactly to grid units. Capacities larger than the
// opposite class are clamped, with a note appended to *warnings.
// Throws MalformedInput / OffGridWeight / NonPositiveB / NegativeWeight.
Instance load_instance(const std::string& json_text,
                       std::vector<std::string>* warnings = nullptr);

// Inverse of load_instance; canonical key order, weights re-rendered as
// decimal strings. Loading the result reproduces the instance exactly.
std::string serialize_instance(const Instance& inst);

// Knobs for the synthetic task-assignment family. Robot accuracy is the
// fraction accuracy_num / accuracy_den with accuracy_num drawn uniformly from
// [accuracy_num_min, accuracy_num_max]; task values are uniform integers in
// [value_min, value_max]; pair worth is accuracy * value * scale, rounded
// down to the epsilon grid.
struct GenConfig {
  int value_min = 1;
  int value_max = 10;
  int accuracy_num_min = 5;
  int accuracy_num_max = 15;
  int accuracy_den = 10;
  int b_min = 1;
  int b_max = 3;
  int scale_num = 1;
  int scale_den = 1;
  Rat epsilon{1, 1};
};

// Tasks become class U ("t1".."tN"), robots class V ("r1".."rM"). Task
// capacities are uniform in [b_min, b_max]; robot capacities decrease with
// accuracy rank so that more accurate robots accept fewer tasks. Draw order
// (one Rng stream seeded with `seed`): task values, then robot accuracies,
// then task capacities, then robot capacities.
Instance generate_task_assignment(int num_tasks, int num_robots,
                                  std::uint64_t seed,
                                  const GenConfig& cfg = {});

// Multiplies every capacity by factor (>= 1), then re-clamps to the opposite
// class size.
Instance scale_b_values(const Instance& inst, int factor);

// Drops the named nodes. Throws MalformedInput on unknown ids and
// WouldEmptyClass if a class would end up empty. Remaining capacities are
// re-clamped to the shrunken opposite class.
Instance remove_nodes(const Instance& inst,
                      const std::vector<std::string>& node_ids);

// Re-expresses all weights on a new grid step. Every weight must remain an
// exact multiple of the step; otherwise OffGridWeight.
Instance rescale_epsilon(const Instance& inst, const Rat& new_epsilon);

// FNV-1a 64 over the canonical serialization, as 16 hex digits. Stable
// fingerprint used in trace metadata.
std::string instance_digest(const Instance& inst);

}  // namespace bcore
