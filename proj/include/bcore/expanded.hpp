#pragma once

#include <array>
#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bcore/instance.hpp"

namespace bcore {

// One of the B(g) copies of a node. Copy indices are 1-based everywhere,
// including the JSON snapshot format.
struct CopyId {
  Side side = Side::U;
  int node = 0;
  int index = 1;

  NodeRef node_ref() const { return NodeRef{side, node}; }

  friend auto operator<=>(const CopyId&, const CopyId&) = default;
};

std::ostream& operator<<(std::ostream& os, const CopyId& c);

// An edge of the copies matching, always stored (U-side copy, V-side copy).
using CopyEdge = std::pair<CopyId, CopyId>;

// Aspirations plus a matching over node copies. Each copy holds at most one
// edge; that much is structural. The pair-multiplicity rule (at most one
// edge between the copies of a node pair) is checked by check_feasible, not
// by add_edge, so that states loaded from outside can be inspected and
// reported on rather than rejected at construction.
class ExpandedState {
 public:
  ExpandedState() = default;

  // Zero aspirations, empty matching; shape (copy counts) from capacities.
  explicit ExpandedState(const Instance& inst);

  int num_nodes(Side s) const {
    return static_cast<int>(asp_[static_cast<int>(s)].size());
  }
  int num_copies(Side s, int node) const {
    return static_cast<int>(asp_[static_cast<int>(s)][node].size());
  }
  int total_copies() const;
  bool shape_matches(const Instance& inst) const;

  Money aspiration(const CopyId& c) const;
  void set_aspiration(const CopyId& c, Money a);
  void add_aspiration(const CopyId& c, Money delta);

  bool is_free(const CopyId& c) const { return !matched_copy(c).has_value(); }
  std::optional<CopyId> matched_copy(const CopyId& c) const;

  // Both copies must be free; violations are programming errors and throw
  // std::logic_error.
  void add_edge(const CopyId& u_copy, const CopyId& v_copy);
  void remove_edge(const CopyId& u_copy, const CopyId& v_copy);

  // Sorted by (u node, u copy index).
  std::vector<CopyEdge> edges() const;
  int matched_edge_count() const;

  Money total_aspiration(Side s) const;
  // Sum of aspirations of matched copies == sum of matched edge worths when
  // edges are saturated.
  Money total_feasible_aspiration() const;

  friend bool operator==(const ExpandedState&, const ExpandedState&) = default;

 private:
  void check_copy(const CopyId& c) const;

  // Indexed [side][node][copy-1]. mate_ holds the opposite-side (node,
  // copy) or kFree.
  static constexpr std::pair<int, int> kFree{-1, -1};
  std::array<std::vector<std::vector<Money>>, 2> asp_;
  std::array<std::vector<std::vector<std::pair<int, int>>>, 2> mate_;
};

// Free copies of one node, ascending copy index; positive_only additionally
// requires aspiration > 0.
std::vector<CopyId> free_copies(const ExpandedState& state, NodeRef g,
                                bool positive_only = false);

// All free copies with positive aspiration: class U block first, then V,
// nodes ascending, copy indices ascending.
std::vector<CopyId> free_positive_copies(const ExpandedState& state);
int free_positive_count(const ExpandedState& state);

// Node whose copy is matched to c, if any.
std::optional<NodeRef> partner(const ExpandedState& state, const CopyId& c);

// Per-node view of an expanded state: x_g sums the node's copy aspirations,
// M contains the node pairs with at least one matched copy edge.
struct NodesSolution {
  std::vector<Money> x_u;
  std::vector<Money> x_v;
  std::vector<std::pair<int, int>> matching;     // sorted (u, v) node pairs
  std::vector<std::vector<bool>> pair_matched;   // [u][v]

  Money total() const;
};

NodesSolution reduce(const ExpandedState& state, const Instance& inst);

struct FeasibilityReport {
  bool matching_valid = true;  // pair-multiplicity respected
  std::vector<CopyEdge> duplicate_pair_edges;
  bool aspirations_non_negative = true;
  std::vector<CopyId> negative_copies;
  bool edges_saturated = true;  // a(u_i) + a(v_j) == W(u, v) on every edge
  std::vector<CopyEdge> unsaturated_edges;

  bool ok() const {
    return matching_valid && aspirations_non_negative && edges_saturated;
  }
};

FeasibilityReport check_feasible(const ExpandedState& state,
                                 const Instance& inst);

// The three stopping conditions checked on the expanded state:
//   1. every matched edge saturated,
//   2. no unmatched node pair with two copies whose aspirations sum below
//      the pair worth,
//   3. every free copy has aspiration exactly zero.
struct CoreReport {
  bool edge_saturation = true;
  std::vector<CopyEdge> saturation_violations;
  bool pairwise_stability = true;
  std::vector<CopyEdge> stability_violations;
  bool zero_gain = true;
  std::vector<CopyId> zero_gain_violations;
  bool is_core = false;
};

CoreReport check_copies_core(const ExpandedState& state, const Instance& inst);

// Snapshot JSON:
//   {"aspirations": {"u1": [2, 0], ...},
//    "matching": [[["u1", 1], ["v2", 3]], ...]}
// Aspirations are integer grid units; matching entries are
// [[u_id, u_copy], [v_id, v_copy]] with 1-based copy indices. load_state
// validates shape against the instance and rejects reuse of a copy by two
// edges; aspiration signs and saturation are left to check_feasible.
ExpandedState load_state(const std::string& json_text, const Instance& inst);
std::string serialize_state(const ExpandedState& state, const Instance& inst);

}  // namespace bcore
