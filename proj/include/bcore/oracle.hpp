#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bcore/expanded.hpp"
#include "bcore/instance.hpp"

namespace bcore {

// A subset of nodes, by index, sorted ascending. Either side may be empty.
struct Coalition {
  std::vector<int> u_nodes;
  std::vector<int> v_nodes;

  static Coalition full(const Instance& inst);

  friend bool operator==(const Coalition&, const Coalition&) = default;
};

struct OracleResult {
  Money value = 0;
  std::vector<std::pair<int, int>> matching;  // sorted (u, v) node pairs
};

// Maximum total worth of a valid B-matching inside the coalition, by
// min-cost max-flow with augmentation stopped at the first non-improving
// path. Exact integer arithmetic throughout. When the induced subgraph has
// at most 12 positive-capacity edges the result is cross-checked against
// brute_force_value and a mismatch throws std::logic_error.
OracleResult max_b_matching_value(const Instance& inst, const Coalition& coal);

// Independent reference: enumerates every subset of the coalition's edges
// and keeps the best valid B-matching. Throws TooLarge above 20 edges.
Money brute_force_value(const Instance& inst, const Coalition& coal);

struct NodesCoreResult {
  bool ok = false;
  std::string detail;  // empty when ok
  // First coalition found whose stand-alone worth exceeds its allocation.
  std::optional<Coalition> violating_coalition;
  Money allocation_total = 0;
  Money optimum = 0;  // grand-coalition worth
};

// Verifies the per-node allocation: no coalition can improve on it, and the
// grand total equals the optimum matching worth. Enumerates all 2^(nu+nv)
// coalitions; throws TooLarge when the instance has more than max_nodes
// nodes.
NodesCoreResult check_nodes_core(const NodesSolution& sol,
                                 const Instance& inst, int max_nodes = 10);

}  // namespace bcore
