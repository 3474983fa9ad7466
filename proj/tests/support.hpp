#pragma once

#include <string>
#include <vector>

#include "bcore/dynamics.hpp"
#include "bcore/expanded.hpp"
#include "bcore/instance.hpp"
#include "bcore/rng.hpp"

namespace testsupport {

// Single pair, one copy each side, worth 4.
inline bcore::Instance tiny1() {
  bcore::Instance inst;
  inst.u_ids = {"u1"};
  inst.v_ids = {"v1"};
  inst.b_u = {1};
  inst.b_v = {1};
  inst.weights = {{4}};
  return inst;
}

// Two unit-capacity U nodes sharing one V node with two copies; worths 4
// and 6, so the best matching takes both edges for 10.
inline bcore::Instance tiny2() {
  bcore::Instance inst;
  inst.u_ids = {"u1", "u2"};
  inst.v_ids = {"v1"};
  inst.b_u = {1, 1};
  inst.b_v = {2};
  inst.weights = {{4}, {6}};
  return inst;
}

// 2x2 unit capacities, worths [[3, 1], [2, 4]]; the best matching is the
// diagonal for 7.
inline bcore::Instance tiny3() {
  bcore::Instance inst;
  inst.u_ids = {"u1", "u2"};
  inst.v_ids = {"v1", "v2"};
  inst.b_u = {1, 1};
  inst.b_v = {1, 1};
  inst.weights = {{3, 1}, {2, 4}};
  return inst;
}

inline std::string tiny1_json() {
  return R"({
  "epsilon": "1",
  "u_nodes": ["u1"],
  "v_nodes": ["v1"],
  "b_values": {"u1": 1, "v1": 1},
  "weights": [["4.0"]]
})";
}

// Uniform random instance on the unit grid: class sizes in [1, max_u] and
// [1, max_v], capacities in [1, max_b] (clamped), integer worths in
// [0, max_w].
inline bcore::Instance random_instance(bcore::Rng& rng, int max_u, int max_v,
                                       int max_b, bcore::Money max_w) {
  auto draw = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng.next_below(
                    static_cast<std::uint64_t>(hi - lo + 1)));
  };
  bcore::Instance inst;
  const int nu = draw(1, max_u);
  const int nv = draw(1, max_v);
  for (int i = 0; i < nu; ++i) inst.u_ids.push_back("u" + std::to_string(i + 1));
  for (int i = 0; i < nv; ++i) inst.v_ids.push_back("v" + std::to_string(i + 1));
  for (int i = 0; i < nu; ++i) {
    inst.b_u.push_back(std::min(draw(1, max_b), nv));
  }
  for (int i = 0; i < nv; ++i) {
    inst.b_v.push_back(std::min(draw(1, max_b), nu));
  }
  for (int u = 0; u < nu; ++u) {
    std::vector<bcore::Money> row;
    for (int v = 0; v < nv; ++v) {
      row.push_back(draw(0, static_cast<int>(max_w)));
    }
    inst.weights.push_back(std::move(row));
  }
  return inst;
}

// A feasible state reached by running k random proposal rounds from zero.
inline bcore::ExpandedState random_walk_state(const bcore::Instance& inst,
                                              bcore::Rng& rng, int steps) {
  bcore::ExpandedState state(inst);
  for (int i = 0; i < steps; ++i) bcore::step(state, inst, rng);
  return state;
}

}  // namespace testsupport
