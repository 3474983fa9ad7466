#include <doctest.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "bcore/errors.hpp"
#include "bcore/expanded.hpp"
#include "support.hpp"

using bcore::CopyId;
using bcore::ExpandedState;
using bcore::Instance;
using bcore::NodeRef;
using bcore::Side;

namespace {

const CopyId kU1{Side::U, 0, 1};
const CopyId kU2{Side::U, 1, 1};
const CopyId kV1a{Side::V, 0, 1};
const CopyId kV1b{Side::V, 0, 2};

// tiny2 with both edges matched and the surplus on the V side.
ExpandedState tiny2_core_state() {
  ExpandedState state(testsupport::tiny2());
  state.add_edge(kU1, kV1a);
  state.add_edge(kU2, kV1b);
  state.set_aspiration(kV1a, 4);
  state.set_aspiration(kV1b, 6);
  return state;
}

}  // namespace

TEST_CASE("fresh state has zero aspirations and no edges") {
  const Instance inst = testsupport::tiny2();
  const ExpandedState state(inst);
  CHECK(state.shape_matches(inst));
  CHECK(state.total_copies() == 4);
  CHECK(state.num_copies(Side::V, 0) == 2);
  CHECK(state.aspiration(kV1b) == 0);
  CHECK(state.is_free(kU1));
  CHECK(state.matched_edge_count() == 0);
  CHECK(state.total_aspiration(Side::U) == 0);
  CHECK(state.total_feasible_aspiration() == 0);
}

TEST_CASE("edges connect free copies only") {
  ExpandedState state(testsupport::tiny2());
  state.add_edge(kU1, kV1a);
  CHECK(state.matched_copy(kU1) == kV1a);
  CHECK(state.matched_copy(kV1a) == kU1);
  CHECK(bcore::partner(state, kU1) == NodeRef{Side::V, 0});

  CHECK_THROWS_AS(state.add_edge(kU2, kV1a), std::logic_error);  // occupied
  CHECK_THROWS_AS(state.add_edge(kV1b, kU2), std::logic_error);  // sides
  CHECK_THROWS_AS(state.remove_edge(kU2, kV1b), std::logic_error);
  CHECK_THROWS_AS(state.aspiration(CopyId{Side::V, 0, 3}), std::logic_error);

  state.remove_edge(kU1, kV1a);
  CHECK(state.is_free(kU1));
  CHECK(state.matched_edge_count() == 0);
}

TEST_CASE("edge list is ordered by class-U copy") {
  ExpandedState state = tiny2_core_state();
  const std::vector<bcore::CopyEdge> expect = {{kU1, kV1a}, {kU2, kV1b}};
  CHECK(state.edges() == expect);
  CHECK(state.total_feasible_aspiration() == 10);
}

TEST_CASE("free copy queries order by class, node, copy") {
  ExpandedState state(testsupport::tiny2());
  state.set_aspiration(kU2, 3);
  state.set_aspiration(kV1a, 1);
  state.set_aspiration(kV1b, 2);
  state.add_edge(kU1, kV1a);  // u1 and v1#1 now matched

  CHECK(bcore::free_copies(state, NodeRef{Side::V, 0}) ==
        std::vector<CopyId>{kV1b});
  CHECK(bcore::free_copies(state, NodeRef{Side::U, 0}).empty());
  CHECK(bcore::free_positive_copies(state) == std::vector<CopyId>{kU2, kV1b});
  CHECK(bcore::free_positive_count(state) == 2);
}

TEST_CASE("reduction sums copies and collapses pairs") {
  const bcore::NodesSolution sol =
      bcore::reduce(tiny2_core_state(), testsupport::tiny2());
  CHECK(sol.x_u == std::vector<bcore::Money>{0, 0});
  CHECK(sol.x_v == std::vector<bcore::Money>{10});
  CHECK(sol.matching == std::vector<std::pair<int, int>>{{0, 0}, {1, 0}});
  CHECK(sol.pair_matched[0][0]);
  CHECK(sol.pair_matched[1][0]);
  CHECK(sol.total() == 10);
}

TEST_CASE("feasibility report catches saturation, signs, duplicates") {
  const Instance inst = testsupport::tiny2();

  CHECK(bcore::check_feasible(tiny2_core_state(), inst).ok());

  ExpandedState unsat = tiny2_core_state();
  unsat.set_aspiration(kV1b, 5);
  const auto r1 = bcore::check_feasible(unsat, inst);
  CHECK_FALSE(r1.ok());
  CHECK_FALSE(r1.edges_saturated);
  CHECK(r1.unsaturated_edges == std::vector<bcore::CopyEdge>{{kU2, kV1b}});
  CHECK(r1.matching_valid);

  ExpandedState negative = tiny2_core_state();
  negative.set_aspiration(kU1, -1);
  negative.set_aspiration(kV1a, 5);
  const auto r2 = bcore::check_feasible(negative, inst);
  CHECK_FALSE(r2.aspirations_non_negative);
  CHECK(r2.negative_copies == std::vector<CopyId>{kU1});

  // Same node pair matched through both V copies.
  Instance wide = testsupport::tiny2();
  wide.b_u = {2, 1};
  ExpandedState duped((ExpandedState(wide)));
  duped.add_edge(CopyId{Side::U, 0, 1}, kV1a);
  duped.add_edge(CopyId{Side::U, 0, 2}, kV1b);
  duped.set_aspiration(kV1a, 4);
  duped.set_aspiration(kV1b, 4);
  const auto r3 = bcore::check_feasible(duped, wide);
  CHECK_FALSE(r3.matching_valid);
  CHECK(r3.duplicate_pair_edges.size() == 2);

  ExpandedState wrong_shape((ExpandedState(wide)));
  CHECK_THROWS_AS(bcore::check_feasible(wrong_shape, inst), std::logic_error);
}

TEST_CASE("stopping-state report checks all three conditions") {
  const Instance inst = testsupport::tiny1();

  ExpandedState good(inst);
  good.add_edge(kU1, kV1a);
  good.set_aspiration(kU1, 4);
  const auto ok = bcore::check_copies_core(good, inst);
  CHECK(ok.is_core);
  CHECK(ok.edge_saturation);
  CHECK(ok.pairwise_stability);
  CHECK(ok.zero_gain);

  ExpandedState unsat(inst);
  unsat.add_edge(kU1, kV1a);
  unsat.set_aspiration(kU1, 3);
  const auto r1 = bcore::check_copies_core(unsat, inst);
  CHECK_FALSE(r1.is_core);
  CHECK_FALSE(r1.edge_saturation);
  CHECK(r1.saturation_violations == std::vector<bcore::CopyEdge>{{kU1, kV1a}});

  const ExpandedState empty(inst);
  const auto r2 = bcore::check_copies_core(empty, inst);
  CHECK_FALSE(r2.is_core);
  CHECK_FALSE(r2.pairwise_stability);
  CHECK(r2.stability_violations == std::vector<bcore::CopyEdge>{{kU1, kV1a}});
  CHECK(r2.zero_gain);  // free copies all claim zero

  ExpandedState greedy(inst);
  greedy.set_aspiration(kU1, 4);
  greedy.set_aspiration(kV1a, 1);
  const auto r3 = bcore::check_copies_core(greedy, inst);
  CHECK_FALSE(r3.is_core);
  CHECK(r3.pairwise_stability);  // 4 + 1 covers the worth of 4
  CHECK_FALSE(r3.zero_gain);
  CHECK(r3.zero_gain_violations == std::vector<CopyId>{kU1, kV1a});
}

TEST_CASE("passing states with valid matchings and signs are feasible") {
  // The stopping conditions subsume saturation, so any passing state that
  // also has a valid matching and non-negative claims passes feasibility.
  bcore::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = testsupport::random_instance(rng, 3, 3, 2, 6);
    const ExpandedState state = testsupport::random_walk_state(inst, rng, 40);
    const auto feas = bcore::check_feasible(state, inst);
    REQUIRE(feas.matching_valid);
    REQUIRE(feas.aspirations_non_negative);
    if (bcore::check_copies_core(state, inst).is_core) {
      CHECK(feas.ok());
    }
  }
}

TEST_CASE("state snapshots round-trip through JSON") {
  const Instance inst = testsupport::tiny2();
  const ExpandedState state = tiny2_core_state();
  const std::string text = bcore::serialize_state(state, inst);
  CHECK(text == bcore::serialize_state(state, inst));
  CHECK(bcore::load_state(text, inst) == state);

  const std::string expect = R"({
  "aspirations": {
    "u1": [
      0
    ],
    "u2": [
      0
    ],
    "v1": [
      4,
      6
    ]
  },
  "matching": [
    [
      [
        "u1",
        1
      ],
      [
        "v1",
        1
      ]
    ],
    [
      [
        "u2",
        1
      ],
      [
        "v1",
        2
      ]
    ]
  ]
})";
  CHECK(text == expect);
}

TEST_CASE("state snapshot validation") {
  const Instance inst = testsupport::tiny2();
  auto load = [&inst](const std::string& text) {
    return bcore::load_state(text, inst);
  };

  CHECK_THROWS_AS(load("[]"), bcore::MalformedInput);
  CHECK_THROWS_AS(load(R"({"aspirations": {}})"), bcore::MalformedInput);
  // Missing node, wrong copy count, fractional units, unknown node.
  CHECK_THROWS_AS(load(R"({"aspirations": {"u1": [0], "u2": [0]},
                           "matching": []})"),
                  bcore::MalformedInput);
  CHECK_THROWS_AS(load(R"({"aspirations": {"u1": [0], "u2": [0], "v1": [0]},
                           "matching": []})"),
                  bcore::MalformedInput);
  CHECK_THROWS_AS(load(R"({"aspirations": {"u1": [0.5], "u2": [0],
                                           "v1": [0, 0]},
                           "matching": []})"),
                  bcore::MalformedInput);
  CHECK_THROWS_AS(load(R"({"aspirations": {"u1": [0], "u2": [0],
                                           "v1": [0, 0], "zz": [0]},
                           "matching": []})"),
                  bcore::MalformedInput);
  // Bad matching entries: unknown id, v node first, out-of-range copy,
  // copy reused by two edges.
  const std::string asp =
      R"("aspirations": {"u1": [0], "u2": [0], "v1": [0, 0]})";
  CHECK_THROWS_AS(load("{" + asp + R"(, "matching": [[["zz", 1], ["v1", 1]]]})"),
                  bcore::MalformedInput);
  CHECK_THROWS_AS(load("{" + asp + R"(, "matching": [[["v1", 1], ["u1", 1]]]})"),
                  bcore::MalformedInput);
  CHECK_THROWS_AS(load("{" + asp + R"(, "matching": [[["u1", 2], ["v1", 1]]]})"),
                  bcore::MalformedInput);
  CHECK_THROWS_AS(
      load("{" + asp + R"(, "matching": [[["u1", 1], ["v1", 1]],
                                         [["u1", 1], ["v1", 2]]]})"),
      bcore::MalformedInput);

  // Negative aspirations load; feasibility flags them.
  const ExpandedState neg = load(
      R"({"aspirations": {"u1": [-2], "u2": [0], "v1": [0, 0]},
          "matching": []})");
  CHECK(neg.aspiration(kU1) == -2);
  CHECK_FALSE(bcore::check_feasible(neg, inst).aspirations_non_negative);
}

TEST_CASE("duplicate node pairs load and fail feasibility") {
  Instance wide = testsupport::tiny2();
  wide.b_u = {2, 1};
  const std::string text =
      R"({"aspirations": {"u1": [2, 2], "u2": [0], "v1": [2, 2]},
          "matching": [[["u1", 1], ["v1", 1]], [["u1", 2], ["v1", 2]]]})";
  const ExpandedState state = bcore::load_state(text, wide);
  CHECK(state.matched_edge_count() == 2);
  const auto feas = bcore::check_feasible(state, wide);
  CHECK_FALSE(feas.matching_valid);
  CHECK(feas.duplicate_pair_edges.size() == 2);
}
