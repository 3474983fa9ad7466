// Python bindings. The module works with the same JSON documents as the
// command line tool: instances and states cross the boundary as strings, and
// summaries come back as plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "bcore/dynamics.hpp"
#include "bcore/errors.hpp"
#include "bcore/expanded.hpp"
#include "bcore/instance.hpp"
#include "bcore/oracle.hpp"
#include "bcore/paths_transfers.hpp"
#include "bcore/rational.hpp"

namespace py = pybind11;

namespace {

bcore::Instance parse_instance(const std::string& text) {
  std::vector<std::string> warnings;
  return bcore::load_instance(text, &warnings);
}

std::string generate(int num_tasks, int num_robots, unsigned long long seed,
                     const std::string& epsilon, long long value_min,
                     long long value_max, int b_min, int b_max) {
  bcore::GenConfig cfg;
  cfg.epsilon = bcore::parse_decimal(epsilon);
  cfg.value_min = value_min;
  cfg.value_max = value_max;
  cfg.b_min = b_min;
  cfg.b_max = b_max;
  const bcore::Instance inst =
      bcore::generate_task_assignment(num_tasks, num_robots, seed, cfg);
  return bcore::serialize_instance(inst);
}

std::string solve(const std::string& instance_json, const std::string& mode,
                  const std::string& over_class) {
  const bcore::Instance inst = parse_instance(instance_json);
  bcore::SolverConfig cfg;
  if (mode == "epsilon") {
    cfg.step_mode = bcore::StepMode::SingleUnit;
  } else if (mode == "min-delta") {
    cfg.step_mode = bcore::StepMode::MinDelta;
  } else {
    throw bcore::MalformedInput("mode must be 'epsilon' or 'min-delta'");
  }
  if (over_class == "U") {
    cfg.over_aspirated_class = bcore::Side::U;
  } else if (over_class == "V") {
    cfg.over_aspirated_class = bcore::Side::V;
  } else {
    throw bcore::MalformedInput("over_class must be 'U' or 'V'");
  }
  const bcore::SolveResult result = bcore::solve(inst, cfg);
  return bcore::serialize_state(result.state, inst);
}

py::dict simulate(const std::string& instance_json, unsigned long long seed,
                  long long horizon, const std::string& init,
                  long long check_period) {
  const bcore::Instance inst = parse_instance(instance_json);
  bcore::RunConfig cfg;
  cfg.seed = seed;
  cfg.horizon = horizon;
  cfg.core_check_period = check_period;
  if (init == "zero") {
    cfg.init_mode = bcore::InitMode::Zero;
  } else if (init == "random") {
    cfg.init_mode = bcore::InitMode::RandomOnGrid;
  } else {
    throw bcore::MalformedInput("init must be 'zero' or 'random'");
  }
  const bcore::RunResult result = bcore::run(inst, cfg);
  py::dict out;
  out["state"] = bcore::serialize_state(result.state, inst);
  out["converged"] = result.converged;
  out["iterations_to_core"] =
      result.converged ? py::cast(result.iterations_to_core) : py::none();
  out["matched_edges"] =
      static_cast<long long>(result.state.matched_edge_count());
  out["total_feasible_aspiration"] = result.state.total_feasible_aspiration();
  return out;
}

py::dict certify(const std::string& instance_json,
                 const std::string& state_json) {
  const bcore::Instance inst = parse_instance(instance_json);
  const bcore::ExpandedState state = bcore::load_state(state_json, inst);
  const bcore::FeasibilityReport feas = bcore::check_feasible(state, inst);
  const bcore::CoreReport core = bcore::check_copies_core(state, inst);
  py::dict out;
  out["feasible"] = feas.ok();
  out["matching_valid"] = feas.matching_valid;
  out["aspirations_non_negative"] = feas.aspirations_non_negative;
  out["edges_saturated"] = feas.edges_saturated;
  out["stopping"] = core.is_core;
  out["edge_saturation"] = core.edge_saturation;
  out["pairwise_stability"] = core.pairwise_stability;
  out["zero_gain"] = core.zero_gain;
  return out;
}

py::dict nodes_core(const std::string& instance_json,
                    const std::string& state_json, int max_nodes) {
  const bcore::Instance inst = parse_instance(instance_json);
  const bcore::ExpandedState state = bcore::load_state(state_json, inst);
  const bcore::NodesSolution sol = bcore::reduce(state, inst);
  const bcore::NodesCoreResult result =
      bcore::check_nodes_core(sol, inst, max_nodes);
  py::dict out;
  out["ok"] = result.ok;
  out["detail"] = result.detail;
  out["allocation_total"] = result.allocation_total;
  out["optimum"] = result.optimum;
  if (result.violating_coalition) {
    py::list u_ids, v_ids;
    for (int u : result.violating_coalition->u_nodes)
      u_ids.append(inst.u_ids[u]);
    for (int v : result.violating_coalition->v_nodes)
      v_ids.append(inst.v_ids[v]);
    out["violating_u"] = u_ids;
    out["violating_v"] = v_ids;
  }
  return out;
}

py::dict oracle_value(const std::string& instance_json) {
  const bcore::Instance inst = parse_instance(instance_json);
  const bcore::OracleResult result =
      bcore::max_b_matching_value(inst, bcore::Coalition::full(inst));
  py::dict out;
  out["value_units"] = result.value;
  out["value"] = bcore::to_decimal_string(
      bcore::rat_mul(bcore::make_rat(result.value, 1), inst.epsilon));
  py::list matching;
  for (const auto& [u, v] : result.matching) {
    matching.append(py::make_tuple(inst.u_ids[u], inst.v_ids[v]));
  }
  out["matching"] = matching;
  return out;
}

}  // namespace

PYBIND11_MODULE(_bcore, m) {
  m.doc() = "Aspiration dynamics for bipartite assignment games";

  py::register_exception<bcore::Error>(m, "BcoreError", PyExc_ValueError);

  m.def("generate", &generate, py::arg("num_tasks"), py::arg("num_robots"),
        py::arg("seed"), py::arg("epsilon") = "1", py::arg("value_min") = 1,
        py::arg("value_max") = 10, py::arg("b_min") = 1, py::arg("b_max") = 3,
        "Generate a random task-assignment instance; returns instance JSON.");
  m.def("solve", &solve, py::arg("instance_json"),
        py::arg("mode") = "epsilon", py::arg("over_class") = "V",
        "Run the constructive solver; returns a state JSON snapshot.");
  m.def("simulate", &simulate, py::arg("instance_json"), py::arg("seed"),
        py::arg("horizon"), py::arg("init") = "zero",
        py::arg("check_period") = 0,
        "Run the random proposal process; returns a summary dict.");
  m.def("certify", &certify, py::arg("instance_json"), py::arg("state_json"),
        "Check feasibility and the stopping conditions for a state.");
  m.def("nodes_core", &nodes_core, py::arg("instance_json"),
        py::arg("state_json"), py::arg("max_nodes") = 10,
        "Check the reduced allocation against all node coalitions.");
  m.def("oracle_value", &oracle_value, py::arg("instance_json"),
        "Maximum total matching worth, computed independently via flow.");
  m.def("instance_digest",
        [](const std::string& text) {
          return bcore::instance_digest(parse_instance(text));
        },
        py::arg("instance_json"), "Stable hex digest of an instance.");
}
