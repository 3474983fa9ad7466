#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcore/dynamics.hpp"
#include "bcore/errors.hpp"
#include "bcore/experiments.hpp"
#include "bcore/expanded.hpp"
#include "bcore/instance.hpp"
#include "bcore/oracle.hpp"
#include "bcore/paths_transfers.hpp"
#include "bcore/rational.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw bcore::MalformedInput("cannot read file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bcore::MalformedInput("cannot write file '" + path + "'");
  out << content;
}

bcore::Instance load_instance_file(const std::string& path) {
  std::vector<std::string> warnings;
  bcore::Instance inst = bcore::load_instance(read_file(path), &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
  return inst;
}

json copy_json(const bcore::Instance& inst, const bcore::CopyId& c) {
  return json::array({inst.node_id(c.node_ref()), c.index});
}

json copy_edges_json(const bcore::Instance& inst,
                     const std::vector<bcore::CopyEdge>& edges) {
  json out = json::array();
  for (const auto& [u, v] : edges) {
    out.push_back(json::array({copy_json(inst, u), copy_json(inst, v)}));
  }
  return out;
}

json copies_json(const bcore::Instance& inst,
                 const std::vector<bcore::CopyId>& copies) {
  json out = json::array();
  for (const auto& c : copies) out.push_back(copy_json(inst, c));
  return out;
}

std::string money_text(const bcore::Instance& inst, bcore::Money units) {
  return bcore::to_decimal_string(
      bcore::rat_mul(bcore::Rat{units, 1}, inst.epsilon));
}

struct SolveArgs {
  std::string instance_path;
  std::string mode = "epsilon";
  std::string over_class = "V";
  std::string log_path;
  bool check_invariants = false;
};

int cmd_solve(const SolveArgs& args) {
  const bcore::Instance inst = load_instance_file(args.instance_path);
  bcore::SolverConfig cfg;
  if (args.mode == "epsilon") {
    cfg.step_mode = bcore::StepMode::SingleUnit;
  } else if (args.mode == "min-delta") {
    cfg.step_mode = bcore::StepMode::MinDelta;
  } else {
    throw bcore::MalformedInput("--mode must be 'epsilon' or 'min-delta'");
  }
  if (args.over_class == "U") {
    cfg.over_aspirated_class = bcore::Side::U;
  } else if (args.over_class == "V") {
    cfg.over_aspirated_class = bcore::Side::V;
  } else {
    throw bcore::MalformedInput("--over-class must be 'U' or 'V'");
  }
  cfg.check_invariants = args.check_invariants;
  cfg.record_iterations = !args.log_path.empty();

  const bcore::SolveResult result = bcore::solve(inst, cfg);
  if (!args.log_path.empty()) {
    write_file(args.log_path, bcore::iteration_log_csv(result.log));
  }
  std::cout << bcore::serialize_state(result.state, inst) << '\n';
  return bcore::check_copies_core(result.state, inst).is_core ? 0 : 1;
}

struct SimulateArgs {
  std::string instance_path;
  std::uint64_t seed = 0;
  long long horizon = 0;
  std::string init = "zero";
  long long check_period = 0;
  std::string trace_path;
  std::string state_path;
};

int cmd_simulate(const SimulateArgs& args) {
  const bcore::Instance inst = load_instance_file(args.instance_path);
  bcore::RunConfig cfg;
  cfg.seed = args.seed;
  cfg.horizon = args.horizon;
  if (args.init == "zero") {
    cfg.init_mode = bcore::InitMode::Zero;
  } else if (args.init == "random") {
    cfg.init_mode = bcore::InitMode::RandomOnGrid;
  } else {
    throw bcore::MalformedInput("--init must be 'zero' or 'random'");
  }
  cfg.core_check_period = args.check_period;
  cfg.record_trace = !args.trace_path.empty();

  const bcore::RunResult result = bcore::run(inst, cfg);
  if (!args.trace_path.empty()) {
    write_file(args.trace_path, bcore::trace_csv(result.trace, inst));
    write_file(args.trace_path + ".meta.json",
               bcore::trace_metadata_json(inst, cfg) + "\n");
  }
  if (!args.state_path.empty()) {
    write_file(args.state_path,
               bcore::serialize_state(result.state, inst) + "\n");
  }

  json summary;
  summary["converged"] = result.converged;
  summary["horizon"] = cfg.horizon;
  if (result.iterations_to_core) {
    summary["iterations_to_core"] = *result.iterations_to_core;
  } else {
    summary["iterations_to_core"] = nullptr;
  }
  summary["matched_edges"] = result.state.matched_edge_count();
  summary["seed"] = cfg.seed;
  summary["total_feasible_aspiration"] =
      result.state.total_feasible_aspiration();
  std::cout << summary.dump(2) << '\n';
  return 0;
}

struct CertifyArgs {
  std::string instance_path;
  std::string state_path;
  bool nodes_core = false;
  int max_coalition_nodes = 10;
};

int cmd_certify(const CertifyArgs& args) {
  const bcore::Instance inst = load_instance_file(args.instance_path);
  const bcore::ExpandedState state =
      bcore::load_state(read_file(args.state_path), inst);

  const bcore::FeasibilityReport feas = bcore::check_feasible(state, inst);
  const bcore::CoreReport core = bcore::check_copies_core(state, inst);

  json out;
  out["feasible"] = {
      {"ok", feas.ok()},
      {"matching_valid", feas.matching_valid},
      {"duplicate_pair_edges", copy_edges_json(inst, feas.duplicate_pair_edges)},
      {"aspirations_non_negative", feas.aspirations_non_negative},
      {"negative_copies", copies_json(inst, feas.negative_copies)},
      {"edges_saturated", feas.edges_saturated},
      {"unsaturated_edges", copy_edges_json(inst, feas.unsaturated_edges)},
  };
  out["stopping"] = {
      {"is_core", core.is_core},
      {"edge_saturation", core.edge_saturation},
      {"saturation_violations",
       copy_edges_json(inst, core.saturation_violations)},
      {"pairwise_stability", core.pairwise_stability},
      {"stability_violations",
       copy_edges_json(inst, core.stability_violations)},
      {"zero_gain", core.zero_gain},
      {"zero_gain_violations", copies_json(inst, core.zero_gain_violations)},
  };

  bool pass = feas.ok() && core.is_core;
  if (args.nodes_core) {
    const bcore::NodesSolution sol = bcore::reduce(state, inst);
    const bcore::NodesCoreResult nodes =
        bcore::check_nodes_core(sol, inst, args.max_coalition_nodes);
    json nc;
    nc["ok"] = nodes.ok;
    nc["detail"] = nodes.detail;
    nc["allocation_total"] = nodes.allocation_total;
    nc["optimum"] = nodes.optimum;
    if (nodes.violating_coalition) {
      json coal;
      json u = json::array();
      for (int n : nodes.violating_coalition->u_nodes) u.push_back(inst.u_ids[n]);
      json v = json::array();
      for (int n : nodes.violating_coalition->v_nodes) v.push_back(inst.v_ids[n]);
      coal["u_nodes"] = std::move(u);
      coal["v_nodes"] = std::move(v);
      nc["violating_coalition"] = std::move(coal);
    } else {
      nc["violating_coalition"] = nullptr;
    }
    out["nodes_core"] = std::move(nc);
    pass = pass && nodes.ok;
  }

  std::cout << out.dump(2) << '\n';
  return pass ? 0 : 1;
}

struct OracleArgs {
  std::string instance_path;
  std::string coalition;
  bool brute_force = false;
};

int cmd_oracle(const OracleArgs& args) {
  const bcore::Instance inst = load_instance_file(args.instance_path);
  bcore::Coalition coal = bcore::Coalition::full(inst);
  if (!args.coalition.empty()) {
    coal = bcore::Coalition{};
    std::stringstream ss(args.coalition);
    std::string id;
    while (std::getline(ss, id, ',')) {
      while (!id.empty() && id.front() == ' ') id.erase(id.begin());
      while (!id.empty() && id.back() == ' ') id.pop_back();
      const auto node = inst.find_node(id);
      if (!node) {
        throw bcore::MalformedInput("unknown coalition node '" + id + "'");
      }
      (node->side == bcore::Side::U ? coal.u_nodes : coal.v_nodes)
          .push_back(node->node);
    }
    auto tidy = [](std::vector<int>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    tidy(coal.u_nodes);
    tidy(coal.v_nodes);
  }

  json out;
  if (args.brute_force) {
    const bcore::Money value = bcore::brute_force_value(inst, coal);
    out["value"] = money_text(inst, value);
    out["value_units"] = value;
  } else {
    const bcore::OracleResult result = bcore::max_b_matching_value(inst, coal);
    json matching = json::array();
    for (const auto& [u, v] : result.matching) {
      matching.push_back(json::array({inst.u_ids[u], inst.v_ids[v]}));
    }
    out["matching"] = std::move(matching);
    out["value"] = money_text(inst, result.value);
    out["value_units"] = result.value;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

struct GenerateArgs {
  int num_tasks = 0;
  int num_robots = 0;
  std::uint64_t seed = 0;
  std::string epsilon = "1";
  bcore::GenConfig cfg;
};

int cmd_generate(const GenerateArgs& args) {
  bcore::GenConfig cfg = args.cfg;
  cfg.epsilon = bcore::parse_decimal(args.epsilon);
  const bcore::Instance inst = bcore::generate_task_assignment(
      args.num_tasks, args.num_robots, args.seed, cfg);
  std::cout << bcore::serialize_instance(inst) << '\n';
  return 0;
}

struct SweepArgs {
  std::string spec_path;
  std::string out_path;
  std::string convergence_path;
  int threads = 0;
};

int cmd_sweep(const SweepArgs& args) {
  const bcore::SweepSpec spec = bcore::load_sweep_spec(read_file(args.spec_path));
  const bcore::SweepResult result = bcore::run_sweep(spec, args.threads);
  const std::string csv = bcore::aggregate_csv(result.rows);
  if (args.out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(args.out_path, csv);
  }
  if (!args.convergence_path.empty()) {
    write_file(args.convergence_path, bcore::convergence_csv(result.stats));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aspiration dynamics and exact solvers for bipartite "
               "many-to-many assignment markets"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand(
      "solve", "Settle aspirations to a stopping state and print it");
  solve->add_option("instance", solve_args.instance_path, "Instance JSON file")
      ->required();
  solve->add_option("--mode", solve_args.mode,
                    "Step size: 'epsilon' (one grid unit) or 'min-delta'");
  solve->add_option("--over-class", solve_args.over_class,
                    "Class that starts with inflated aspirations (U or V)");
  solve->add_option("--log", solve_args.log_path,
                    "Write a per-step CSV log to this path");
  solve->add_flag("--check-invariants", solve_args.check_invariants,
                  "Re-verify feasibility and stability after every step");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand(
      "simulate", "Run the random proposal process and print a summary");
  simulate->add_option("instance", sim_args.instance_path, "Instance JSON file")
      ->required();
  simulate->add_option("--seed", sim_args.seed, "RNG seed");
  simulate->add_option("--horizon", sim_args.horizon, "Number of iterations")
      ->required();
  simulate->add_option("--init", sim_args.init,
                       "Initial aspirations: 'zero' or 'random'");
  simulate->add_option("--check-period", sim_args.check_period,
                       "Check for a stopping state every N iterations "
                       "(0 = never)");
  simulate->add_option("--trace", sim_args.trace_path,
                       "Write a per-iteration CSV trace (plus .meta.json)");
  simulate->add_option("--state", sim_args.state_path,
                       "Write the final state snapshot to this path");

  CertifyArgs certify_args;
  auto* certify = app.add_subcommand(
      "certify", "Check a state snapshot against the stopping conditions");
  certify->add_option("instance", certify_args.instance_path,
                      "Instance JSON file")
      ->required();
  certify->add_option("state", certify_args.state_path, "State snapshot JSON")
      ->required();
  certify->add_flag("--nodes-core", certify_args.nodes_core,
                    "Also verify the per-node allocation by coalition "
                    "enumeration");
  certify->add_option("--max-coalition-nodes", certify_args.max_coalition_nodes,
                      "Refuse coalition enumeration above this node count");

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand(
      "oracle", "Print the optimal matching worth for a coalition");
  oracle->add_option("instance", oracle_args.instance_path,
                     "Instance JSON file")
      ->required();
  oracle->add_option("--coalition", oracle_args.coalition,
                     "Comma-separated node ids (default: all nodes)");
  oracle->add_flag("--brute-force", oracle_args.brute_force,
                   "Use exhaustive edge-subset search (max 20 edges)");

  GenerateArgs gen_args;
  auto* generate = app.add_subcommand(
      "generate", "Print a random task-assignment instance");
  generate->add_option("num_tasks", gen_args.num_tasks, "Class-U size")
      ->required();
  generate->add_option("num_robots", gen_args.num_robots, "Class-V size")
      ->required();
  generate->add_option("--seed", gen_args.seed, "RNG seed");
  generate->add_option("--epsilon", gen_args.epsilon, "Grid step (decimal)");
  generate->add_option("--value-min", gen_args.cfg.value_min, "Min task value");
  generate->add_option("--value-max", gen_args.cfg.value_max, "Max task value");
  generate->add_option("--accuracy-min", gen_args.cfg.accuracy_num_min,
                       "Min accuracy numerator");
  generate->add_option("--accuracy-max", gen_args.cfg.accuracy_num_max,
                       "Max accuracy numerator");
  generate->add_option("--accuracy-den", gen_args.cfg.accuracy_den,
                       "Accuracy denominator");
  generate->add_option("--b-min", gen_args.cfg.b_min, "Min capacity");
  generate->add_option("--b-max", gen_args.cfg.b_max, "Max capacity");
  generate->add_option("--scale-num", gen_args.cfg.scale_num,
                       "Worth scale numerator");
  generate->add_option("--scale-den", gen_args.cfg.scale_den,
                       "Worth scale denominator");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand(
      "sweep", "Run a batch of simulations and print aggregate CSV");
  sweep->add_option("spec", sweep_args.spec_path, "Sweep spec JSON file")
      ->required();
  sweep->add_option("--out", sweep_args.out_path,
                    "Write the aggregate CSV here instead of stdout");
  sweep->add_option("--convergence-out", sweep_args.convergence_path,
                    "Write per-point convergence stats CSV to this path");
  sweep->add_option("--threads", sweep_args.threads,
                    "Worker threads (0 = auto; BCORE_THREADS caps it)");

  int rc = 0;
  solve->callback([&] { rc = cmd_solve(solve_args); });
  simulate->callback([&] { rc = cmd_simulate(sim_args); });
  certify->callback([&] { rc = cmd_certify(certify_args); });
  oracle->callback([&] { rc = cmd_oracle(oracle_args); });
  generate->callback([&] { rc = cmd_generate(gen_args); });
  sweep->callback([&] { rc = cmd_sweep(sweep_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const bcore::Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return rc;
}
