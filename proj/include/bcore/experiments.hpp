#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "bcore/instance.hpp"
#include "bcore/rational.hpp"

namespace bcore {

// Exact aggregation type: per-run fractions value/optimum are averaged over
// hundreds of runs, which overflows fixed-width rationals.
using BigRat = boost::multiprecision::cpp_rational;

enum class SweepKind { Baseline, BScaling, Epsilon, NodeRemoval };

struct SweepSpec {
  SweepKind kind = SweepKind::Baseline;
  int num_instances = 1;
  int num_seeds_per_instance = 1;
  long long horizon = 0;
  long long iter_bucket = 100;
  std::uint64_t master_seed = 0;
  int num_tasks = 0;   // 0 = kind-specific default
  int num_robots = 0;
  GenConfig gen;
  std::vector<int> factors = {1, 2, 3};          // b-scaling
  std::vector<Rat> epsilons;                     // epsilon sweep, descending
  std::vector<int> removals = {0, 2, 4};         // node-removal stages
};

// Parses the sweep spec JSON (see README for the schema). Unknown kind or
// malformed fields throw MalformedInput.
SweepSpec load_sweep_spec(const std::string& json_text);

// One output row per (sweep point, iteration bucket): the mean over runs of
// the matched worth relative to the optimum, and the fraction of runs
// already at the optimum.
struct AggregateRow {
  std::string sweep_point;
  long long iter_bucket = 0;
  BigRat mean_relative_feasible;
  BigRat frac_at_opt;
  int n_runs = 0;
};

// Convergence summary per sweep point; runs that never reach a stopping
// state count as horizon iterations.
struct ConvergenceStat {
  std::string sweep_point;
  long long median_iterations_to_core = 0;
  int n_converged = 0;
  int n_runs = 0;
};

struct SweepResult {
  std::vector<AggregateRow> rows;
  std::vector<ConvergenceStat> stats;
};

// All runs start from the zero state. Worker threads split work per run;
// results are ordered deterministically regardless of thread count.
// threads == 0 picks hardware concurrency; the BCORE_THREADS environment
// variable caps whatever is picked.
SweepResult run_baseline(const SweepSpec& spec, int threads = 0);
SweepResult run_b_scaling(const SweepSpec& spec, int threads = 0);
SweepResult run_epsilon_sweep(const SweepSpec& spec, int threads = 0);
SweepResult run_node_removal(const SweepSpec& spec, int threads = 0);

// Dispatches on spec.kind.
SweepResult run_sweep(const SweepSpec& spec, int threads = 0);

// CSV with header sweep_point,iter_bucket,mean_relative_feasible,
// frac_at_opt,n_runs. Fractions are printed rounded to 9 fractional digits
// (half away from zero), deterministically.
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

// CSV with header sweep_point,median_iterations_to_core,n_converged,n_runs.
std::string convergence_csv(const std::vector<ConvergenceStat>& stats);

// Deterministic decimal rendering used by aggregate_csv.
std::string format_bigrat(const BigRat& value, int digits);

}  // namespace bcore
