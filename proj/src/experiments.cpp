#include "bcore/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "bcore/dynamics.hpp"
#include "bcore/errors.hpp"
#include "bcore/oracle.hpp"
#include "bcore/rng.hpp"

namespace bcore {

namespace {

using nlohmann::json;

constexpr std::uint64_t kRemovalStream = 0x52454d4f56414cULL;  // != run index

int resolve_threads(int requested) {
  int threads = requested > 0
                    ? requested
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* cap_text = std::getenv("BCORE_THREADS")) {
    const int cap = std::atoi(cap_text);
    if (cap > 0) threads = std::min(threads, cap);
  }
  return threads;
}

// Iteration counts at which a run is sampled: every bucket boundary plus the
// horizon itself.
std::vector<long long> bucket_marks(long long horizon, long long bucket) {
  std::vector<long long> marks;
  for (long long m = 0; m < horizon; m += bucket) marks.push_back(m);
  marks.push_back(horizon);
  return marks;
}

struct RunOutcome {
  std::vector<Money> tfa;  // matched worth at each mark
  long long iterations_to_core = 0;
  bool converged = false;
};

// One dynamics run from the zero state, sampled at the marks. Once the
// periodic stopping-state check passes the state can never change again, so
// the remaining marks are filled without stepping further.
RunOutcome simulate_curve(const Instance& inst, std::uint64_t seed,
                          const std::vector<long long>& marks) {
  ExpandedState state(inst);
  Rng rng(seed);
  RunOutcome out;
  out.iterations_to_core = marks.back();
  out.tfa.reserve(marks.size());

  bool absorbed = false;
  long long h = 0;
  Money tfa = 0;
  for (const long long mark : marks) {
    if (!absorbed) {
      while (h < mark) {
        ++h;
        step(state, inst, rng);
      }
      tfa = state.total_feasible_aspiration();
      if (check_copies_core(state, inst).is_core) {
        absorbed = true;
        out.converged = true;
        out.iterations_to_core = mark;
      }
    }
    out.tfa.push_back(tfa);
  }
  return out;
}

// A sweep point owns one instance variant per base instance; run seeds are
// shared across points so comparisons are paired.
struct PointPlan {
  std::string label;
  std::vector<Instance> instances;
  std::vector<Money> opts;
};

void fill_opts(PointPlan& point) {
  point.opts.reserve(point.instances.size());
  for (const Instance& inst : point.instances) {
    point.opts.push_back(
        max_b_matching_value(inst, Coalition::full(inst)).value);
  }
}

GenConfig base_gen(const SweepSpec& spec) { return spec.gen; }

std::vector<Instance> base_instances(const SweepSpec& spec, int num_tasks,
                                     int num_robots) {
  std::vector<Instance> out;
  out.reserve(spec.num_instances);
  for (int i = 0; i < spec.num_instances; ++i) {
    out.push_back(generate_task_assignment(
        num_tasks, num_robots, derive_seed(spec.master_seed, i, 0),
        base_gen(spec)));
  }
  return out;
}

SweepResult run_plan(std::vector<PointPlan> points, const SweepSpec& spec,
                     int threads) {
  for (PointPlan& point : points) fill_opts(point);
  const std::vector<long long> marks =
      bucket_marks(spec.horizon, spec.iter_bucket);
  const int runs_per_instance = spec.num_seeds_per_instance;
  const int runs_per_point = spec.num_instances * runs_per_instance;

  struct Task {
    int point;
    int instance;
    int run;
  };
  std::vector<Task> tasks;
  for (int p = 0; p < static_cast<int>(points.size()); ++p) {
    for (int i = 0; i < spec.num_instances; ++i) {
      for (int j = 0; j < runs_per_instance; ++j) tasks.push_back({p, i, j});
    }
  }

  std::vector<RunOutcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      try {
        const Task& task = tasks[t];
        outcomes[t] = simulate_curve(
            points[task.point].instances[task.instance],
            derive_seed(spec.master_seed, task.instance, 1 + task.run), marks);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const int n_threads =
      std::min<int>(resolve_threads(threads), std::max<std::size_t>(tasks.size(), 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  SweepResult result;
  for (int p = 0; p < static_cast<int>(points.size()); ++p) {
    const RunOutcome* block = outcomes.data() + std::size_t(p) * runs_per_point;
    for (std::size_t m = 0; m < marks.size(); ++m) {
      AggregateRow row;
      row.sweep_point = points[p].label;
      row.iter_bucket = marks[m];
      row.n_runs = runs_per_point;
      BigRat mean = 0;
      int at_opt = 0;
      for (int i = 0; i < spec.num_instances; ++i) {
        const Money opt = points[p].opts[i];
        for (int j = 0; j < runs_per_instance; ++j) {
          const Money tfa =
              block[std::size_t(i) * runs_per_instance + j].tfa[m];
          // A worthless instance is trivially at its optimum.
          mean += opt == 0 ? BigRat(1) : BigRat(tfa, opt);
          if (tfa == opt) ++at_opt;
        }
      }
      row.mean_relative_feasible = mean / runs_per_point;
      row.frac_at_opt = BigRat(at_opt, runs_per_point);
      result.rows.push_back(std::move(row));
    }

    ConvergenceStat stat;
    stat.sweep_point = points[p].label;
    stat.n_runs = runs_per_point;
    std::vector<long long> iters;
    iters.reserve(runs_per_point);
    for (int r = 0; r < runs_per_point; ++r) {
      const RunOutcome& o = block[r];
      iters.push_back(o.iterations_to_core);
      if (o.converged) ++stat.n_converged;
    }
    std::sort(iters.begin(), iters.end());
    stat.median_iterations_to_core = iters[(iters.size() - 1) / 2];
    result.stats.push_back(std::move(stat));
  }
  return result;
}

}  // namespace

SweepSpec load_sweep_spec(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw MalformedInput("sweep spec must be a JSON object");
  }
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw MalformedInput("sweep spec needs a 'kind' string");
  }

  SweepSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "baseline") {
    spec.kind = SweepKind::Baseline;
  } else if (kind == "b-scaling") {
    spec.kind = SweepKind::BScaling;
  } else if (kind == "epsilon") {
    spec.kind = SweepKind::Epsilon;
  } else if (kind == "node-removal") {
    spec.kind = SweepKind::NodeRemoval;
  } else {
    throw MalformedInput("unknown sweep kind '" + kind + "'");
  }

  if (!j.contains("horizon")) throw MalformedInput("sweep spec needs 'horizon'");

  auto take_int = [&](const char* key, long long lo, long long hi,
                      long long fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) {
      throw MalformedInput(std::string("'") + key + "' must be an integer");
    }
    const long long v = j.at(key).get<long long>();
    if (v < lo || v > hi) {
      throw MalformedInput(std::string("'") + key + "' out of range");
    }
    return v;
  };

  spec.num_instances = static_cast<int>(take_int("num_instances", 1, 100000, 1));
  spec.num_seeds_per_instance =
      static_cast<int>(take_int("num_seeds_per_instance", 1, 100000, 1));
  spec.horizon = take_int("horizon", 1, 1000000000LL, 0);
  spec.iter_bucket = take_int("iter_bucket", 1, 1000000000LL, 100);
  spec.master_seed = static_cast<std::uint64_t>(
      take_int("master_seed", 0, 9007199254740992LL, 0));
  // Headline runs pair many tasks with few robots; the structural sweeps
  // default to balanced classes.
  const bool baseline = spec.kind == SweepKind::Baseline;
  spec.num_tasks =
      static_cast<int>(take_int("num_tasks", 1, 1000, baseline ? 10 : 9));
  spec.num_robots =
      static_cast<int>(take_int("num_robots", 1, 1000, baseline ? 5 : 9));

  // The headline kind demos the 10-task/5-robot market with small task
  // values and generous capacities so that 100-run curves settle well within
  // a 2e5-iteration horizon; the structural sweeps keep larger values and the
  // {1..3} capacity family they are defined over.
  spec.gen.value_min = static_cast<int>(take_int("value_min", 0, 1000000, 1));
  spec.gen.value_max = static_cast<int>(
      take_int("value_max", 0, 1000000, baseline ? 5 : 10));
  spec.gen.accuracy_num_min =
      static_cast<int>(take_int("accuracy_num_min", 0, 1000000, 5));
  spec.gen.accuracy_num_max =
      static_cast<int>(take_int("accuracy_num_max", 0, 1000000, 15));
  spec.gen.accuracy_den =
      static_cast<int>(take_int("accuracy_den", 1, 1000000, 10));
  spec.gen.b_min = static_cast<int>(take_int("b_min", 1, 1000, 1));
  spec.gen.b_max =
      static_cast<int>(take_int("b_max", 1, 1000, baseline ? 5 : 3));
  spec.gen.scale_num = static_cast<int>(take_int("scale_num", 1, 1000000, 1));
  spec.gen.scale_den = static_cast<int>(take_int("scale_den", 1, 1000000, 1));

  if (j.contains("factors")) {
    if (!j.at("factors").is_array() || j.at("factors").empty()) {
      throw MalformedInput("'factors' must be a non-empty array");
    }
    spec.factors.clear();
    for (const auto& f : j.at("factors")) {
      if (!f.is_number_integer() || f.get<long long>() < 1) {
        throw MalformedInput("'factors' entries must be integers >= 1");
      }
      spec.factors.push_back(static_cast<int>(f.get<long long>()));
    }
  }
  if (j.contains("epsilons")) {
    if (!j.at("epsilons").is_array() || j.at("epsilons").empty()) {
      throw MalformedInput("'epsilons' must be a non-empty array");
    }
    for (const auto& e : j.at("epsilons")) {
      if (!e.is_string()) {
        throw MalformedInput("'epsilons' entries must be decimal strings");
      }
      const Rat eps = parse_decimal(e.get<std::string>());
      if (eps.num <= 0) throw MalformedInput("epsilons must be positive");
      spec.epsilons.push_back(eps);
    }
  }
  if (j.contains("removals")) {
    if (!j.at("removals").is_array() || j.at("removals").empty()) {
      throw MalformedInput("'removals' must be a non-empty array");
    }
    spec.removals.clear();
    for (const auto& r : j.at("removals")) {
      if (!r.is_number_integer() || r.get<long long>() < 0) {
        throw MalformedInput("'removals' entries must be integers >= 0");
      }
      spec.removals.push_back(static_cast<int>(r.get<long long>()));
    }
  }

  static const char* known[] = {
      "kind",          "num_instances", "num_seeds_per_instance",
      "horizon",       "iter_bucket",   "master_seed",
      "num_tasks",     "num_robots",    "value_min",
      "value_max",     "accuracy_num_min", "accuracy_num_max",
      "accuracy_den",  "b_min",         "b_max",
      "scale_num",     "scale_den",     "factors",
      "epsilons",      "removals"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw MalformedInput("unknown sweep spec field '" + key + "'");
  }
  return spec;
}

SweepResult run_baseline(const SweepSpec& spec, int threads) {
  PointPlan point;
  point.label = "baseline";
  point.instances = base_instances(spec, spec.num_tasks, spec.num_robots);
  std::vector<PointPlan> points;
  points.push_back(std::move(point));
  return run_plan(std::move(points), spec, threads);
}

SweepResult run_b_scaling(const SweepSpec& spec, int threads) {
  const std::vector<Instance> base =
      base_instances(spec, spec.num_tasks, spec.num_robots);
  std::vector<PointPlan> points;
  for (const int factor : spec.factors) {
    PointPlan point;
    point.label = "factor=" + std::to_string(factor);
    for (const Instance& inst : base) {
      point.instances.push_back(scale_b_values(inst, factor));
    }
    points.push_back(std::move(point));
  }
  return run_plan(std::move(points), spec, threads);
}

SweepResult run_epsilon_sweep(const SweepSpec& spec, int threads) {
  std::vector<Rat> epsilons = spec.epsilons;
  if (epsilons.empty()) {
    epsilons = {Rat{1, 1}, Rat{1, 2}, Rat{1, 4}, Rat{1, 8}};
  }
  const std::vector<Instance> base =
      base_instances(spec, spec.num_tasks, spec.num_robots);
  std::vector<PointPlan> points;
  for (const Rat& eps : epsilons) {
    PointPlan point;
    point.label = "eps=" + to_decimal_string(eps);
    for (const Instance& inst : base) {
      point.instances.push_back(rescale_epsilon(inst, eps));
    }
    points.push_back(std::move(point));
  }
  return run_plan(std::move(points), spec, threads);
}

SweepResult run_node_removal(const SweepSpec& spec, int threads) {
  const std::vector<Instance> base =
      base_instances(spec, spec.num_tasks, spec.num_robots);
  // Per-instance random removal order over all nodes, class U block first.
  std::vector<std::vector<std::string>> orders;
  for (int i = 0; i < static_cast<int>(base.size()); ++i) {
    const Instance& inst = base[i];
    std::vector<std::string> ids = inst.u_ids;
    ids.insert(ids.end(), inst.v_ids.begin(), inst.v_ids.end());
    Rng rng(derive_seed(spec.master_seed, i, kRemovalStream));
    for (std::size_t k = ids.size(); k > 1; --k) {
      std::swap(ids[k - 1], ids[rng.next_below(k)]);
    }
    orders.push_back(std::move(ids));
  }

  std::vector<PointPlan> points;
  for (const int removed : spec.removals) {
    PointPlan point;
    point.label = "removed=" + std::to_string(removed);
    for (int i = 0; i < static_cast<int>(base.size()); ++i) {
      if (removed == 0) {
        point.instances.push_back(base[i]);
        continue;
      }
      if (removed >= static_cast<int>(orders[i].size())) {
        throw WouldEmptyClass("removal stage drops every node");
      }
      const std::vector<std::string> drop(orders[i].begin(),
                                          orders[i].begin() + removed);
      point.instances.push_back(remove_nodes(base[i], drop));
    }
    points.push_back(std::move(point));
  }
  return run_plan(std::move(points), spec, threads);
}

SweepResult run_sweep(const SweepSpec& spec, int threads) {
  switch (spec.kind) {
    case SweepKind::Baseline: return run_baseline(spec, threads);
    case SweepKind::BScaling: return run_b_scaling(spec, threads);
    case SweepKind::Epsilon: return run_epsilon_sweep(spec, threads);
    case SweepKind::NodeRemoval: return run_node_removal(spec, threads);
  }
  throw std::logic_error("unreachable sweep kind");
}

std::string format_bigrat(const BigRat& value, int digits) {
  using boost::multiprecision::cpp_int;
  cpp_int num = numerator(value);
  cpp_int den = denominator(value);
  bool negative = false;
  if (num < 0) {
    negative = true;
    num = -num;
  }
  cpp_int scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  num *= scale;
  cpp_int q = num / den;
  const cpp_int r = num % den;
  if (r * 2 >= den) ++q;  // round half away from zero

  const cpp_int whole = q / scale;
  std::string out;
  if (negative && q != 0) out += '-';
  out += whole.str();
  if (digits > 0) {
    std::string frac_text = cpp_int(q % scale).str();
    frac_text.insert(frac_text.begin(),
                     static_cast<std::size_t>(digits) - frac_text.size(), '0');
    out += '.';
    out += frac_text;
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream out;
  out << "sweep_point,iter_bucket,mean_relative_feasible,frac_at_opt,n_runs\n";
  for (const AggregateRow& row : rows) {
    out << row.sweep_point << ',' << row.iter_bucket << ','
        << format_bigrat(row.mean_relative_feasible, 9) << ','
        << format_bigrat(row.frac_at_opt, 9) << ',' << row.n_runs << '\n';
  }
  return out.str();
}

std::string convergence_csv(const std::vector<ConvergenceStat>& stats) {
  std::ostringstream out;
  out << "sweep_point,median_iterations_to_core,n_converged,n_runs\n";
  for (const ConvergenceStat& stat : stats) {
    out << stat.sweep_point << ',' << stat.median_iterations_to_core << ','
        << stat.n_converged << ',' << stat.n_runs << '\n';
  }
  return out.str();
}

}  // namespace bcore
