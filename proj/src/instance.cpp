#include "bcore/instance.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "bcore/errors.hpp"
#include "bcore/rng.hpp"

namespace bcore {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw MalformedInput(std::string("invalid JSON in ") + what);
  }
  return j;
}

// Decimal string, or integer JSON number (exact either way). Anything else,
// including floating JSON numbers, is rejected: non-integer amounts must be
// written as strings so no binary rounding sneaks in.
Rat amount_field(const json& v, const std::string& what) {
  if (v.is_string()) return parse_decimal(v.get<std::string>());
  if (v.is_number_integer()) return Rat{v.get<long long>(), 1};
  throw MalformedInput(what + " must be a decimal string");
}

Money weight_units(const Rat& w, const Rat& eps, const std::string& what) {
  if (w.num < 0) {
    throw NegativeWeight(what + " is negative: " + to_decimal_string(w));
  }
  long long units = 0;
  if (!rat_is_integer_multiple(w, eps, &units)) {
    throw OffGridWeight(what + " = " + to_decimal_string(w) +
                        " is not a multiple of epsilon = " +
                        to_decimal_string(eps));
  }
  return units;
}

void clamp_capacities(std::vector<int>& b, const std::vector<std::string>& ids,
                      int limit, std::vector<std::string>* warnings) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] > limit) {
      if (warnings != nullptr) {
        warnings->push_back("B(" + ids[i] + ") clamped from " +
                            std::to_string(b[i]) + " to " +
                            std::to_string(limit));
      }
      b[i] = limit;
    }
  }
}

void validate_shape(const Instance& inst) {
  if (inst.num_u() == 0 || inst.num_v() == 0) {
    throw MalformedInput("both node classes must be non-empty");
  }
  std::set<std::string> seen;
  for (const auto& id : inst.u_ids) {
    if (id.empty() || !seen.insert(id).second) {
      throw MalformedInput("duplicate or empty node id '" + id + "'");
    }
  }
  for (const auto& id : inst.v_ids) {
    if (id.empty() || !seen.insert(id).second) {
      throw MalformedInput("duplicate or empty node id '" + id + "'");
    }
  }
  if (static_cast<int>(inst.weights.size()) != inst.num_u()) {
    throw MalformedInput("weights must have one row per class-U node");
  }
  for (const auto& row : inst.weights) {
    if (static_cast<int>(row.size()) != inst.num_v()) {
      throw MalformedInput("weights rows must have one entry per class-V node");
    }
  }
  if (inst.epsilon.num <= 0) {
    throw MalformedInput("epsilon must be positive");
  }
}

}  // namespace

const char* side_name(Side s) { return s == Side::U ? "U" : "V"; }

Money Instance::max_weight() const {
  Money best = 0;
  for (const auto& row : weights) {
    for (Money w : row) best = std::max(best, w);
  }
  return best;
}

int Instance::total_copies() const {
  return std::accumulate(b_u.begin(), b_u.end(), 0) +
         std::accumulate(b_v.begin(), b_v.end(), 0);
}

std::optional<NodeRef> Instance::find_node(std::string_view id) const {
  for (int i = 0; i < num_u(); ++i) {
    if (u_ids[i] == id) return NodeRef{Side::U, i};
  }
  for (int i = 0; i < num_v(); ++i) {
    if (v_ids[i] == id) return NodeRef{Side::V, i};
  }
  return std::nullopt;
}

Instance load_instance(const std::string& json_text,
                       std::vector<std::string>* warnings) {
  const json j = parse_json(json_text, "instance");
  if (!j.is_object()) throw MalformedInput("instance must be a JSON object");
  for (const char* key : {"epsilon", "u_nodes", "v_nodes", "b_values", "weights"}) {
    if (!j.contains(key)) {
      throw MalformedInput(std::string("instance is missing '") + key + "'");
    }
  }

  Instance inst;
  inst.epsilon = amount_field(j.at("epsilon"), "epsilon");
  if (inst.epsilon.num <= 0) throw MalformedInput("epsilon must be positive");

  if (!j.at("u_nodes").is_array() || !j.at("v_nodes").is_array()) {
    throw MalformedInput("u_nodes / v_nodes must be arrays of ids");
  }
  for (const auto& v : j.at("u_nodes")) {
    if (!v.is_string()) throw MalformedInput("u_nodes entries must be strings");
    inst.u_ids.push_back(v.get<std::string>());
  }
  for (const auto& v : j.at("v_nodes")) {
    if (!v.is_string()) throw MalformedInput("v_nodes entries must be strings");
    inst.v_ids.push_back(v.get<std::string>());
  }

  if (!j.at("weights").is_array()) {
    throw MalformedInput("weights must be an array of rows");
  }
  for (std::size_t u = 0; u < j.at("weights").size(); ++u) {
    const auto& row = j.at("weights")[u];
    if (!row.is_array()) throw MalformedInput("weights rows must be arrays");
    std::vector<Money> out;
    for (std::size_t v = 0; v < row.size(); ++v) {
      const std::string what = "weight[" + std::to_string(u) + "][" +
                               std::to_string(v) + "]";
      out.push_back(weight_units(amount_field(row[v], what), inst.epsilon, what));
    }
    inst.weights.push_back(std::move(out));
  }

  const auto& bvals = j.at("b_values");
  if (!bvals.is_object()) throw MalformedInput("b_values must be an object");
  auto take_b = [&](const std::string& id) {
    if (!bvals.contains(id)) {
      throw MalformedInput("b_values is missing node '" + id + "'");
    }
    const auto& v = bvals.at(id);
    if (!v.is_number_integer()) {
      throw MalformedInput("B(" + id + ") must be an integer");
    }
    const long long b = v.get<long long>();
    if (b <= 0) {
      throw NonPositiveB("B(" + id + ") = " + std::to_string(b) +
                         " must be at least 1");
    }
    return static_cast<int>(b);
  };
  for (const auto& id : inst.u_ids) inst.b_u.push_back(take_b(id));
  for (const auto& id : inst.v_ids) inst.b_v.push_back(take_b(id));
  if (bvals.size() != inst.u_ids.size() + inst.v_ids.size()) {
    throw MalformedInput("b_values contains unknown node ids");
  }

  validate_shape(inst);
  clamp_capacities(inst.b_u, inst.u_ids, inst.num_v(), warnings);
  clamp_capacities(inst.b_v, inst.v_ids, inst.num_u(), warnings);
  return inst;
}

std::string serialize_instance(const Instance& inst) {
  json j;
  j["epsilon"] = to_decimal_string(inst.epsilon);
  j["u_nodes"] = inst.u_ids;
  j["v_nodes"] = inst.v_ids;
  json b = json::object();
  for (int i = 0; i < inst.num_u(); ++i) b[inst.u_ids[i]] = inst.b_u[i];
  for (int i = 0; i < inst.num_v(); ++i) b[inst.v_ids[i]] = inst.b_v[i];
  j["b_values"] = std::move(b);
  json rows = json::array();
  for (const auto& row : inst.weights) {
    json out = json::array();
    for (Money w : row) {
      out.push_back(to_decimal_string(rat_mul(Rat{w, 1}, inst.epsilon)));
    }
    rows.push_back(std::move(out));
  }
  j["weights"] = std::move(rows);
  return j.dump(2);
}

Instance generate_task_assignment(int num_tasks, int num_robots,
                                  std::uint64_t seed, const GenConfig& cfg) {
  if (num_tasks < 1 || num_robots < 1) {
    throw MalformedInput("need at least one task and one robot");
  }
  if (cfg.value_min < 0 || cfg.value_max < cfg.value_min ||
      cfg.accuracy_num_min < 0 || cfg.accuracy_num_max < cfg.accuracy_num_min ||
      cfg.accuracy_den < 1 || cfg.b_min < 1 || cfg.b_max < cfg.b_min ||
      cfg.scale_num < 1 || cfg.scale_den < 1 || cfg.epsilon.num <= 0) {
    throw MalformedInput("invalid generator configuration");
  }

  Rng rng(seed);
  auto uniform_int = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng.next_below(
                    static_cast<std::uint64_t>(hi - lo + 1)));
  };

  std::vector<int> values(num_tasks);
  for (int& v : values) v = uniform_int(cfg.value_min, cfg.value_max);
  std::vector<int> acc(num_robots);
  for (int& a : acc) a = uniform_int(cfg.accuracy_num_min, cfg.accuracy_num_max);

  Instance inst;
  inst.epsilon = cfg.epsilon;
  for (int t = 0; t < num_tasks; ++t) inst.u_ids.push_back("t" + std::to_string(t + 1));
  for (int r = 0; r < num_robots; ++r) inst.v_ids.push_back("r" + std::to_string(r + 1));

  // Worth of assigning robot r to task t: accuracy * value * scale, floored
  // onto the epsilon grid.
  for (int t = 0; t < num_tasks; ++t) {
    std::vector<Money> row(num_robots);
    for (int r = 0; r < num_robots; ++r) {
      const __int128 num = __int128(acc[r]) * values[t] * cfg.scale_num *
                           inst.epsilon.den;
      const __int128 den = __int128(cfg.accuracy_den) * cfg.scale_den *
                           inst.epsilon.num;
      row[r] = static_cast<Money>(num / den);
    }
    inst.weights.push_back(std::move(row));
  }

  for (int t = 0; t < num_tasks; ++t) {
    inst.b_u.push_back(uniform_int(cfg.b_min, cfg.b_max));
  }
  // Robot capacities fall with accuracy rank: precise robots are scarce.
  std::vector<int> order(num_robots);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&acc](int a, int b) {
    return acc[a] != acc[b] ? acc[a] < acc[b] : a < b;
  });
  inst.b_v.assign(num_robots, cfg.b_min);
  const int span = cfg.b_max - cfg.b_min + 1;
  for (int rank = 0; rank < num_robots; ++rank) {
    inst.b_v[order[rank]] =
        cfg.b_max - static_cast<int>((static_cast<long long>(rank) * span) /
                                     num_robots);
  }

  validate_shape(inst);
  clamp_capacities(inst.b_u, inst.u_ids, inst.num_v(), nullptr);
  clamp_capacities(inst.b_v, inst.v_ids, inst.num_u(), nullptr);
  return inst;
}

Instance scale_b_values(const Instance& inst, int factor) {
  if (factor < 1) throw std::invalid_argument("scale factor must be >= 1");
  Instance out = inst;
  for (int& b : out.b_u) b *= factor;
  for (int& b : out.b_v) b *= factor;
  clamp_capacities(out.b_u, out.u_ids, out.num_v(), nullptr);
  clamp_capacities(out.b_v, out.v_ids, out.num_u(), nullptr);
  return out;
}

Instance remove_nodes(const Instance& inst,
                      const std::vector<std::string>& node_ids) {
  std::set<std::string> drop;
  for (const auto& id : node_ids) {
    if (!inst.find_node(id)) {
      throw MalformedInput("cannot remove unknown node '" + id + "'");
    }
    drop.insert(id);
  }

  Instance out;
  out.epsilon = inst.epsilon;
  std::vector<int> keep_u;
  for (int i = 0; i < inst.num_u(); ++i) {
    if (!drop.count(inst.u_ids[i])) {
      keep_u.push_back(i);
      out.u_ids.push_back(inst.u_ids[i]);
      out.b_u.push_back(inst.b_u[i]);
    }
  }
  std::vector<int> keep_v;
  for (int i = 0; i < inst.num_v(); ++i) {
    if (!drop.count(inst.v_ids[i])) {
      keep_v.push_back(i);
      out.v_ids.push_back(inst.v_ids[i]);
      out.b_v.push_back(inst.b_v[i]);
    }
  }
  if (out.u_ids.empty() || out.v_ids.empty()) {
    throw WouldEmptyClass("removal would leave a node class empty");
  }
  for (int u : keep_u) {
    std::vector<Money> row;
    for (int v : keep_v) row.push_back(inst.weights[u][v]);
    out.weights.push_back(std::move(row));
  }
  clamp_capacities(out.b_u, out.u_ids, out.num_v(), nullptr);
  clamp_capacities(out.b_v, out.v_ids, out.num_u(), nullptr);
  return out;
}

Instance rescale_epsilon(const Instance& inst, const Rat& new_epsilon) {
  if (new_epsilon.num <= 0) throw MalformedInput("epsilon must be positive");
  Instance out = inst;
  out.epsilon = new_epsilon;
  for (int u = 0; u < inst.num_u(); ++u) {
    for (int v = 0; v < inst.num_v(); ++v) {
      const Rat worth = rat_mul(Rat{inst.weights[u][v], 1}, inst.epsilon);
      long long units = 0;
      if (!rat_is_integer_multiple(worth, new_epsilon, &units)) {
        throw OffGridWeight("weight " + to_decimal_string(worth) +
                            " is not a multiple of epsilon = " +
                            to_decimal_string(new_epsilon));
      }
      out.weights[u][v] = units;
    }
  }
  return out;
}

std::string instance_digest(const Instance& inst) {
  const std::string bytes = serialize_instance(inst);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace bcore
