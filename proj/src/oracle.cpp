#include "bcore/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "bcore/errors.hpp"

namespace bcore {

namespace {

// Induced pairs with positive worth; zero-worth pairs can be left out of the
// search since matching them never changes the optimal value.
struct InducedEdge {
  int u;  // position within coal.u_nodes
  int v;  // position within coal.v_nodes
  Money w;
};

std::vector<InducedEdge> induced_edges(const Instance& inst,
                                       const Coalition& coal) {
  std::vector<InducedEdge> edges;
  for (std::size_t ui = 0; ui < coal.u_nodes.size(); ++ui) {
    for (std::size_t vi = 0; vi < coal.v_nodes.size(); ++vi) {
      const Money w = inst.weight(coal.u_nodes[ui], coal.v_nodes[vi]);
      if (w > 0) {
        edges.push_back({static_cast<int>(ui), static_cast<int>(vi), w});
      }
    }
  }
  return edges;
}

void check_coalition(const Instance& inst, const Coalition& coal) {
  auto check = [](const std::vector<int>& nodes, int limit) {
    int prev = -1;
    for (int n : nodes) {
      if (n <= prev || n >= limit) {
        throw std::logic_error("coalition node list must be sorted, unique, "
                               "and in range");
      }
      prev = n;
    }
  };
  check(coal.u_nodes, inst.num_u());
  check(coal.v_nodes, inst.num_v());
}

// Successive shortest augmenting paths with node potentials. All arc costs
// are negative pair worths, so the first layered pass below yields exact
// initial potentials and Dijkstra on reduced costs stays exact afterwards.
class FlowSolver {
 public:
  FlowSolver(const Instance& inst, const Coalition& coal)
      : inst_(inst), coal_(coal) {
    const int nu = static_cast<int>(coal.u_nodes.size());
    const int nv = static_cast<int>(coal.v_nodes.size());
    source_ = 0;
    sink_ = nu + nv + 1;
    graph_.assign(sink_ + 1, {});
    for (int ui = 0; ui < nu; ++ui) {
      add_arc(source_, 1 + ui, inst.b_value(NodeRef{Side::U, coal.u_nodes[ui]}),
              0);
    }
    for (int vi = 0; vi < nv; ++vi) {
      add_arc(1 + nu + vi, sink_,
              inst.b_value(NodeRef{Side::V, coal.v_nodes[vi]}), 0);
    }
    for (const auto& e : induced_edges(inst, coal)) {
      add_arc(1 + e.u, 1 + nu + e.v, 1, -e.w);
    }
  }

  OracleResult solve() {
    OracleResult result;
    const int n = static_cast<int>(graph_.size());
    std::vector<long long> pot(n, 0);
    // Exact shortest distances from the source in the three-layer graph:
    // class-U nodes at 0, each class-V node at its cheapest incoming arc,
    // the sink at the cheapest class-V node.
    const int nu = static_cast<int>(coal_.u_nodes.size());
    for (int vi = 0; vi < static_cast<int>(coal_.v_nodes.size()); ++vi) {
      long long best = 0;  // unreachable V nodes keep potential 0
      bool any = false;
      for (int ui = 0; ui < nu; ++ui) {
        const Money w = inst_.weight(coal_.u_nodes[ui], coal_.v_nodes[vi]);
        if (w > 0 && (!any || -w < best)) {
          best = -w;
          any = true;
        }
      }
      pot[1 + nu + vi] = best;
      if (any) pot[sink_] = std::min(pot[sink_], best);
    }

    for (;;) {
      // Dijkstra on reduced costs; ties broken toward the lower node id so
      // the parent forest (and the witness matching) is deterministic.
      constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
      std::vector<long long> dist(n, kInf);
      std::vector<std::pair<int, int>> parent(n, {-1, -1});  // (node, arc)
      std::vector<bool> done(n, false);
      dist[source_] = 0;
      using Item = std::pair<long long, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
      pq.push({0, source_});
      while (!pq.empty()) {
        const auto [d, x] = pq.top();
        pq.pop();
        if (done[x]) continue;
        done[x] = true;
        for (int ai = 0; ai < static_cast<int>(graph_[x].size()); ++ai) {
          const Arc& arc = graph_[x][ai];
          if (arc.cap <= 0) continue;
          const long long nd = d + arc.cost + pot[x] - pot[arc.to];
          if (nd < dist[arc.to]) {
            dist[arc.to] = nd;
            parent[arc.to] = {x, ai};
            pq.push({nd, arc.to});
          }
        }
      }
      if (dist[sink_] >= kInf) break;
      const long long path_cost = dist[sink_] + pot[sink_];
      if (path_cost >= 0) break;  // no remaining improving assignment

      for (int x = 0; x < n; ++x) {
        if (dist[x] < kInf) pot[x] += dist[x];
      }
      // Every augmenting path crosses one unit-capacity pair arc, so each
      // augmentation moves exactly one unit.
      for (int x = sink_; x != source_;) {
        const auto [px, ai] = parent[x];
        Arc& arc = graph_[px][ai];
        arc.cap -= 1;
        graph_[x][arc.rev].cap += 1;
        x = px;
      }
      result.value -= path_cost;
    }

    for (int ui = 0; ui < nu; ++ui) {
      for (const Arc& arc : graph_[1 + ui]) {
        if (arc.to != source_ && arc.cap == 0) {
          result.matching.emplace_back(coal_.u_nodes[ui],
                                       coal_.v_nodes[arc.to - 1 - nu]);
        }
      }
    }
    std::sort(result.matching.begin(), result.matching.end());
    return result;
  }

 private:
  struct Arc {
    int to;
    int rev;  // index of the reverse arc in graph_[to]
    int cap;
    long long cost;
  };

  void add_arc(int from, int to, int cap, long long cost) {
    graph_[from].push_back({to, static_cast<int>(graph_[to].size()), cap, cost});
    graph_[to].push_back({from, static_cast<int>(graph_[from].size()) - 1, 0,
                          -cost});
  }

  const Instance& inst_;
  const Coalition& coal_;
  int source_ = 0;
  int sink_ = 0;
  std::vector<std::vector<Arc>> graph_;
};

}  // namespace

Coalition Coalition::full(const Instance& inst) {
  Coalition coal;
  coal.u_nodes.resize(inst.num_u());
  std::iota(coal.u_nodes.begin(), coal.u_nodes.end(), 0);
  coal.v_nodes.resize(inst.num_v());
  std::iota(coal.v_nodes.begin(), coal.v_nodes.end(), 0);
  return coal;
}

Money brute_force_value(const Instance& inst, const Coalition& coal) {
  check_coalition(inst, coal);
  const auto edges = induced_edges(inst, coal);
  if (edges.size() > 20) {
    throw TooLarge("brute force limited to 20 edges, got " +
                   std::to_string(edges.size()));
  }

  std::vector<int> cap_u;
  for (int u : coal.u_nodes) cap_u.push_back(inst.b_value(NodeRef{Side::U, u}));
  std::vector<int> cap_v;
  for (int v : coal.v_nodes) cap_v.push_back(inst.b_value(NodeRef{Side::V, v}));

  Money best = 0;
  const std::uint32_t limit = 1u << edges.size();
  std::vector<int> deg_u(cap_u.size());
  std::vector<int> deg_v(cap_v.size());
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    std::fill(deg_u.begin(), deg_u.end(), 0);
    std::fill(deg_v.begin(), deg_v.end(), 0);
    Money value = 0;
    bool valid = true;
    for (std::size_t i = 0; i < edges.size() && valid; ++i) {
      if (!(mask & (1u << i))) continue;
      const auto& e = edges[i];
      if (++deg_u[e.u] > cap_u[e.u] || ++deg_v[e.v] > cap_v[e.v]) {
        valid = false;
      } else {
        value += e.w;
      }
    }
    if (valid) best = std::max(best, value);
  }
  return best;
}

OracleResult max_b_matching_value(const Instance& inst,
                                  const Coalition& coal) {
  check_coalition(inst, coal);
  OracleResult result;
  if (!coal.u_nodes.empty() && !coal.v_nodes.empty()) {
    result = FlowSolver(inst, coal).solve();
  }
  if (induced_edges(inst, coal).size() <= 12) {
    const Money reference = brute_force_value(inst, coal);
    if (reference != result.value) {
      throw std::logic_error(
          "matching optimizer disagrees with exhaustive reference: " +
          std::to_string(result.value) + " vs " + std::to_string(reference));
    }
  }
  return result;
}

NodesCoreResult check_nodes_core(const NodesSolution& sol,
                                 const Instance& inst, int max_nodes) {
  const int nu = inst.num_u();
  const int nv = inst.num_v();
  if (nu + nv > max_nodes) {
    throw TooLarge("coalition enumeration limited to " +
                   std::to_string(max_nodes) + " nodes, instance has " +
                   std::to_string(nu + nv));
  }
  if (static_cast<int>(sol.x_u.size()) != nu ||
      static_cast<int>(sol.x_v.size()) != nv) {
    throw std::logic_error("allocation shape does not match instance");
  }

  NodesCoreResult result;
  result.allocation_total = sol.total();
  result.optimum = max_b_matching_value(inst, Coalition::full(inst)).value;

  for (std::uint32_t um = 0; um < (1u << nu); ++um) {
    for (std::uint32_t vm = 0; vm < (1u << nv); ++vm) {
      if (um == 0 && vm == 0) continue;
      Coalition coal;
      Money allocated = 0;
      for (int u = 0; u < nu; ++u) {
        if (um & (1u << u)) {
          coal.u_nodes.push_back(u);
          allocated += sol.x_u[u];
        }
      }
      for (int v = 0; v < nv; ++v) {
        if (vm & (1u << v)) {
          coal.v_nodes.push_back(v);
          allocated += sol.x_v[v];
        }
      }
      const Money worth = max_b_matching_value(inst, coal).value;
      if (allocated < worth) {
        result.detail = "coalition can improve: allocated " +
                        std::to_string(allocated) + ", worth " +
                        std::to_string(worth);
        result.violating_coalition = std::move(coal);
        return result;
      }
    }
  }

  if (result.allocation_total != result.optimum) {
    result.detail = "allocation total " +
                    std::to_string(result.allocation_total) +
                    " differs from optimum " + std::to_string(result.optimum);
    return result;
  }

  result.ok = true;
  return result;
}

}  // namespace bcore
