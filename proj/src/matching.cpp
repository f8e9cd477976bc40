#include "matchlab/matching.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "matchlab/error.hpp"

namespace matchlab {

void Matching::sort() {
  std::sort(pairs_.begin(), pairs_.end(), [](const MatchedPair& a, const MatchedPair& b) {
    return a.offline != b.offline ? a.offline < b.offline : a.online < b.online;
  });
}

bool Matching::is_valid() const {
  std::vector<OfflineId> offline;
  std::vector<int> online;
  offline.reserve(pairs_.size());
  online.reserve(pairs_.size());
  for (const auto& p : pairs_) {
    offline.push_back(p.offline);
    online.push_back(p.online);
  }
  std::sort(offline.begin(), offline.end());
  std::sort(online.begin(), online.end());
  if (std::adjacent_find(offline.begin(), offline.end()) != offline.end()) return false;
  if (std::adjacent_find(online.begin(), online.end()) != online.end()) return false;
  return matching_weight(*this) == total_weight_;
}

std::vector<int> Matching::partner_of_offline(int n_offline) const {
  std::vector<int> partner(static_cast<std::size_t>(n_offline), -1);
  for (const auto& p : pairs_) partner.at(static_cast<std::size_t>(p.offline)) = p.online;
  return partner;
}

std::vector<OfflineId> Matching::partner_of_online(int n_online) const {
  std::vector<OfflineId> partner(static_cast<std::size_t>(n_online), -1);
  for (const auto& p : pairs_) partner.at(static_cast<std::size_t>(p.online)) = p.offline;
  return partner;
}

Weight matching_weight(const Matching& m) {
  Weight total = 0;
  for (const auto& p : m.pairs()) total += p.weight;
  return total;
}

namespace {

// Hopcroft-Karp with types on the left and offline nodes on the right.
class HopcroftKarp {
 public:
  explicit HopcroftKarp(const TypeGraph& graph)
      : graph_(graph),
        left_(static_cast<std::size_t>(graph.num_types()), -1),
        right_(static_cast<std::size_t>(graph.n_offline()), -1),
        dist_(static_cast<std::size_t>(graph.num_types()), 0),
        cursor_(static_cast<std::size_t>(graph.num_types()), 0) {}

  void run() {
    while (bfs()) {
      std::fill(cursor_.begin(), cursor_.end(), 0);
      for (TypeId t = 0; t < graph_.num_types(); ++t) {
        if (left_[static_cast<std::size_t>(t)] < 0) dfs(t);
      }
    }
  }

  Matching result() const {
    Matching m;
    for (TypeId t = 0; t < graph_.num_types(); ++t) {
      const OfflineId u = left_[static_cast<std::size_t>(t)];
      if (u >= 0) m.add({u, t, *graph_.weight(u, t)});
    }
    m.sort();
    return m;
  }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max();

  bool bfs() {
    std::queue<TypeId> queue;
    for (TypeId t = 0; t < graph_.num_types(); ++t) {
      if (left_[static_cast<std::size_t>(t)] < 0) {
        dist_[static_cast<std::size_t>(t)] = 0;
        queue.push(t);
      } else {
        dist_[static_cast<std::size_t>(t)] = kInf;
      }
    }
    bool found = false;
    while (!queue.empty()) {
      const TypeId t = queue.front();
      queue.pop();
      for (const auto& nb : graph_.neighbors(t)) {
        const int next = right_[static_cast<std::size_t>(nb.offline)];
        if (next < 0) {
          found = true;
        } else if (dist_[static_cast<std::size_t>(next)] == kInf) {
          dist_[static_cast<std::size_t>(next)] = dist_[static_cast<std::size_t>(t)] + 1;
          queue.push(next);
        }
      }
    }
    return found;
  }

  bool dfs(TypeId t) {
    const auto nbs = graph_.neighbors(t);
    auto& pos = cursor_[static_cast<std::size_t>(t)];
    for (; pos < nbs.size(); ++pos) {
      const OfflineId u = nbs[pos].offline;
      const int next = right_[static_cast<std::size_t>(u)];
      if (next < 0 || (dist_[static_cast<std::size_t>(next)] == dist_[static_cast<std::size_t>(t)] + 1 &&
                       dfs(next))) {
        left_[static_cast<std::size_t>(t)] = u;
        right_[static_cast<std::size_t>(u)] = t;
        ++pos;
        return true;
      }
    }
    dist_[static_cast<std::size_t>(t)] = kInf;
    return false;
  }

  const TypeGraph& graph_;
  std::vector<OfflineId> left_;
  std::vector<TypeId> right_;
  std::vector<int> dist_;
  std::vector<std::size_t> cursor_;
};

// Dense min-cost assignment of every row to a distinct column, rows <= cols.
// Shortest augmenting paths with row/column potentials. Returns the column of
// each row.
std::vector<int> solve_assignment(const std::vector<Weight>& cost, int rows, int cols) {
  constexpr Weight kInf = std::numeric_limits<Weight>::max() / 4;
  std::vector<Weight> u(static_cast<std::size_t>(rows) + 1, 0), v(static_cast<std::size_t>(cols) + 1, 0);
  std::vector<int> owner(static_cast<std::size_t>(cols) + 1, 0), way(static_cast<std::size_t>(cols) + 1, 0);
  std::vector<Weight> min_slack(static_cast<std::size_t>(cols) + 1);
  std::vector<char> used(static_cast<std::size_t>(cols) + 1);

  for (int i = 1; i <= rows; ++i) {
    owner[0] = i;
    int j0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = owner[static_cast<std::size_t>(j0)];
      Weight delta = kInf;
      int j1 = 0;
      const Weight* row = &cost[static_cast<std::size_t>(i0 - 1) * static_cast<std::size_t>(cols)];
      for (int j = 1; j <= cols; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const Weight cur = row[j - 1] - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < min_slack[static_cast<std::size_t>(j)]) {
          min_slack[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (min_slack[static_cast<std::size_t>(j)] < delta) {
          delta = min_slack[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          min_slack[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (owner[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      owner[static_cast<std::size_t>(j0)] = owner[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> column_of(static_cast<std::size_t>(rows), -1);
  for (int j = 1; j <= cols; ++j) {
    const int i = owner[static_cast<std::size_t>(j)];
    if (i > 0) column_of[static_cast<std::size_t>(i - 1)] = j - 1;
  }
  return column_of;
}

bool all_unit_weights(const TypeGraph& graph) {
  for (TypeId t = 0; t < graph.num_types(); ++t) {
    for (const auto& nb : graph.neighbors(t)) {
      if (nb.weight != 1) return false;
    }
  }
  return true;
}

}  // namespace

Matching max_cardinality_matching(const TypeGraph& graph) {
  HopcroftKarp hk(graph);
  hk.run();
  return hk.result();
}

Matching max_weight_matching(const TypeGraph& graph) {
  const int n_off = graph.n_offline();
  const int n_types = graph.num_types();
  Matching m;
  if (n_off == 0 || n_types == 0 || graph.edge_count() == 0) return m;

  // Rows are the smaller side; cost = -weight, 0 for non-edges.
  const bool offline_rows = n_off <= n_types;
  const int rows = offline_rows ? n_off : n_types;
  const int cols = offline_rows ? n_types : n_off;
  std::vector<Weight> cost(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
  for (TypeId t = 0; t < n_types; ++t) {
    for (const auto& nb : graph.neighbors(t)) {
      const int r = offline_rows ? nb.offline : t;
      const int c = offline_rows ? t : nb.offline;
      cost[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)] = -nb.weight;
    }
  }

  const std::vector<int> column_of = solve_assignment(cost, rows, cols);
  for (int r = 0; r < rows; ++r) {
    const int c = column_of[static_cast<std::size_t>(r)];
    if (c < 0) continue;
    const Weight w = -cost[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
    if (w <= 0) continue;
    const OfflineId u = offline_rows ? r : c;
    const TypeId t = offline_rows ? c : r;
    m.add({u, t, w});
  }
  m.sort();
  return m;
}

std::optional<std::pair<TypeId, Weight>> ResidualGraph::displaced(OfflineId offline) const {
  const auto idx = static_cast<std::size_t>(offline);
  if (base_type.at(idx) < 0) return std::nullopt;
  return std::make_pair(base_type[idx], base_weight[idx]);
}

ResidualGraph build_residual(const TypeGraph& graph, const Matching& m1) {
  ResidualGraph h;
  h.base_type.assign(static_cast<std::size_t>(graph.n_offline()), -1);
  h.base_weight.assign(static_cast<std::size_t>(graph.n_offline()), 0);
  std::vector<OfflineId> m1_partner_of_type(static_cast<std::size_t>(graph.num_types()), -1);

  for (const auto& pair : m1.pairs()) {
    if (pair.offline < 0 || pair.offline >= graph.n_offline() || pair.online < 0 ||
        pair.online >= graph.num_types()) {
      throw ValidationError("M1 pair out of range");
    }
    const auto w = graph.weight(pair.offline, pair.online);
    if (!w || *w != pair.weight) {
      throw ValidationError("M1 pair (" + std::to_string(pair.offline) + "," +
                            std::to_string(pair.online) + ") is not an edge of the graph");
    }
    auto& type_slot = h.base_type[static_cast<std::size_t>(pair.offline)];
    auto& off_slot = m1_partner_of_type[static_cast<std::size_t>(pair.online)];
    if (type_slot >= 0 || off_slot >= 0) throw ValidationError("M1 is not a matching");
    type_slot = pair.online;
    off_slot = pair.offline;
    h.base_weight[static_cast<std::size_t>(pair.offline)] = pair.weight;
  }

  h.graph = TypeGraph(graph.n_offline(), graph.num_types(), true);
  for (TypeId t = 0; t < graph.num_types(); ++t) {
    for (const auto& nb : graph.neighbors(t)) {
      const auto u = static_cast<std::size_t>(nb.offline);
      if (h.base_type[u] == t) continue;  // M1 edge
      const Weight adjusted = nb.weight - h.base_weight[u];
      if (adjusted <= 0) continue;        // dominated by, or tied with, the M1 edge at u
      h.graph.add_edge(t, nb.offline, adjusted);
    }
  }
  return h;
}

TypeGraph realization_graph(const TypeGraph& graph, const ArrivalSequence& arrivals) {
  TypeGraph out(graph.n_offline(), static_cast<int>(arrivals.size()), graph.weighted());
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    for (const auto& nb : graph.neighbors(arrivals.arrivals[i])) {
      out.add_edge(static_cast<TypeId>(i), nb.offline, nb.weight);
    }
  }
  return out;
}

Weight offline_optimum(const TypeGraph& graph, const ArrivalSequence& arrivals) {
  // One online node per useful copy: min(count, degree) copies of each type.
  int copies_total = 0;
  for (TypeId t = 0; t < graph.num_types(); ++t) {
    copies_total += std::min(arrivals.counts.at(static_cast<std::size_t>(t)), graph.degree(t));
  }
  TypeGraph reduced(graph.n_offline(), copies_total, graph.weighted());
  int next = 0;
  for (TypeId t = 0; t < graph.num_types(); ++t) {
    const int copies = std::min(arrivals.counts[static_cast<std::size_t>(t)], graph.degree(t));
    for (int k = 0; k < copies; ++k, ++next) {
      for (const auto& nb : graph.neighbors(t)) reduced.add_edge(next, nb.offline, nb.weight);
    }
  }
  if (all_unit_weights(reduced)) return static_cast<Weight>(max_cardinality_matching(reduced).size());
  return max_weight_matching(reduced).total_weight();
}

}  // namespace matchlab
