#include "matchlab/policies.hpp"

#include <algorithm>

#include "matchlab/error.hpp"

namespace matchlab {

PolicyState::PolicyState(const TypeGraph& graph)
    : holder_(static_cast<std::size_t>(graph.n_offline()), -1),
      held_weight_(static_cast<std::size_t>(graph.n_offline()), 0),
      arrival_count_(static_cast<std::size_t>(graph.num_types()), 0) {}

void PolicyState::assign(OfflineId u, int arrival, Weight weight) {
  const auto idx = static_cast<std::size_t>(u);
  if (holder_[idx] < 0) ++matched_count_;
  total_weight_ += weight - held_weight_[idx];
  holder_[idx] = arrival;
  held_weight_[idx] = weight;
}

bool PolicyState::induces_matching() const {
  std::vector<int> held;
  int count = 0;
  Weight total = 0;
  for (std::size_t u = 0; u < holder_.size(); ++u) {
    if (holder_[u] < 0) {
      if (held_weight_[u] != 0) return false;
      continue;
    }
    held.push_back(holder_[u]);
    ++count;
    total += held_weight_[u];
  }
  std::sort(held.begin(), held.end());
  return std::adjacent_find(held.begin(), held.end()) == held.end() && count == matched_count_ &&
         total == total_weight_;
}

Matching PolicyState::to_matching() const {
  Matching m;
  for (std::size_t u = 0; u < holder_.size(); ++u) {
    if (holder_[u] >= 0) m.add({static_cast<OfflineId>(u), holder_[u], held_weight_[u]});
  }
  m.sort();
  return m;
}

namespace {

// Drives a decision rule over the arrivals and records the round trace.
// `decide(state, type, arrival_index)` updates the state for one arrival.
template <class Decide>
SimulationTrace drive(const TypeGraph& graph, const ArrivalSequence& arrivals, PolicyState& state,
                      Decide&& decide, const ArrivalObserver& observer) {
  SimulationTrace trace;
  const auto& seq = arrivals.arrivals;
  std::size_t i = 0;
  while (i < seq.size()) {
    const TypeId type = seq[i];
    if (type < 0 || type >= graph.num_types()) throw ValidationError("arrival references unknown type");
    RoundRecord rec;
    rec.round = static_cast<int>(trace.rounds.size());
    rec.type = type;
    for (const auto& nb : graph.neighbors(type)) rec.x += state.is_free(nb.offline) ? 1 : 0;
    const int before = state.matched_count();
    for (; i < seq.size() && seq[i] == type; ++i) {
      state.record_arrival(type);
      decide(state, type, static_cast<int>(i));
      if (observer) observer(state, i);
      ++rec.z;
    }
    rec.cumulative = state.matched_count();
    rec.matched = rec.cumulative - before;
    trace.rounds.push_back(rec);
  }
  return trace;
}

std::vector<OfflineId> partner_by_type(const Matching& m, int num_types) {
  std::vector<OfflineId> partner(static_cast<std::size_t>(num_types), -1);
  for (const auto& p : m.pairs()) partner.at(static_cast<std::size_t>(p.online)) = p.offline;
  return partner;
}

}  // namespace

PolicyResult run_greedy(const TypeGraph& graph, const ArrivalSequence& arrivals, GreedyRule rule,
                        const ArrivalObserver& observer) {
  PolicyState state(graph);
  auto decide = [&](PolicyState& s, TypeId t, int arrival) {
    const Neighbor* best = nullptr;
    for (const auto& nb : graph.neighbors(t)) {
      if (!s.is_free(nb.offline)) continue;
      if (rule == GreedyRule::kFirstAvailable) {
        best = &nb;
        break;
      }
      if (best == nullptr || nb.weight > best->weight) best = &nb;
    }
    if (best != nullptr) s.assign(best->offline, arrival, best->weight);
  };
  SimulationTrace trace = drive(graph, arrivals, state, decide, observer);
  return {state.to_matching(), std::move(trace)};
}

PolicyResult run_greedy_fd(const TypeGraph& graph, const ArrivalSequence& arrivals,
                           const ArrivalObserver& observer) {
  PolicyState state(graph);
  auto decide = [&](PolicyState& s, TypeId t, int arrival) {
    const Neighbor* best = nullptr;
    Weight best_gain = 0;
    for (const auto& nb : graph.neighbors(t)) {
      const Weight gain = nb.weight - s.held_weight(nb.offline);
      if (gain > best_gain) {
        best_gain = gain;
        best = &nb;
      }
    }
    if (best != nullptr) s.assign(best->offline, arrival, best->weight);
  };
  SimulationTrace trace = drive(graph, arrivals, state, decide, observer);
  return {state.to_matching(), std::move(trace)};
}

PolicyResult run_one_sm(const TypeGraph& graph, const Matching& m1, const ArrivalSequence& arrivals,
                        const ArrivalObserver& observer) {
  const auto partner = partner_by_type(m1, graph.num_types());
  PolicyState state(graph);
  auto decide = [&](PolicyState& s, TypeId t, int arrival) {
    const OfflineId u = partner[static_cast<std::size_t>(t)];
    if (u >= 0 && s.is_free(u)) s.assign(u, arrival, *graph.weight(u, t));
  };
  SimulationTrace trace = drive(graph, arrivals, state, decide, observer);
  return {state.to_matching(), std::move(trace)};
}

PolicyResult run_one_sm(const TypeGraph& graph, const ArrivalSequence& arrivals,
                        const ArrivalObserver& observer) {
  return run_one_sm(graph, max_weight_matching(graph), arrivals, observer);
}

SfdPlan SfdPlan::build(const TypeGraph& graph) {
  SfdPlan plan;
  plan.m1 = max_weight_matching(graph);
  plan.residual = build_residual(graph, plan.m1);
  plan.m2 = max_weight_matching(plan.residual.graph);
  return plan;
}

SfdResult run_sfd(const TypeGraph& graph, const SfdPlan& plan, const ArrivalSequence& arrivals,
                  const ArrivalObserver& observer) {
  const auto m1_partner = partner_by_type(plan.m1, graph.num_types());
  const auto m2_partner = partner_by_type(plan.m2, graph.num_types());
  const auto& base_type = plan.residual.base_type;

  // Tag of what each offline node currently holds.
  enum class Held : char { kNone, kFirst, kSecond };
  std::vector<Held> held(static_cast<std::size_t>(graph.n_offline()), Held::kNone);

  SfdAccounting acc;
  PolicyState state(graph);
  auto decide = [&](PolicyState& s, TypeId t, int arrival) {
    const int copy = s.arrivals_of(t);
    if (copy == 1) {
      const OfflineId u = m1_partner[static_cast<std::size_t>(t)];
      if (u < 0) return;
      if (!s.is_free(u)) {
        ++acc.m1_blocked;
        return;
      }
      const Weight w = *graph.weight(u, t);
      s.assign(u, arrival, w);
      held[static_cast<std::size_t>(u)] = Held::kFirst;
      acc.m1_placed += w;
    } else if (copy == 2) {
      const OfflineId u = m2_partner[static_cast<std::size_t>(t)];
      if (u < 0) return;
      const auto ui = static_cast<std::size_t>(u);
      const Weight w = *graph.weight(u, t);
      const Weight residual = *plan.residual.graph.weight(u, t);
      if (held[ui] == Held::kFirst) ++acc.m2_displacements;
      else if (base_type[ui] >= 0) acc.m2_on_free_base += plan.residual.base_weight[ui];
      acc.m2_net_gain += w - s.held_weight(u);
      acc.m2_residual += residual;
      ++acc.m2_used;
      s.assign(u, arrival, w);
      held[ui] = Held::kSecond;
    }
  };
  SimulationTrace trace = drive(graph, arrivals, state, decide, observer);
  for (std::size_t u = 0; u < held.size(); ++u) {
    if (held[u] == Held::kFirst) acc.m1_kept += state.held_weight(static_cast<OfflineId>(u));
  }
  return {state.to_matching(), std::move(trace), acc};
}

SfdResult run_sfd(const TypeGraph& graph, const ArrivalSequence& arrivals, const ArrivalObserver& observer) {
  return run_sfd(graph, SfdPlan::build(graph), arrivals, observer);
}

}  // namespace matchlab
