#pragma once

#include <functional>
#include <vector>

#include "matchlab/graph.hpp"
#include "matchlab/matching.hpp"

namespace matchlab {

/// Counters for one round, i.e. a maximal run of consecutive arrivals of
/// the same type. In the RTPAM models a round is exactly one type block.
struct RoundRecord {
  int round = 0;
  TypeId type = 0;
  int z = 0;           // copies of the type in this round
  int x = 0;           // free neighbors of the type at round start
  int matched = 0;     // growth of the matching size during the round
  int cumulative = 0;  // matching size after the round

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct SimulationTrace {
  std::vector<RoundRecord> rounds;

  friend bool operator==(const SimulationTrace&, const SimulationTrace&) = default;
};

/// Mutable bookkeeping of a single policy run: which arrival holds each
/// offline node, at what weight, and how many copies of each type arrived.
class PolicyState {
 public:
  explicit PolicyState(const TypeGraph& graph);

  bool is_free(OfflineId u) const { return holder_[static_cast<std::size_t>(u)] < 0; }
  /// Arrival index holding u, or -1.
  int holder(OfflineId u) const { return holder_[static_cast<std::size_t>(u)]; }
  /// Weight of the edge currently at u (0 when free).
  Weight held_weight(OfflineId u) const { return held_weight_[static_cast<std::size_t>(u)]; }
  int arrivals_of(TypeId t) const { return arrival_count_[static_cast<std::size_t>(t)]; }

  int matched_count() const noexcept { return matched_count_; }
  Weight total_weight() const noexcept { return total_weight_; }

  /// Places (u, arrival) at `weight`, displacing whatever u held.
  void assign(OfflineId u, int arrival, Weight weight);
  void record_arrival(TypeId t) { ++arrival_count_[static_cast<std::size_t>(t)]; }

  /// No arrival holds two offline nodes and the cached totals are consistent.
  bool induces_matching() const;

  Matching to_matching() const;

 private:
  std::vector<int> holder_;
  std::vector<Weight> held_weight_;
  std::vector<int> arrival_count_;
  int matched_count_ = 0;
  Weight total_weight_ = 0;
};

/// Called after every arrival with the state and the arrival index.
using ArrivalObserver = std::function<void(const PolicyState&, std::size_t)>;

struct PolicyResult {
  Matching matching;  // online side = arrival index
  SimulationTrace trace;
};

enum class GreedyRule {
  kFirstAvailable,  // lowest-indexed free neighbor
  kMaxWeight,       // heaviest free neighbor, ties to the lowest index
};

/// Greedy without displacement: an arrival is left unmatched only if it has
/// no free neighbor.
PolicyResult run_greedy(const TypeGraph& graph, const ArrivalSequence& arrivals, GreedyRule rule,
                        const ArrivalObserver& observer = {});

/// Greedy with free disposal: match to the neighbor of largest marginal gain
/// w(u,v) - held(u), ties to the lowest index, only if the gain is positive.
PolicyResult run_greedy_fd(const TypeGraph& graph, const ArrivalSequence& arrivals,
                           const ArrivalObserver& observer = {});

/// 1-Suggested Matching: an arrival of type v takes its M1 partner u if u is
/// still free. `m1` uses type ids on the online side.
PolicyResult run_one_sm(const TypeGraph& graph, const Matching& m1, const ArrivalSequence& arrivals,
                        const ArrivalObserver& observer = {});
/// As above with M1 = max_weight_matching(graph).
PolicyResult run_one_sm(const TypeGraph& graph, const ArrivalSequence& arrivals,
                        const ArrivalObserver& observer = {});

/// Precomputed matchings for SFD: M1 on the type graph, M2 on the residual graph.
struct SfdPlan {
  Matching m1;
  ResidualGraph residual;
  Matching m2;

  static SfdPlan build(const TypeGraph& graph);
};

/// Where the weight of an SFD run came from.
///
/// Two exact identities hold for every run:
///   total = m1_placed + m2_net_gain
///   total = m1_placed + m2_residual + m2_on_free_base
/// The second mirrors the expectation q1 w(M1) + q2 w(M2): each M2 edge adds
/// its residual weight, except that an M2 edge taken before its offline
/// node's M1 partner ever arrived also brings the M1 weight with it.
struct SfdAccounting {
  Weight m1_placed = 0;        // M1 edges that entered, including later displaced ones
  Weight m1_kept = 0;          // M1 edges in the final matching
  Weight m2_residual = 0;      // residual (H) weights of M2 edges used
  Weight m2_net_gain = 0;      // weight added by M2 edges net of what they displaced
  Weight m2_on_free_base = 0;  // M1 weight at M1-matched nodes that were free when their M2 edge came
  int m2_used = 0;
  int m2_displacements = 0;
  int m1_blocked = 0;          // first arrivals whose M1 partner was held by an M2 edge
};

struct SfdResult {
  Matching matching;
  SimulationTrace trace;
  SfdAccounting accounting;
};

/// Stochastic free disposal: first arrival of v uses M1 if its partner is
/// free; second arrival uses M2, displacing the partner's M1 edge if present;
/// later arrivals are ignored.
SfdResult run_sfd(const TypeGraph& graph, const SfdPlan& plan, const ArrivalSequence& arrivals,
                  const ArrivalObserver& observer = {});
SfdResult run_sfd(const TypeGraph& graph, const ArrivalSequence& arrivals,
                  const ArrivalObserver& observer = {});

}  // namespace matchlab
