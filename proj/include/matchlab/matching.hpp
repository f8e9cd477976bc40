#pragma once

#include <optional>
#include <vector>

#include "matchlab/graph.hpp"

namespace matchlab {

/// One matched edge. `online` is a type id for matchings on a type graph and
/// an arrival index for matchings produced by online policies.
struct MatchedPair {
  OfflineId offline = 0;
  int online = 0;
  Weight weight = 0;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

/// A set of vertex-disjoint edges with a cached total weight.
class Matching {
 public:
  Matching() = default;

  /// Adds a pair. Does not check disjointness; see `is_valid`.
  void add(MatchedPair pair) {
    pairs_.push_back(pair);
    total_weight_ += pair.weight;
  }

  const std::vector<MatchedPair>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  Weight total_weight() const noexcept { return total_weight_; }

  /// Sorts pairs by (offline, online) for stable output.
  void sort();

  /// No offline id or online id repeats and the cached total matches the pairs.
  bool is_valid() const;

  /// Partner of each offline node (-1 when unmatched), indexed [0, n_offline).
  std::vector<int> partner_of_offline(int n_offline) const;
  /// Partner of each online id (-1 when unmatched), indexed [0, n_online).
  std::vector<OfflineId> partner_of_online(int n_online) const;

  friend bool operator==(const Matching&, const Matching&) = default;

 private:
  std::vector<MatchedPair> pairs_;
  Weight total_weight_ = 0;
};

/// Sum of pair weights, recomputed from the pairs (0 for empty).
Weight matching_weight(const Matching& m);

/// Maximum-cardinality matching (Hopcroft-Karp). Pairs carry graph weights.
/// Deterministic: neighbors are scanned in increasing offline order.
Matching max_cardinality_matching(const TypeGraph& graph);

/// Maximum-weight matching, not necessarily of maximum cardinality.
///
/// Successive shortest augmenting paths with potentials on the dense
/// assignment matrix, where non-edges have weight 0; zero-weight
/// assignments are dropped from the result. Exact for integer weights.
/// O(k^2 * l) for k = min(n_offline, num_types), l = max(...).
Matching max_weight_matching(const TypeGraph& graph);

/// Type graph with weights adjusted against a base matching M1.
///
/// An edge (u, v) survives iff it is not in M1 and either u is unmatched in
/// M1 or w(u, v) > w(M1 edge at u); surviving edges at M1-matched u carry
/// w(u, v) - w(M1 edge at u). Every stored weight is >= 1.
struct ResidualGraph {
  TypeGraph graph;
  std::vector<TypeId> base_type;   // M1 partner type of each offline node, or -1
  std::vector<Weight> base_weight; // M1 weight at each offline node, or 0

  /// The M1 edge an edge at `offline` would displace, as (type, weight).
  std::optional<std::pair<TypeId, Weight>> displaced(OfflineId offline) const;
};

/// Builds the residual graph H. Throws ValidationError if m1 is not a
/// matching on `graph` (pair absent, wrong weight, or repeated endpoint).
/// `m1` pairs must use type ids as the online side.
ResidualGraph build_residual(const TypeGraph& graph, const Matching& m1);

/// Realization graph of an arrival sequence: one online node per arrival,
/// carrying its type's neighbor list. Online id = arrival index.
TypeGraph realization_graph(const TypeGraph& graph, const ArrivalSequence& arrivals);

/// Weight (or size, on unweighted graphs) of a maximum matching of the
/// realization graph. Copies of a type beyond its degree can never all be
/// matched, so they are dropped before solving.
Weight offline_optimum(const TypeGraph& graph, const ArrivalSequence& arrivals);

}  // namespace matchlab
