#include "matchlab/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "matchlab/error.hpp"

namespace matchlab::oracle {
namespace {

// best[mask] = best value using types processed so far with offline set `mask` taken.
template <class Value>
Value subset_dp(const TypeGraph& graph, Value (*edge_value)(Weight)) {
  if (graph.n_offline() > 20) throw ValidationError("brute-force oracle limited to 20 offline nodes");
  const std::size_t states = std::size_t{1} << graph.n_offline();
  constexpr Value kUnreached = -1;
  std::vector<Value> best(states, kUnreached);
  best[0] = 0;
  for (TypeId t = 0; t < graph.num_types(); ++t) {
    std::vector<Value> next = best;  // type t left unmatched
    for (std::size_t mask = 0; mask < states; ++mask) {
      if (best[mask] == kUnreached) continue;
      for (const auto& nb : graph.neighbors(t)) {
        const std::size_t bit = std::size_t{1} << nb.offline;
        if (mask & bit) continue;
        next[mask | bit] = std::max(next[mask | bit], best[mask] + edge_value(nb.weight));
      }
    }
    best = std::move(next);
  }
  return *std::max_element(best.begin(), best.end());
}

}  // namespace

Weight max_weight_bruteforce(const TypeGraph& graph) {
  return subset_dp<Weight>(graph, [](Weight w) { return w; });
}

int max_cardinality_bruteforce(const TypeGraph& graph) {
  return subset_dp<int>(graph, [](Weight) { return 1; });
}

double min_ber_sum_enumerate(std::span<const double> p, int k) {
  if (p.size() > 24) throw ValidationError("enumeration oracle limited to 24 variables");
  const std::uint32_t outcomes = std::uint32_t{1} << p.size();
  double total = 0.0;
  for (std::uint32_t bits = 0; bits < outcomes; ++bits) {
    double prob = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) prob *= (bits >> i & 1U) ? p[i] : 1.0 - p[i];
    total += prob * std::min(std::popcount(bits), k);
  }
  return total;
}

}  // namespace matchlab::oracle
