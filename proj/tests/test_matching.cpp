#include <doctest.h>

#include <vector>

#include "matchlab/error.hpp"
#include "matchlab/matching.hpp"
#include "matchlab/oracles.hpp"
#include "matchlab/rng.hpp"

using namespace matchlab;

namespace {

TypeGraph random_small_graph(Rng& rng, int max_side, Weight max_weight) {
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_side)));
  const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_side)));
  const double p = rng.uniform01();
  TypeGraph g(n, m, max_weight > 1);
  for (TypeId t = 0; t < m; ++t) {
    for (OfflineId u = 0; u < n; ++u) {
      if (rng.bernoulli(p)) g.add_edge(t, u, 1 + static_cast<Weight>(rng.below(static_cast<std::uint64_t>(max_weight))));
    }
  }
  return g;
}

void require_matching_on(const TypeGraph& g, const Matching& m) {
  REQUIRE(m.is_valid());
  REQUIRE(m.total_weight() == matching_weight(m));
  for (const auto& pair : m.pairs()) {
    const auto w = g.weight(pair.offline, pair.online);
    REQUIRE(w.has_value());
    REQUIRE(*w == pair.weight);
  }
}

}  // namespace

TEST_CASE("matchers agree with brute force on random small graphs") {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const Weight max_weight = i % 3 == 0 ? 1 : (i % 3 == 1 ? 5 : 1000);
    const auto g = random_small_graph(rng, 8, max_weight);
    CAPTURE(i);
    const auto card = max_cardinality_matching(g);
    require_matching_on(g, card);
    CHECK(static_cast<int>(card.size()) == oracle::max_cardinality_bruteforce(g));
    const auto weight = max_weight_matching(g);
    require_matching_on(g, weight);
    CHECK(weight.total_weight() == oracle::max_weight_bruteforce(g));
  }
}

TEST_CASE("hand-checked instances") {
  // Greedy on the heavy edge loses: (0,a)=3, (0,b)=2, (1,a)=2 gives 4 via 0-b, 1-a.
  TypeGraph g(2, 2, true);
  g.add_edge(0, 0, 3);
  g.add_edge(0, 1, 2);
  g.add_edge(1, 0, 2);
  CHECK(max_weight_matching(g).total_weight() == 4);
  CHECK(max_cardinality_matching(g).size() == 2);

  // Maximum weight need not be maximum cardinality.
  TypeGraph h(2, 2, true);
  h.add_edge(0, 0, 10);
  h.add_edge(0, 1, 1);
  h.add_edge(1, 0, 1);
  CHECK(max_weight_matching(h).total_weight() == 10);
  CHECK(max_weight_matching(h).size() == 1);
  CHECK(max_cardinality_matching(h).size() == 2);
  TypeGraph k(2, 2, true);
  k.add_edge(0, 0, 10);
  k.add_edge(0, 1, 1);
  k.add_edge(1, 0, 100);
  CHECK(max_weight_matching(k).total_weight() == 101);
}

TEST_CASE("empty and degenerate graphs") {
  CHECK(max_weight_matching(TypeGraph(0, 0)).empty());
  CHECK(max_cardinality_matching(TypeGraph(3, 0)).empty());
  CHECK(max_weight_matching(TypeGraph(0, 4)).empty());
  CHECK(max_cardinality_matching(TypeGraph(5, 5)).empty());
  TypeGraph wide(1, 6);
  for (TypeId t = 0; t < 6; ++t) wide.add_edge(t, 0);
  CHECK(max_cardinality_matching(wide).size() == 1);
  CHECK(max_weight_matching(wide).size() == 1);
}

TEST_CASE("Hopcroft-Karp on a larger random graph matches the weight matcher with unit weights") {
  Rng rng(5);
  TypeGraph g(300, 300);
  for (TypeId t = 0; t < 300; ++t) {
    for (OfflineId u = 0; u < 300; ++u) {
      if (rng.bernoulli(3.0 / 300)) g.add_edge(t, u);
    }
  }
  const auto a = max_cardinality_matching(g);
  const auto b = max_weight_matching(g);
  CHECK(a.is_valid());
  CHECK(static_cast<Weight>(a.size()) == b.total_weight());
}

TEST_CASE("residual graph keeps only improving non-M1 edges at reduced weight") {
  Rng rng(77);
  for (int i = 0; i < 300; ++i) {
    const auto g = random_small_graph(rng, 8, 20);
    const auto m1 = max_weight_matching(g);
    const auto h = build_residual(g, m1);
    REQUIRE(h.graph.n_offline() == g.n_offline());
    REQUIRE(h.graph.num_types() == g.num_types());
    for (TypeId t = 0; t < g.num_types(); ++t) {
      for (const auto& nb : g.neighbors(t)) {
        const auto u = static_cast<std::size_t>(nb.offline);
        const auto hw = h.graph.weight(nb.offline, t);
        if (h.base_type[u] == t) {
          CHECK_FALSE(hw.has_value());
        } else if (nb.weight > h.base_weight[u]) {
          REQUIRE(hw.has_value());
          CHECK(*hw == nb.weight - h.base_weight[u]);
        } else {
          CHECK_FALSE(hw.has_value());
        }
      }
    }
    CHECK(h.graph.edge_count() <= g.edge_count());
    for (const auto& pair : m1.pairs()) {
      const auto d = h.displaced(pair.offline);
      REQUIRE(d.has_value());
      CHECK(d->first == pair.online);
      CHECK(d->second == pair.weight);
    }
  }
}

TEST_CASE("residual rejects a non-matching") {
  TypeGraph g(2, 2, true);
  g.add_edge(0, 0, 3);
  g.add_edge(1, 0, 2);
  Matching bad;
  bad.add({0, 0, 3});
  bad.add({0, 1, 2});
  CHECK_THROWS_AS(build_residual(g, bad), ValidationError);
  Matching wrong_weight;
  wrong_weight.add({0, 0, 4});
  CHECK_THROWS_AS(build_residual(g, wrong_weight), ValidationError);
  Matching absent;
  absent.add({1, 1, 1});
  CHECK_THROWS_AS(build_residual(g, absent), ValidationError);
}

TEST_CASE("realization graph replicates types per arrival") {
  TypeGraph g(3, 2, true);
  g.add_edge(0, 0, 2);
  g.add_edge(0, 2, 5);
  g.add_edge(1, 1, 7);
  const auto arrivals = ArrivalSequence::from_list({1, 0, 0}, 2);
  const auto r = realization_graph(g, arrivals);
  CHECK(r.num_types() == 3);
  CHECK(r.n_offline() == 3);
  CHECK(std::vector<Neighbor>(r.neighbors(0).begin(), r.neighbors(0).end()) ==
        std::vector<Neighbor>(g.neighbors(1).begin(), g.neighbors(1).end()));
  CHECK(r.edge_count() == 5);
  CHECK(offline_optimum(g, arrivals) == 14);
}

TEST_CASE("offline optimum equals brute force on the realization graph") {
  Rng rng(31337);
  for (int i = 0; i < 500; ++i) {
    const auto g = random_small_graph(rng, 6, i % 2 ? 1 : 9);
    std::vector<TypeId> arr;
    const auto len = rng.below(9);
    for (std::uint64_t j = 0; j < len; ++j) {
      arr.push_back(static_cast<TypeId>(rng.below(static_cast<std::uint64_t>(g.num_types()))));
    }
    const auto seq = ArrivalSequence::from_list(arr, g.num_types());
    CHECK(offline_optimum(g, seq) == oracle::max_weight_bruteforce(realization_graph(g, seq)));
  }
}
