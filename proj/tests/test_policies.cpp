#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "matchlab/experiment.hpp"
#include "matchlab/matching.hpp"
#include "matchlab/policies.hpp"
#include "matchlab/random_models.hpp"

using namespace matchlab;

namespace {

ArrivalSequence seq(std::vector<TypeId> arrivals, int num_types) {
  return ArrivalSequence::from_list(std::move(arrivals), num_types);
}

// offline u0, u1; type 0: u0:4; type 1: u0:6, u1:3.
// M1 = {u0-t0 (4), u1-t1 (3)}, residual H = {u0-t1 (2)}, M2 = {u0-t1}.
TypeGraph sfd_example() {
  TypeGraph g(2, 2, true);
  g.add_edge(0, 0, 4);
  g.add_edge(1, 0, 6);
  g.add_edge(1, 1, 3);
  return g;
}

void require_policy_matching(const TypeGraph& g, const ArrivalSequence& a, const Matching& m) {
  REQUIRE(m.is_valid());
  for (const auto& p : m.pairs()) {
    REQUIRE(p.online >= 0);
    REQUIRE(static_cast<std::size_t>(p.online) < a.size());
    const auto w = g.weight(p.offline, a.arrivals[static_cast<std::size_t>(p.online)]);
    REQUIRE(w.has_value());
    REQUIRE(*w == p.weight);
  }
}

// Every sequence in [0, n)^n, in lexicographic order.
template <class Fn>
void for_each_sequence(int n, Fn&& fn) {
  std::vector<TypeId> a(static_cast<std::size_t>(n), 0);
  while (true) {
    fn(a);
    int i = n - 1;
    while (i >= 0 && a[static_cast<std::size_t>(i)] == n - 1) a[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return;
    ++a[static_cast<std::size_t>(i)];
  }
}

}  // namespace

TEST_CASE("greedy takes the lowest-indexed free neighbor") {
  TypeGraph g(3, 2);
  g.add_edge(0, 1);
  g.add_edge(0, 2);
  g.add_edge(1, 1);
  const auto r = run_greedy(g, seq({0, 1}, 2), GreedyRule::kFirstAvailable);
  REQUIRE(r.matching.size() == 1);
  CHECK(r.matching.pairs()[0] == MatchedPair{1, 0, 1});
  REQUIRE(r.trace.rounds.size() == 2);
  CHECK(r.trace.rounds[0] == RoundRecord{0, 0, 1, 2, 1, 1});
  CHECK(r.trace.rounds[1] == RoundRecord{1, 1, 1, 0, 0, 1});
}

TEST_CASE("weighted greedy breaks ties by index and never displaces") {
  TypeGraph g(3, 2, true);
  g.add_edge(0, 0, 5);
  g.add_edge(0, 1, 5);
  g.add_edge(0, 2, 3);
  g.add_edge(1, 0, 9);
  const auto r = run_greedy(g, seq({0, 1, 0}, 2), GreedyRule::kMaxWeight);
  CHECK(r.matching.total_weight() == 10);
  CHECK(r.matching.pairs()[0] == MatchedPair{0, 0, 5});
  CHECK(r.matching.pairs()[1] == MatchedPair{1, 2, 5});
}

TEST_CASE("free disposal displaces when the marginal gain is positive") {
  TypeGraph g(2, 2, true);
  g.add_edge(0, 0, 3);
  g.add_edge(1, 0, 5);
  g.add_edge(1, 1, 1);
  const auto a = seq({0, 1}, 2);
  const auto fd = run_greedy_fd(g, a);
  CHECK(fd.matching.total_weight() == 5);
  CHECK(fd.matching.size() == 1);
  CHECK(fd.matching.pairs()[0] == MatchedPair{0, 1, 5});
  CHECK(run_greedy(g, a, GreedyRule::kMaxWeight).matching.total_weight() == 4);

  // Zero gain is not taken.
  TypeGraph h(1, 2, true);
  h.add_edge(0, 0, 4);
  h.add_edge(1, 0, 4);
  const auto tie = run_greedy_fd(h, seq({0, 1}, 2));
  CHECK(tie.matching.pairs()[0] == MatchedPair{0, 0, 4});
}

TEST_CASE("1-suggested matching follows M1 only") {
  const auto g = sfd_example();
  const auto r = run_one_sm(g, seq({1, 1, 0}, 2));
  CHECK(r.matching.total_weight() == 7);
  CHECK(r.matching.size() == 2);
  const auto lone = run_one_sm(g, seq({1, 1}, 2));
  CHECK(lone.matching.total_weight() == 3);
}

TEST_CASE("SFD plan of the worked example") {
  const auto plan = SfdPlan::build(sfd_example());
  CHECK(plan.m1.total_weight() == 7);
  CHECK(plan.residual.graph.edge_count() == 1);
  CHECK(plan.residual.graph.weight(0, 1) == 2);
  CHECK(plan.m2.total_weight() == 2);
}

TEST_CASE("SFD second arrival displaces the M1 edge") {
  const auto r = run_sfd(sfd_example(), seq({0, 1, 1}, 2));
  CHECK(r.matching.total_weight() == 9);
  CHECK(r.accounting.m1_placed == 7);
  CHECK(r.accounting.m1_kept == 3);
  CHECK(r.accounting.m2_residual == 2);
  CHECK(r.accounting.m2_net_gain == 2);
  CHECK(r.accounting.m2_on_free_base == 0);
  CHECK(r.accounting.m2_displacements == 1);
  CHECK(r.accounting.m1_blocked == 0);
}

TEST_CASE("SFD second arrival before the M1 partner blocks it") {
  const auto r = run_sfd(sfd_example(), seq({1, 1, 0}, 2));
  CHECK(r.matching.total_weight() == 9);
  CHECK(r.accounting.m1_placed == 3);
  CHECK(r.accounting.m2_net_gain == 6);
  CHECK(r.accounting.m2_residual == 2);
  CHECK(r.accounting.m2_on_free_base == 4);
  CHECK(r.accounting.m1_blocked == 1);
  CHECK(r.accounting.m2_displacements == 0);
}

TEST_CASE("SFD ignores third arrivals and types without an M2 edge") {
  const auto g = sfd_example();
  CHECK(run_sfd(g, seq({1, 1, 1}, 2)).matching.total_weight() == 9);
  const auto r = run_sfd(g, seq({0, 0, 0}, 2));
  CHECK(r.matching.total_weight() == 4);
  CHECK(r.accounting.m2_used == 0);
}

TEST_CASE("policies are valid, bounded by OPT and consistent with their traces") {
  for (int trial = 0; trial < 200; ++trial) {
    const auto key = derive_stream(404, static_cast<std::uint64_t>(trial));
    const int n = 3 + trial % 20;
    const auto g = gen_type_graph(ModelParams::with_p(n, 0.3, trial % 2 ? 10 : 1), key);
    const auto a = trial % 3 ? sample_known_iid(g, n, sub_stream(key, StreamTag::kArrivals))
                             : sample_rtpam_threestep(g, sub_stream(key, StreamTag::kArrivals));
    const Weight opt = offline_optimum(g, a);

    Weight last = 0;
    bool monotone = true;
    bool matching_throughout = true;
    auto watch = [&](const PolicyState& s, std::size_t) {
      matching_throughout = matching_throughout && s.induces_matching();
      monotone = monotone && s.total_weight() >= last;
      last = s.total_weight();
    };

    const auto greedy = run_greedy(g, a, GreedyRule::kMaxWeight, watch);
    CHECK(matching_throughout);
    require_policy_matching(g, a, greedy.matching);
    CHECK(greedy.matching.total_weight() <= opt);
    int z_sum = 0;
    for (const auto& r : greedy.trace.rounds) {
      z_sum += r.z;
      CHECK(r.matched == std::min(r.z, r.x));
    }
    CHECK(z_sum == static_cast<int>(a.size()));
    if (!greedy.trace.rounds.empty()) {
      CHECK(greedy.trace.rounds.back().cumulative == static_cast<int>(greedy.matching.size()));
    }

    last = 0;
    const auto fd = run_greedy_fd(g, a, watch);
    CHECK(monotone);
    CHECK(matching_throughout);
    require_policy_matching(g, a, fd.matching);
    CHECK(fd.matching.total_weight() <= opt);

    const auto one = run_one_sm(g, a);
    require_policy_matching(g, a, one.matching);
    CHECK(one.matching.total_weight() <= opt);

    last = 0;
    const auto sfd = run_sfd(g, a, watch);
    CHECK(monotone);
    CHECK(matching_throughout);
    require_policy_matching(g, a, sfd.matching);
    CHECK(sfd.matching.total_weight() <= opt);
    const auto& acc = sfd.accounting;
    CHECK(sfd.matching.total_weight() == acc.m1_placed + acc.m2_net_gain);
    CHECK(sfd.matching.total_weight() == acc.m1_placed + acc.m2_residual + acc.m2_on_free_base);
  }
}

TEST_CASE("one-step RTPAM rounds are type blocks") {
  const auto [g, a] = sample_rtpam(ModelParams::with_c(300, 1.5), 12, RtpamView::kOneStep);
  const auto r = run_greedy(g, a, GreedyRule::kFirstAvailable);
  int blocks = 0;
  for (int c : a.counts) blocks += c > 0;
  CHECK(static_cast<int>(r.trace.rounds.size()) == blocks);
  for (std::size_t i = 1; i < r.trace.rounds.size(); ++i) CHECK(r.trace.rounds[i - 1].type < r.trace.rounds[i].type);
}

TEST_CASE("finite-n arrival probabilities match enumeration") {
  for (int n : {2, 3, 4, 5}) {
    std::int64_t total = 0, once = 0, twice = 0, absent_other = 0;
    for_each_sequence(n, [&](const std::vector<TypeId>& a) {
      std::vector<int> c(static_cast<std::size_t>(n), 0);
      for (TypeId t : a) ++c[static_cast<std::size_t>(t)];
      ++total;
      once += c[0] >= 1;
      twice += c[0] >= 2;
      absent_other += c[0] == 0 && c[1] >= 2;
    });
    const auto p = arrival_probabilities(n);
    const auto d = static_cast<double>(total);
    CHECK(p.at_least_once == doctest::Approx(once / d).epsilon(1e-12));
    CHECK(p.at_least_twice == doctest::Approx(twice / d).epsilon(1e-12));
    CHECK(p.absent_and_other_twice == doctest::Approx(absent_other / d).epsilon(1e-12));
  }
}

TEST_CASE("exact SFD expectation equals the average over all arrival sequences") {
  bool lemma_differs = false;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 3;
    const auto g = gen_gnnpR(ModelParams::with_p(n, 0.6, 20), derive_stream(55, static_cast<std::uint64_t>(trial)));
    const auto plan = SfdPlan::build(g);
    double sum = 0.0;
    std::int64_t count = 0;
    for_each_sequence(n, [&](const std::vector<TypeId>& a) {
      sum += static_cast<double>(run_sfd(g, plan, ArrivalSequence::from_list(a, n)).matching.total_weight());
      ++count;
    });
    const double enumerated = sum / static_cast<double>(count);
    const auto e = sfd_expectation(g);
    CAPTURE(trial);
    CHECK(e.m1_weight == plan.m1.total_weight());
    CHECK(e.m2_weight == plan.m2.total_weight());
    CHECK(e.exact == doctest::Approx(enumerated).epsilon(1e-12));
    if (std::abs(e.lemma - enumerated) > 1e-9) {
      lemma_differs = true;
      CHECK(e.stacked_base > 0);
    }
  }
  CHECK(lemma_differs);
}
