// Acceptance gate: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion 6   run one
//
// Exit status is 0 iff every selected criterion passed.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "matchlab/analytics.hpp"
#include "matchlab/experiment.hpp"
#include "matchlab/format.hpp"
#include "matchlab/matching.hpp"
#include "matchlab/oracles.hpp"
#include "matchlab/policies.hpp"
#include "matchlab/random_models.hpp"
#include "stats_support.hpp"

using namespace matchlab;

namespace {

// Fixed before any criterion was run; never changed to make a check pass.
constexpr std::uint64_t kSeed = 20261016;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Outcome within_budget(Outcome o, double seconds, double budget) {
  o.detail += " [" + fmt(seconds) + " s, budget " + fmt(budget) + " s]";
  if (seconds > budget) {
    o.pass = false;
    o.detail += " over budget";
  }
  return o;
}

ExperimentConfig greedy_config(ModelKind model, const ModelParams& params, std::int64_t trials, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.model = model;
  cfg.params = params;
  cfg.algorithm = Algorithm::kGreedy;
  cfg.trials = trials;
  cfg.seed = Seed{seed};
  cfg.threads = 0;
  return cfg;
}

Outcome criterion_1() {
  double worst = 0.0, worst_x = 0.0;
  for (int i = 1; i <= 30; ++i) {
    const double x = 10.0 * i / 30.0;
    const double d = std::abs(h_closed(x) - h_oracle(x));
    if (d > worst) {
      worst = d;
      worst_x = x;
    }
  }
  return {worst < 1e-9, "max |h_closed - h_oracle| = " + fmt(worst) + " at x = " + fmt(worst_x) + " (tol 1e-9)"};
}

Outcome criterion_2() {
  const auto r = minimize_ratio(0.05, 10.0);
  const bool ok = std::abs(r.c_star - 0.667766) <= 1e-3 && std::abs(r.ratio_star - 0.715071) <= 1e-3;
  return {ok, "c* = " + fmt(r.c_star) + " (0.667766 +- 1e-3), ratio* = " + fmt(r.ratio_star) +
                  " (0.715071 +- 1e-3)"};
}

Outcome criterion_3() {
  const auto r = minimize_ratio_gnnp(0.05, 10.0);
  const bool ok = r.ratio_star >= 0.837 - 1e-3 && !r.at_boundary;
  return {ok, "min ratio = " + fmt(r.ratio_star) + " at c = " + fmt(r.c_star) + " (>= 0.836)"};
}

Outcome fraction_vs_simulation(ModelKind model, const std::function<double(double)>& analytic, std::uint64_t tag) {
  constexpr int kN = 2000;
  constexpr std::int64_t kTrials = 500;
  Outcome o{true, ""};
  const double cs[] = {0.5, 1.0, 2.0};
  for (std::size_t i = 0; i < 3; ++i) {
    const double c = cs[i];
    const auto stats = run_experiment(greedy_config(model, ModelParams::with_c(kN, c), kTrials,
                                                    derive_stream(derive_stream(kSeed, tag), i)));
    const double emp = stats.mean_alg / kN;
    const double ana = analytic(c);
    const double diff = emp - ana;
    o.pass = o.pass && std::abs(diff) <= 0.01;
    o.detail += "c=" + fmt(c) + ": analytic " + fmt(ana) + " empirical " + fmt(emp) + " (diff " + fmt(diff) +
                ", se " + fmt(stats.alg_std_err / kN) + "); ";
  }
  o.detail += "tol 0.01";
  return o;
}

Outcome criterion_4() {
  return fraction_vs_simulation(ModelKind::kRtpam, [](double c) { return greedy_fraction_rtpam(c); }, 4);
}

Outcome criterion_5() {
  return fraction_vs_simulation(ModelKind::kGnnpOnline, [](double c) { return greedy_fraction_gnnp(c); }, 5);
}

Outcome criterion_6() {
  constexpr int kN = 500;
  constexpr int kTrials = 2000;
  Outcome o{true, ""};
  double worst = 0.0, worst_exact = 0.0;
  for (std::uint64_t gi = 0; gi < 5; ++gi) {
    const auto key = derive_stream(derive_stream(kSeed, 6), gi);
    const auto graph = gen_gnnpR(ModelParams::with_p(kN, 0.1, 100), sub_stream(key, StreamTag::kTypeGraph));
    const auto plan = SfdPlan::build(graph);
    double sum = 0.0;
    for (int t = 0; t < kTrials; ++t) {
      const auto arrivals =
          sample_known_iid(graph, kN, sub_stream(derive_stream(key, static_cast<std::uint64_t>(t)), StreamTag::kArrivals));
      sum += static_cast<double>(run_sfd(graph, plan, arrivals).matching.total_weight());
    }
    const double emp = sum / kTrials;
    const auto e = sfd_expectation(graph);
    const double rel = (emp - e.lemma) / e.lemma;
    const double rel_exact = (emp - e.exact) / e.exact;
    worst = std::max(worst, std::abs(rel));
    worst_exact = std::max(worst_exact, std::abs(rel_exact));
    o.pass = o.pass && std::abs(rel) <= 0.02;
  }
  o.detail = "max |empirical - (q1 w(M1) + q2 w(M2))| / formula = " + fmt(worst) +
             " (tol 0.02); informational: vs exact expectation with the stacked-base term " + fmt(worst_exact);
  return o;
}

Outcome criterion_7() {
  Outcome o{true, ""};
  for (auto kind : {TableKind::kGreedy, TableKind::kGreedyFd, TableKind::kSfd}) {
    const auto report = reproduce_table(kind, kSeed, 1000, 0);
    const auto out = report.outliers(0.03);
    o.pass = o.pass && out.empty();
    o.detail += std::string(to_string(kind)) + " " + std::to_string(report.compared() - static_cast<int>(out.size())) +
                "/" + std::to_string(report.compared()) + " within 0.03";
    double worst = 0.0;
    for (const auto* c : out) worst = std::max(worst, std::abs(c->diff));
    if (!out.empty()) o.detail += " (worst |diff| " + fmt(worst) + ")";
    o.detail += "; ";
    for (const auto* c : out) {
      std::printf("  outlier %s p=1/%d n=%d R=%lld: measured %.4f reference %.3f diff %+.4f se %.4f\n",
                  std::string(to_string(kind)).c_str(), c->spec.p_denominator, c->spec.n,
                  static_cast<long long>(c->spec.range), c->stats.mean_ratio, c->spec.reference, c->diff,
                  c->stats.std_err);
    }
  }
  o.detail += "typo cell excluded";
  return o;
}

Outcome criterion_8() {
  Outcome o{true, ""};
  for (double c : {0.05, 50.0}) {
    const auto stats = run_experiment(greedy_config(ModelKind::kRtpam, ModelParams::with_c(2000, c), 200,
                                                    derive_stream(derive_stream(kSeed, 8), c < 1 ? 0 : 1)));
    o.pass = o.pass && stats.mean_ratio > 0.95;
    o.detail += "c=" + fmt(c) + ": ratio " + fmt(stats.mean_ratio) + " (se " + fmt(stats.std_err) + "); ";
  }
  o.detail += "threshold 0.95";
  return o;
}

Outcome criterion_9() {
  constexpr int kN = 100;
  constexpr int kTrials = 10'000;
  constexpr int kBins = 7;  // 0..5 and >= 6
  std::vector<std::int64_t> three(kBins, 0), poisson(kBins, 0);
  const auto params = ModelParams::with_c(kN, 1.0);
  const Seed a{derive_stream(kSeed, 90)}, b{derive_stream(kSeed, 91)};
  for (int t = 0; t < kTrials; ++t) {
    const auto x = draw_trial(ModelKind::kRtpamThreeStep, params, a.trial_key(static_cast<std::uint64_t>(t)));
    const auto y = draw_trial(ModelKind::kPoissonArrivals, params, b.trial_key(static_cast<std::uint64_t>(t)));
    for (int c : x.arrivals.counts) ++three[static_cast<std::size_t>(std::min(c, kBins - 1))];
    for (int c : y.arrivals.counts) ++poisson[static_cast<std::size_t>(std::min(c, kBins - 1))];
  }
  std::vector<double> pmf(kBins);
  double mass = 0.0;
  for (int k = 0; k < kBins - 1; ++k) {
    pmf[static_cast<std::size_t>(k)] = std::exp(-1.0 - std::lgamma(k + 1.0));
    mass += pmf[static_cast<std::size_t>(k)];
  }
  pmf.back() = 1.0 - mass;
  const double p_hom = testing::homogeneity_p_value(three, poisson);
  const double p_three = testing::chi_square_p_value(three, pmf);
  const double p_poisson = testing::chi_square_p_value(poisson, pmf);
  const bool ok = p_hom >= 1e-3 && p_three >= 1e-3 && p_poisson >= 1e-3;
  return {ok, "homogeneity p = " + fmt(p_hom) + "; fit to 1/(e k!): three-step p = " + fmt(p_three) +
                  ", Poisson arrivals p = " + fmt(p_poisson) + " (alpha 1e-3)"};
}

Outcome criterion_10() {
  Rng rng(derive_stream(kSeed, 10));
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng.below(12));
    std::vector<double> p(static_cast<std::size_t>(n));
    for (auto& x : p) x = rng.uniform01();
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(n) + 1));
    worst = std::max(worst, std::abs(min_ber_sum_expectation({p, k}) - oracle::min_ber_sum_enumerate(p, k)));
  }
  // With probabilities in multiples of 1/4 every product and partial sum is a
  // dyadic rational representable in a double, so both routes are exact.
  int dyadic_mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng.below(12));
    std::vector<double> p(static_cast<std::size_t>(n));
    for (auto& x : p) x = static_cast<double>(rng.below(5)) / 4.0;
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(n) + 1));
    dyadic_mismatches += min_ber_sum_expectation({p, k}) != oracle::min_ber_sum_enumerate(p, k);
  }
  Outcome o{worst <= 1e-12 && dyadic_mismatches == 0,
            "DP vs enumeration: max diff " + fmt(worst) + " over 1000 real-valued queries (tol 1e-12), " +
                std::to_string(dyadic_mismatches) + " inexact of 1000 dyadic queries; "};
  struct Query {
    int n;
    double tau;
    int k;
  };
  std::uint64_t idx = 0;
  for (const auto q : {Query{3, 1.0, 1}, Query{4, 2.0, 2}, Query{5, 2.5, 3}}) {
    const auto r = check_equal_split_minimizes(q.n, q.tau, q.k, 100'000, derive_stream(kSeed, 100 + idx++));
    o.pass = o.pass && r.passed() && r.min_margin >= -1e-12;
    o.detail += "(" + std::to_string(q.n) + "," + fmt(q.tau) + "," + std::to_string(q.k) + "): margin " +
                fmt(r.min_margin) + ", counterexamples " + std::to_string(r.counterexamples) + "; ";
  }
  return o;
}

Outcome criterion_11() {
  Rng rng(derive_stream(kSeed, 11));
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const int m = 1 + static_cast<int>(rng.below(8));
    const double p = rng.uniform01();
    const Weight max_w = i % 2 ? 1 : 1 + static_cast<Weight>(rng.below(1000));
    TypeGraph g(n, m, max_w > 1);
    for (TypeId t = 0; t < m; ++t) {
      for (OfflineId u = 0; u < n; ++u) {
        if (rng.bernoulli(p)) g.add_edge(t, u, 1 + static_cast<Weight>(rng.below(static_cast<std::uint64_t>(max_w))));
      }
    }
    const auto card = max_cardinality_matching(g);
    const auto weight = max_weight_matching(g);
    const bool ok = card.is_valid() && weight.is_valid() &&
                    static_cast<int>(card.size()) == oracle::max_cardinality_bruteforce(g) &&
                    weight.total_weight() == oracle::max_weight_bruteforce(g);
    mismatches += !ok;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in 1000 instances up to 8x8"};
}

Outcome criterion_12() {
  constexpr int kN = 500;
  const double p = (std::log(static_cast<double>(kN)) + 1.0) / kN;
  const auto e = estimate_perfect_matching(kN, p, 2000, derive_stream(kSeed, 12), 0);
  const double target = std::exp(-2.0 / std::numbers::e);
  const bool ok = std::abs(e.pm_freq - target) <= 0.03 && std::abs(e.mindeg_freq - target) <= 0.03;
  return {ok, "PM freq " + fmt(e.pm_freq) + ", min-degree freq " + fmt(e.mindeg_freq) + " vs " + fmt(target) +
                  " +- 0.03 (se " + fmt(e.pm_se) + ")"};
}

struct Criterion {
  const char* name;
  Outcome (*run)();
  double budget_seconds;
};

const Criterion kCriteria[] = {
    {"h closed form vs oracle", criterion_1, 1},
    {"RTPAM ratio minimizer", criterion_2, 60},
    {"G(n,n,c/n) ratio lower bound", criterion_3, 60},
    {"Greedy ODE vs RTPAM simulation", criterion_4, 600},
    {"Greedy closed form vs G(n,n,c/n) simulation", criterion_5, 600},
    {"SFD two-matching expectation", criterion_6, 600},
    {"reference table reproduction (soft)", criterion_7, 3600},
    {"little-c and large-c regimes", criterion_8, 600},
    {"three-step RTPAM vs Poisson arrivals", criterion_9, 600},
    {"equal split minimizes capped Bernoulli sum", criterion_10, 600},
    {"offline matchers vs brute force", criterion_11, 600},
    {"perfect matching threshold", criterion_12, 600},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-12)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (int i = 1; i <= 12; ++i) {
    if (only != 0 && i != only) continue;
    const auto& c = kCriteria[i - 1];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o = within_budget(std::move(o), secs, c.budget_seconds);
    std::printf("criterion %2d %s: %s | %s\n", i, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
