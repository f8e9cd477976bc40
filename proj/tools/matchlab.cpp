// matchlab command-line interface. See `matchlab --help`.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "matchlab/analytics.hpp"
#include "matchlab/error.hpp"
#include "matchlab/experiment.hpp"
#include "matchlab/format.hpp"
#include "matchlab/io.hpp"
#include "matchlab/matching.hpp"
#include "matchlab/oracles.hpp"
#include "matchlab/policies.hpp"
#include "matchlab/random_models.hpp"

namespace ml = matchlab;
using nlohmann::json;

namespace {

// Reads option values from a JSON object; nested objects address subcommands,
// e.g. {"seed": 7, "simulate": {"n": 100, "alg": "greedy"}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) j[name] = opt->results().size() == 1 ? json(opt->results().front()) : json(opt->results());
      else if (default_also && !opt->get_default_str().empty()) j[name] = opt->get_default_str();
    }
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      j = json::parse(input);
    } catch (const json::parse_error& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const json& obj, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        flatten(value, sub, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      out.push_back(std::move(item));
    }
  }
};

struct Globals {
  std::uint64_t seed = 1;
  std::optional<std::int64_t> trials;
  std::string out;
  std::string format = "csv";
  int threads = 1;

  std::int64_t trials_or(std::int64_t fallback) const { return trials.value_or(fallback); }
  bool json() const { return format == "json"; }
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream os(g.out, std::ios::binary);
  if (!os) throw ml::ValidationError("cannot open output file '" + g.out + "'");
  os << text;
}

std::string fmt(double v) { return ml::format_double(v); }

// Shared model selection for simulate / generate.
struct ModelArgs {
  std::string model = "known_iid";
  int n = 0;
  std::optional<double> p;
  std::optional<double> c;
  std::optional<ml::Weight> range;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--model", model, "known_iid | rtpam | rtpam3 | poisson | gnnp_online")->capture_default_str();
    cmd->add_option("--n", n, "offline nodes = number of types")->required();
    auto* po = cmd->add_option("--p", p, "edge probability");
    auto* co = cmd->add_option("--c", c, "expected degree; p = c/n");
    po->excludes(co);
    cmd->add_option("--R", range, "weight range: integer weights uniform on [1, R]");
  }

  ml::ModelParams params() const {
    if (p.has_value() == c.has_value()) throw ml::ValidationError("give exactly one of --p and --c");
    return p ? ml::ModelParams::with_p(n, *p, range) : ml::ModelParams::with_c(n, *c, range);
  }
};

json stats_json(const ml::ExperimentStats& s) {
  const auto& c = s.config;
  json j;
  j["model"] = std::string(ml::to_string(c.model));
  j["n"] = c.params.n();
  j["density"] = c.params.describe();
  if (c.params.weight_range()) j["R"] = *c.params.weight_range();
  else j["R"] = nullptr;
  j["algorithm"] = std::string(ml::to_string(c.algorithm));
  j["trials"] = s.trials;
  j["seed"] = c.seed.master;
  j["ratio_mode"] = std::string(ml::to_string(c.ratio_mode));
  j["zero_opt"] = std::string(ml::to_string(c.zero_opt));
  j["mean_alg"] = s.mean_alg;
  j["mean_opt"] = s.mean_opt;
  j["mean_ratio"] = s.mean_ratio;
  j["std_err"] = s.std_err;
  j["mean_of_ratios"] = s.mean_of_ratios;
  j["ratio_of_means"] = s.ratio_of_means;
  j["zero_opt_trials"] = s.zero_opt_trials;
  return j;
}

// ---- check suites -----------------------------------------------------------

struct CheckLine {
  std::string name;
  bool pass = true;
  std::string detail;
};

std::vector<CheckLine> run_checks(std::uint64_t seed, std::int64_t trials) {
  std::vector<CheckLine> lines;
  ml::Rng rng(seed);

  {
    CheckLine line{"matchers_vs_bruteforce"};
    std::int64_t bad = 0;
    for (std::int64_t i = 0; i < trials; ++i) {
      const int n = 1 + static_cast<int>(rng.below(8));
      const double p = rng.uniform01();
      const auto range = static_cast<ml::Weight>(1 + rng.below(20));
      const auto g = ml::gen_gnnpR(ml::ModelParams::with_p(n, p, range), rng());
      if (ml::max_weight_matching(g).total_weight() != ml::oracle::max_weight_bruteforce(g)) ++bad;
      if (static_cast<int>(ml::max_cardinality_matching(g).size()) != ml::oracle::max_cardinality_bruteforce(g)) ++bad;
    }
    line.pass = bad == 0;
    line.detail = std::to_string(trials) + " instances, " + std::to_string(bad) + " mismatches";
    lines.push_back(line);
  }
  {
    CheckLine line{"policies_valid_and_bounded"};
    std::int64_t bad = 0;
    for (std::int64_t i = 0; i < trials; ++i) {
      const int n = 1 + static_cast<int>(rng.below(30));
      const auto params = ml::ModelParams::with_p(n, rng.uniform01(), static_cast<ml::Weight>(1 + rng.below(50)));
      const auto inst = ml::draw_trial(ml::ModelKind::kKnownIid, params, rng());
      const ml::Weight opt = ml::offline_optimum(inst.graph, inst.arrivals);
      auto observe = [&](const ml::PolicyState& s, std::size_t) { bad += s.induces_matching() ? 0 : 1; };
      const ml::Matching results[] = {
          ml::run_greedy(inst.graph, inst.arrivals, ml::GreedyRule::kMaxWeight, observe).matching,
          ml::run_greedy_fd(inst.graph, inst.arrivals, observe).matching,
          ml::run_one_sm(inst.graph, inst.arrivals, observe).matching,
          ml::run_sfd(inst.graph, inst.arrivals, observe).matching,
      };
      for (const auto& m : results) bad += (m.is_valid() && m.total_weight() <= opt) ? 0 : 1;
    }
    line.pass = bad == 0;
    line.detail = std::to_string(trials) + " instances x 4 policies, " + std::to_string(bad) + " violations";
    lines.push_back(line);
  }
  {
    CheckLine line{"sfd_accounting"};
    std::int64_t bad = 0;
    for (std::int64_t i = 0; i < trials; ++i) {
      const int n = 1 + static_cast<int>(rng.below(30));
      const auto params = ml::ModelParams::with_p(n, rng.uniform01(), static_cast<ml::Weight>(1 + rng.below(50)));
      const auto inst = ml::draw_trial(ml::ModelKind::kKnownIid, params, rng());
      const auto r = ml::run_sfd(inst.graph, inst.arrivals);
      const auto& a = r.accounting;
      const ml::Weight total = r.matching.total_weight();
      if (total != a.m1_placed + a.m2_net_gain || total != a.m1_placed + a.m2_residual + a.m2_on_free_base) ++bad;
    }
    line.pass = bad == 0;
    line.detail = std::to_string(trials) + " runs, " + std::to_string(bad) + " identity failures";
    lines.push_back(line);
  }
  {
    CheckLine line{"h_closed_vs_oracle"};
    double worst = 0.0;
    for (int i = 1; i <= 30; ++i) {
      const double x = 10.0 * i / 30.0;
      worst = std::max(worst, std::abs(ml::h_closed(x) - ml::h_oracle(x)));
    }
    line.pass = worst < 1e-9;
    line.detail = "max |diff| = " + fmt(worst) + " on 30 points in (0, 10]";
    lines.push_back(line);
  }
  {
    CheckLine line{"poisson_binomial_vs_enumeration"};
    double worst = 0.0;
    for (std::int64_t i = 0; i < trials; ++i) {
      ml::BerMinQuery q;
      q.p.resize(static_cast<std::size_t>(rng.below(13)));
      for (auto& x : q.p) x = rng.uniform01();
      q.k = static_cast<int>(rng.below(14));
      worst = std::max(worst, std::abs(ml::min_ber_sum_expectation(q) - ml::oracle::min_ber_sum_enumerate(q.p, q.k)));
    }
    line.pass = worst < 1e-12;
    line.detail = std::to_string(trials) + " queries, max |diff| = " + fmt(worst);
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matchlab: online bipartite matching under random type-graph models"};
  app.fallthrough();
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "read option values from a JSON file");

  Globals g;
  if (const char* env = std::getenv("MATCHLAB_SEED")) {
    try {
      g.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: MATCHLAB_SEED must be an unsigned integer\n";
      return 1;
    }
  }
  app.add_option("--seed", g.seed, "master seed (default: $MATCHLAB_SEED or 1)");
  app.add_option("--trials", g.trials, "number of Monte Carlo trials")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output file (default: stdout)");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber)->capture_default_str();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of one algorithm on one model");
  ModelArgs sim_model;
  sim_model.add_to(simulate);
  std::string sim_alg = "greedy";
  std::string sim_ratio = "mean_of_ratios";
  std::string sim_zero = "zero";
  bool sim_large = false;
  simulate->add_option("--alg", sim_alg, "greedy | greedy_fd | one_sm | sfd")->capture_default_str();
  simulate->add_option("--ratio-mode", sim_ratio, "mean_of_ratios | ratio_of_means")->capture_default_str();
  simulate->add_option("--zero-opt", sim_zero, "ratio of a trial with OPT = 0: zero | one | skip")->capture_default_str();
  simulate->add_flag("--allow-large", sim_large, "permit n > 2000");

  // tables
  auto* tables = app.add_subcommand("tables", "reproduce the 60-cell reference tables (1000 trials per cell)");
  std::string table_which = "all";
  double table_tol = 0.03;
  std::string table_zero = "zero";
  tables->add_option("which", table_which, "sfd | greedy | greedy_fd | all")->capture_default_str();
  tables->add_option("--tolerance", table_tol, "reported agreement tolerance")->capture_default_str();
  tables->add_option("--zero-opt", table_zero, "ratio of a trial with OPT = 0: zero | one | skip")->capture_default_str();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "empirical vs analytic Greedy fraction on RTPAM(n, c)");
  std::vector<double> sweep_c{0.5, 1.0, 2.0};
  int sweep_n = 2000;
  sweep->add_option("--c", sweep_c, "c values (comma separated)")->delimiter(',')->capture_default_str();
  sweep->add_option("--n", sweep_n, "graph size")->capture_default_str();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "closed-form and numerical curves");
  analyze->require_subcommand(1);
  ml::NumericConfig ncfg;
  analyze->add_option("--series-tol", ncfg.series_tol)->capture_default_str();
  analyze->add_option("--series-max-terms", ncfg.series_max_terms)->capture_default_str();
  analyze->add_option("--ode-step", ncfg.ode_step)->capture_default_str();
  analyze->add_option("--fixedpoint-tol", ncfg.fixedpoint_tol)->capture_default_str();
  analyze->add_option("--fixedpoint-max-iters", ncfg.fixedpoint_max_iters)->capture_default_str();

  auto* h_grid = analyze->add_subcommand("h-grid", "h(x) = E[min(Poi(x), Poi(1))], closed form and oracle");
  double hx_lo = 0.0, hx_hi = 10.0;
  int h_points = 30;
  h_grid->add_option("--x-lo", hx_lo, "grid starts after this value")->capture_default_str();
  h_grid->add_option("--x-hi", hx_hi)->capture_default_str();
  h_grid->add_option("--points", h_points)->check(CLI::PositiveNumber)->capture_default_str();

  auto* minimize = analyze->add_subcommand("minimize-ratio", "minimum of the Greedy ratio lower bound over c");
  double min_lo = 0.05, min_hi = 10.0, min_tol = 1e-6;
  int min_grid = 400;
  std::string min_curve = "rtpam";
  minimize->add_option("--c-lo", min_lo)->capture_default_str();
  minimize->add_option("--c-hi", min_hi)->capture_default_str();
  minimize->add_option("--grid", min_grid)->capture_default_str();
  minimize->add_option("--tol", min_tol)->capture_default_str();
  minimize->add_option("--curve", min_curve, "rtpam | gnnp")->check(CLI::IsMember({"rtpam", "gnnp"}))->capture_default_str();

  auto* bb = analyze->add_subcommand("bb-bound", "maximum-matching upper bound for G_{n,n,c/n}");
  double bb_c = 1.0;
  bb->add_option("--c", bb_c)->required();

  auto* curve = analyze->add_subcommand("curve", "c,mu_rtpam,mu_gnnp,opt_upper,ratio_lower on a log grid");
  double curve_lo = 0.05, curve_hi = 10.0;
  int curve_points = 100;
  curve->add_option("--c-lo", curve_lo)->capture_default_str();
  curve->add_option("--c-hi", curve_hi)->capture_default_str();
  curve->add_option("--points", curve_points)->check(CLI::PositiveNumber)->capture_default_str();

  // pm-estimate
  auto* pm = app.add_subcommand("pm-estimate", "perfect-matching and min-degree frequencies of G_{n,n,p}");
  int pm_n = 500;
  std::optional<double> pm_p, pm_c;
  pm->add_option("--n", pm_n)->capture_default_str();
  auto* pm_po = pm->add_option("--p", pm_p, "edge probability");
  pm->add_option("--c", pm_c, "p = (ln n + c)/n")->excludes(pm_po);

  // check
  auto* check = app.add_subcommand("check", "randomized invariant suites against brute-force oracles");

  // generate
  auto* generate = app.add_subcommand("generate", "write one trial instance in the text format");
  ModelArgs gen_model;
  gen_model.add_to(generate);
  std::int64_t gen_trial = 0;
  generate->add_option("--trial", gen_trial, "trial index under --seed")->capture_default_str();

  // replay
  auto* replay = app.add_subcommand("replay", "run a policy on an instance file");
  std::string replay_file;
  std::string replay_alg = "greedy";
  bool replay_trace = false;
  replay->add_option("instance", replay_file, "instance file")->required()->check(CLI::ExistingFile);
  replay->add_option("--alg", replay_alg, "greedy | greedy_fd | one_sm | sfd")->capture_default_str();
  replay->add_flag("--trace", replay_trace, "print the per-round trace instead of the matching");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*simulate) {
      ml::ExperimentConfig cfg;
      cfg.model = ml::model_kind_from_string(sim_model.model);
      cfg.params = sim_model.params();
      cfg.algorithm = ml::algorithm_from_string(sim_alg);
      cfg.trials = g.trials_or(1000);
      cfg.seed = ml::Seed{g.seed};
      cfg.ratio_mode = ml::ratio_mode_from_string(sim_ratio);
      cfg.zero_opt = ml::zero_opt_rule_from_string(sim_zero);
      cfg.threads = g.threads;
      cfg.allow_large = sim_large;
      const auto stats = ml::run_experiment(cfg);
      emit(g, g.json() ? stats_json(stats).dump(2) + "\n"
                       : ml::experiment_csv_header() + "\n" + ml::experiment_csv_row(stats) + "\n");
    } else if (*tables) {
      std::vector<ml::TableKind> kinds;
      if (table_which == "all") kinds = {ml::TableKind::kSfd, ml::TableKind::kGreedy, ml::TableKind::kGreedyFd};
      else kinds = {ml::table_kind_from_string(table_which)};
      const auto zero = ml::zero_opt_rule_from_string(table_zero);
      std::string csv = ml::experiment_csv_header() + "\n";
      json rows = json::array();
      for (auto kind : kinds) {
        const auto report = ml::reproduce_table(kind, g.seed, g.trials_or(1000), g.threads, zero);
        for (const auto& cell : report.cells) {
          csv += ml::experiment_csv_row(cell.stats) + "\n";
          json j = stats_json(cell.stats);
          j["table"] = std::string(ml::to_string(kind));
          j["reference"] = cell.spec.reference;
          j["diff"] = cell.diff;
          j["excluded"] = cell.spec.excluded;
          rows.push_back(j);
        }
        const auto outliers = report.outliers(table_tol);
        std::cerr << ml::to_string(kind) << ": " << report.compared() - static_cast<int>(outliers.size()) << "/"
                  << report.compared() << " cells within " << table_tol << " of the reference (typo cell excluded)\n";
        for (const auto* c : outliers) {
          std::cerr << "  n=" << c->spec.n << " p=1/" << c->spec.p_denominator << " R=" << c->spec.range
                    << ": " << fmt(c->stats.mean_ratio) << " vs " << c->spec.reference << "\n";
        }
      }
      emit(g, g.json() ? rows.dump(2) + "\n" : csv);
    } else if (*sweep) {
      const auto points = ml::sweep_rtpam_curve(sweep_c, sweep_n, g.trials_or(500), g.seed, g.threads);
      std::string csv = ml::sweep_csv_header() + "\n";
      json rows = json::array();
      for (const auto& p : points) {
        csv += ml::sweep_csv_row(p) + "\n";
        rows.push_back({{"c", p.analytic.c},
                        {"mu_rtpam", p.analytic.mu_rtpam},
                        {"mu_gnnp", p.analytic.mu_gnnp},
                        {"opt_upper", p.analytic.opt_upper},
                        {"ratio_lower", p.analytic.ratio_lower},
                        {"emp_mu_rtpam", p.emp_mu_rtpam},
                        {"emp_mu_rtpam_se", p.emp_mu_rtpam_se},
                        {"emp_mu_gnnp", p.emp_mu_gnnp},
                        {"emp_mu_gnnp_se", p.emp_mu_gnnp_se},
                        {"emp_opt_rtpam", p.emp_opt_rtpam},
                        {"emp_ratio_rtpam", p.emp_ratio_rtpam}});
      }
      emit(g, g.json() ? rows.dump(2) + "\n" : csv);
    } else if (*analyze) {
      ncfg.validate();
      if (*h_grid) {
        if (!(hx_hi > hx_lo && hx_lo >= 0.0)) throw ml::ValidationError("need 0 <= x-lo < x-hi");
        std::string csv = "x,h_closed,h_oracle,abs_diff\n";
        json rows = json::array();
        for (int i = 1; i <= h_points; ++i) {
          const double x = hx_lo + (hx_hi - hx_lo) * i / h_points;
          const double hc = ml::h_closed(x, ncfg);
          const double ho = ml::h_oracle(x, ncfg);
          csv += fmt(x) + "," + fmt(hc) + "," + fmt(ho) + "," + fmt(std::abs(hc - ho)) + "\n";
          rows.push_back({{"x", x}, {"h_closed", hc}, {"h_oracle", ho}, {"abs_diff", std::abs(hc - ho)}});
        }
        emit(g, g.json() ? rows.dump(2) + "\n" : csv);
      } else if (*minimize) {
        const auto r = min_curve == "rtpam" ? ml::minimize_ratio(min_lo, min_hi, ncfg, min_grid, min_tol)
                                            : ml::minimize_ratio_gnnp(min_lo, min_hi, ncfg, min_grid, min_tol);
        if (r.at_boundary) std::cerr << "warning: minimum found at the boundary of [c-lo, c-hi]\n";
        const json j = {{"c_star", r.c_star}, {"ratio_star", r.ratio_star}, {"grid_points", r.grid_points},
                        {"tolerance", r.tolerance}};
        emit(g, g.json() ? j.dump(2) + "\n"
                         : "c_star,ratio_star,grid_points,tolerance\n" + fmt(r.c_star) + "," + fmt(r.ratio_star) +
                               "," + std::to_string(r.grid_points) + "," + fmt(r.tolerance) + "\n");
      } else if (*bb) {
        const auto r = ml::bb_upper_bound(bb_c, ncfg);
        const auto& fp = r.fixed_point;
        const json j = {{"c", bb_c},
                        {"gamma_star_lower", fp.gamma_star_lower},
                        {"gamma_star_upper", fp.gamma_star_upper},
                        {"bound", r.value},
                        {"residual", fp.residual},
                        {"iterations", fp.iterations}};
        emit(g, g.json() ? j.dump(2) + "\n"
                         : "c,gamma_star_lower,gamma_star_upper,bound,residual,iterations\n" + fmt(bb_c) + "," +
                               fmt(fp.gamma_star_lower) + "," + fmt(fp.gamma_star_upper) + "," + fmt(r.value) + "," +
                               fmt(fp.residual) + "," + std::to_string(fp.iterations) + "\n");
      } else if (*curve) {
        if (!(curve_lo > 0.0 && curve_hi >= curve_lo)) throw ml::ValidationError("need 0 < c-lo <= c-hi");
        std::vector<double> grid;
        for (int i = 0; i < curve_points; ++i) {
          const double t = curve_points == 1 ? 0.0 : static_cast<double>(i) / (curve_points - 1);
          grid.push_back(curve_lo * std::pow(curve_hi / curve_lo, t));
        }
        const auto pts = ml::evaluate_curve(grid, ncfg);
        std::string csv = "c,mu_rtpam,mu_gnnp,opt_upper,ratio_lower\n";
        json rows = json::array();
        for (const auto& p : pts) {
          csv += fmt(p.c) + "," + fmt(p.mu_rtpam) + "," + fmt(p.mu_gnnp) + "," + fmt(p.opt_upper) + "," +
                 fmt(p.ratio_lower) + "\n";
          rows.push_back({{"c", p.c}, {"mu_rtpam", p.mu_rtpam}, {"mu_gnnp", p.mu_gnnp}, {"opt_upper", p.opt_upper},
                          {"ratio_lower", p.ratio_lower}});
        }
        emit(g, g.json() ? rows.dump(2) + "\n" : csv);
      }
    } else if (*pm) {
      if (pm_p.has_value() == pm_c.has_value()) throw ml::ValidationError("give exactly one of --p and --c");
      if (pm_n < 1) throw ml::ValidationError("n must be >= 1");
      const double p = pm_p ? *pm_p : (std::log(static_cast<double>(pm_n)) + *pm_c) / pm_n;
      const auto est = ml::estimate_perfect_matching(pm_n, p, g.trials_or(2000), g.seed, g.threads);
      const double c_eff = p * pm_n - std::log(static_cast<double>(pm_n));
      const double limit = ml::perfect_matching_limit(c_eff);
      const json j = {{"n", pm_n},          {"p", p},
                      {"trials", est.trials}, {"pm_freq", est.pm_freq},
                      {"mindeg_freq", est.mindeg_freq}, {"pm_se", est.pm_se},
                      {"mindeg_se", est.mindeg_se}, {"limit", limit}};
      emit(g, g.json() ? j.dump(2) + "\n"
                       : "n,p,trials,pm_freq,mindeg_freq,pm_se,mindeg_se,limit\n" + std::to_string(pm_n) + "," +
                             fmt(p) + "," + std::to_string(est.trials) + "," + fmt(est.pm_freq) + "," +
                             fmt(est.mindeg_freq) + "," + fmt(est.pm_se) + "," + fmt(est.mindeg_se) + "," +
                             fmt(limit) + "\n");
    } else if (*check) {
      const auto lines = run_checks(g.seed, g.trials_or(200));
      std::string text;
      bool ok = true;
      for (const auto& l : lines) {
        text += std::string(l.pass ? "PASS " : "FAIL ") + l.name + ": " + l.detail + "\n";
        ok = ok && l.pass;
      }
      emit(g, text);
      return ok ? 0 : 1;
    } else if (*generate) {
      const auto params = gen_model.params();
      const auto model = ml::model_kind_from_string(gen_model.model);
      if (gen_trial < 0) throw ml::ValidationError("trial index must be >= 0");
      auto trial = ml::draw_trial(model, params, ml::Seed{g.seed}.trial_key(static_cast<std::uint64_t>(gen_trial)));
      ml::Instance inst{std::move(trial.graph), std::move(trial.arrivals), params.describe(), g.seed};
      std::ostringstream os;
      ml::write_instance(os, inst);
      emit(g, os.str());
    } else if (*replay) {
      std::ifstream is(replay_file);
      const auto inst = ml::read_instance(is);
      const auto alg = ml::algorithm_from_string(replay_alg);
      ml::Matching m;
      ml::SimulationTrace trace;
      switch (alg) {
        case ml::Algorithm::kGreedy: {
          auto r = ml::run_greedy(inst.graph, inst.arrivals, ml::GreedyRule::kMaxWeight);
          m = std::move(r.matching);
          trace = std::move(r.trace);
          break;
        }
        case ml::Algorithm::kGreedyFd: {
          auto r = ml::run_greedy_fd(inst.graph, inst.arrivals);
          m = std::move(r.matching);
          trace = std::move(r.trace);
          break;
        }
        case ml::Algorithm::kOneSm: {
          auto r = ml::run_one_sm(inst.graph, inst.arrivals);
          m = std::move(r.matching);
          trace = std::move(r.trace);
          break;
        }
        case ml::Algorithm::kSfd: {
          auto r = ml::run_sfd(inst.graph, inst.arrivals);
          m = std::move(r.matching);
          trace = std::move(r.trace);
          break;
        }
      }
      std::ostringstream os;
      if (replay_trace) ml::write_trace_csv(os, trace);
      else ml::write_matching_csv(os, m);
      emit(g, os.str());
    }
  } catch (const ml::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ml::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
