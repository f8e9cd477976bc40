#include "matchlab/experiment.hpp"

#include <array>
#include <cmath>

#include "matchlab/detail/parallel.hpp"
#include "matchlab/error.hpp"
#include "matchlab/format.hpp"
#include "matchlab/matching.hpp"
#include "matchlab/policies.hpp"
#include "matchlab/random_models.hpp"

namespace matchlab {
namespace {

template <class E, std::size_t N>
E parse_enum(std::string_view s, const std::array<E, N>& values, const char* what) {
  for (E v : values) {
    if (to_string(v) == s) return v;
  }
  throw ValidationError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(std::span<const double> xs) {
  MeanSe out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return out;
}

std::string density_token(const ModelParams& params) {
  return (params.density().kind == Density::Kind::kProbability ? "p=" : "c=") +
         format_double(params.density().value);
}

}  // namespace

std::string_view to_string(ModelKind m) noexcept {
  switch (m) {
    case ModelKind::kKnownIid: return "known_iid";
    case ModelKind::kRtpam: return "rtpam";
    case ModelKind::kRtpamThreeStep: return "rtpam3";
    case ModelKind::kPoissonArrivals: return "poisson";
    case ModelKind::kGnnpOnline: return "gnnp_online";
  }
  return "?";
}

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::kGreedy: return "greedy";
    case Algorithm::kGreedyFd: return "greedy_fd";
    case Algorithm::kOneSm: return "one_sm";
    case Algorithm::kSfd: return "sfd";
  }
  return "?";
}

std::string_view to_string(RatioMode r) noexcept {
  return r == RatioMode::kMeanOfRatios ? "mean_of_ratios" : "ratio_of_means";
}

std::string_view to_string(ZeroOptRule z) noexcept {
  switch (z) {
    case ZeroOptRule::kZero: return "zero";
    case ZeroOptRule::kOne: return "one";
    case ZeroOptRule::kSkip: return "skip";
  }
  return "?";
}

ModelKind model_kind_from_string(std::string_view s) {
  return parse_enum(s,
                    std::array{ModelKind::kKnownIid, ModelKind::kRtpam, ModelKind::kRtpamThreeStep,
                               ModelKind::kPoissonArrivals, ModelKind::kGnnpOnline},
                    "model");
}

Algorithm algorithm_from_string(std::string_view s) {
  return parse_enum(s, std::array{Algorithm::kGreedy, Algorithm::kGreedyFd, Algorithm::kOneSm, Algorithm::kSfd},
                    "algorithm");
}

RatioMode ratio_mode_from_string(std::string_view s) {
  return parse_enum(s, std::array{RatioMode::kMeanOfRatios, RatioMode::kRatioOfMeans}, "ratio mode");
}

ZeroOptRule zero_opt_rule_from_string(std::string_view s) {
  return parse_enum(s, std::array{ZeroOptRule::kZero, ZeroOptRule::kOne, ZeroOptRule::kSkip}, "zero-OPT rule");
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (threads < 0) throw ValidationError("threads must be >= 0");
  if (params.n() > kDefaultMaxN && !allow_large) {
    throw ValidationError("n > " + std::to_string(kDefaultMaxN) + " needs allow_large (exact OPT per trial)");
  }
  if (algorithm == Algorithm::kSfd && !params.weight_range()) {
    throw ValidationError("sfd requires a weighted model (set R)");
  }
}

TrialInstance draw_trial(ModelKind model, const ModelParams& params, std::uint64_t trial_key) {
  if (model == ModelKind::kRtpam) {
    auto [graph, arrivals] = sample_rtpam(params, trial_key, RtpamView::kOneStep);
    return {std::move(graph), std::move(arrivals)};
  }
  TypeGraph graph = gen_type_graph(params, sub_stream(trial_key, StreamTag::kTypeGraph));
  ArrivalSequence arrivals;
  switch (model) {
    case ModelKind::kKnownIid:
      arrivals = sample_known_iid(graph, params.n(), sub_stream(trial_key, StreamTag::kArrivals));
      break;
    case ModelKind::kRtpamThreeStep: arrivals = sample_rtpam_threestep(graph, trial_key); break;
    case ModelKind::kPoissonArrivals: arrivals = sample_poisson_arrivals(graph, trial_key); break;
    case ModelKind::kGnnpOnline: arrivals = sequential_arrivals(graph); break;
    case ModelKind::kRtpam: break;
  }
  return {std::move(graph), std::move(arrivals)};
}

TrialOutcome run_trial(const ExperimentConfig& cfg, std::int64_t index) {
  const TrialInstance inst = draw_trial(cfg.model, cfg.params, cfg.seed.trial_key(static_cast<std::uint64_t>(index)));
  TrialOutcome out;
  switch (cfg.algorithm) {
    case Algorithm::kGreedy:
      out.alg = run_greedy(inst.graph, inst.arrivals, GreedyRule::kMaxWeight).matching.total_weight();
      break;
    case Algorithm::kGreedyFd: out.alg = run_greedy_fd(inst.graph, inst.arrivals).matching.total_weight(); break;
    case Algorithm::kOneSm: out.alg = run_one_sm(inst.graph, inst.arrivals).matching.total_weight(); break;
    case Algorithm::kSfd: out.alg = run_sfd(inst.graph, inst.arrivals).matching.total_weight(); break;
  }
  out.opt = offline_optimum(inst.graph, inst.arrivals);
  return out;
}

ExperimentStats summarize(const ExperimentConfig& cfg, std::span<const TrialOutcome> outcomes) {
  ExperimentStats s;
  s.config = cfg;
  s.trials = static_cast<std::int64_t>(outcomes.size());
  if (outcomes.empty()) return s;

  std::vector<double> alg;
  std::vector<double> ratios;
  alg.reserve(outcomes.size());
  ratios.reserve(outcomes.size());
  double opt_sum = 0.0;
  for (const auto& o : outcomes) {
    alg.push_back(static_cast<double>(o.alg));
    opt_sum += static_cast<double>(o.opt);
    if (o.opt > 0) {
      ratios.push_back(static_cast<double>(o.alg) / static_cast<double>(o.opt));
      continue;
    }
    ++s.zero_opt_trials;
    if (cfg.zero_opt == ZeroOptRule::kZero) ratios.push_back(0.0);
    else if (cfg.zero_opt == ZeroOptRule::kOne) ratios.push_back(1.0);
  }
  const auto n = static_cast<double>(outcomes.size());
  const MeanSe a = mean_se(alg);
  s.mean_alg = a.mean;
  s.alg_std_err = a.se;
  s.mean_opt = opt_sum / n;
  const MeanSe r = mean_se(ratios);
  s.mean_of_ratios = ratios.empty() ? 1.0 : r.mean;
  s.ratio_of_means = s.mean_opt > 0.0 ? s.mean_alg / s.mean_opt : 1.0;

  if (cfg.ratio_mode == RatioMode::kMeanOfRatios) {
    s.mean_ratio = s.mean_of_ratios;
    s.std_err = r.se;
  } else {
    s.mean_ratio = s.ratio_of_means;
    // Delta method: residuals alg - rho * opt.
    if (outcomes.size() > 1 && s.mean_opt > 0.0) {
      double ss = 0.0;
      for (const auto& o : outcomes) {
        const double d = static_cast<double>(o.alg) - s.ratio_of_means * static_cast<double>(o.opt);
        ss += d * d;
      }
      s.std_err = std::sqrt(ss / (n - 1.0) / n) / s.mean_opt;
    }
  }
  return s;
}

std::vector<TrialOutcome> run_trials(const ExperimentConfig& cfg) {
  cfg.validate();
  return parallel_map<TrialOutcome>(cfg.trials, cfg.threads, [&](std::int64_t i) { return run_trial(cfg, i); });
}

ExperimentStats run_experiment(const ExperimentConfig& cfg) {
  const auto outcomes = run_trials(cfg);
  return summarize(cfg, outcomes);
}

std::string experiment_csv_header() {
  return "model,n,density,R,algorithm,trials,seed,mean_alg,mean_opt,mean_ratio,std_err";
}

std::string experiment_csv_row(const ExperimentStats& s) {
  const auto& c = s.config;
  std::string row;
  row += to_string(c.model);
  row += ',' + std::to_string(c.params.n());
  row += ',' + density_token(c.params);
  row += ',' + (c.params.weight_range() ? std::to_string(*c.params.weight_range()) : std::string("-"));
  row += ',';
  row += to_string(c.algorithm);
  row += ',' + std::to_string(s.trials);
  row += ',' + std::to_string(c.seed.master);
  row += ',' + format_double(s.mean_alg);
  row += ',' + format_double(s.mean_opt);
  row += ',' + format_double(s.mean_ratio);
  row += ',' + format_double(s.std_err);
  return row;
}

// ---- reference tables -------------------------------------------------------

std::string_view to_string(TableKind t) noexcept {
  switch (t) {
    case TableKind::kSfd: return "sfd";
    case TableKind::kGreedy: return "greedy";
    case TableKind::kGreedyFd: return "greedy_fd";
  }
  return "?";
}

TableKind table_kind_from_string(std::string_view s) {
  return parse_enum(s, std::array{TableKind::kSfd, TableKind::kGreedy, TableKind::kGreedyFd}, "table");
}

Algorithm table_algorithm(TableKind t) noexcept {
  switch (t) {
    case TableKind::kSfd: return Algorithm::kSfd;
    case TableKind::kGreedy: return Algorithm::kGreedy;
    case TableKind::kGreedyFd: return Algorithm::kGreedyFd;
  }
  return Algorithm::kGreedy;
}

namespace {

constexpr std::array<int, 3> kDenominators{2, 5, 10};
constexpr std::array<int, 4> kSizes{5, 10, 50, 100};
constexpr std::array<Weight, 5> kRanges{1, 2, 10, 100, 1000};

// Mean approximation ratios, 1000 known i.i.d. trials per cell; rows are
// (p, n) in table order, columns R = 1, 2, 10, 100, 1000.
constexpr double kSfdTable[12][5] = {
    {0.795, 0.83, 0.846, 0.854, 0.884},  {0.675, 0.734, 0.776, 0.788, 0.789},
    {0.637, 0.633, 0.657, 0.689, 0.697}, {0.635, 0.631, 0.628, 0.672, 0.677},
    {0.835, 0.85, 0.861, 0.875, 0.869},  {0.792, 0.817, 0.846, 0.85, 0.854},
    {0.61, 0.624, 0.705, 0.725, 0.725},  {0.607, 0.601, 0.65, 0.686, 0.688},
    {0.719, 0.733, 0.714, 0.743, 0.735}, {0.846, 0.87, 0.867, 0.862, 0.881},
    {0.628, 0.698, 0.761, 0.777, 0.774}, {0.597, 0.616, 0.7, 0.72, 0.723},
};
constexpr double kGreedyTable[12][5] = {
    {0.939, 0.934, 0.924, 0.924, 0.916}, {0.914, 0.91, 0.906, 0.905, 0.901},
    {0.982, 0.959, 0.929, 0.929, 0.928}, {0.991, 0.98, 0.95, 0.95, 0.95},
    {0.94, 0.944, 0.925, 0.93, 0.92},    {0.939, 0.936, 0.923, 0.919, 0.91},
    {0.931, 0.891, 0.898, 0.894, 0.894}, {0.968, 0.935, 0.912, 0.913, 0.913},
    {0.799, 0.799, 0.784, 0.796, 0.79},  {0.978, 0.96, 0.941, 0.942, 0.943},
    {0.879, 0.892, 0.893, 0.891, 0.892}, {0.924, 0.886, 0.892, 0.892, 0.891},
};
constexpr double kGreedyFdTable[12][5] = {
    {0.935, 0.955, 0.966, 0.975, 0.968}, {0.916, 0.924, 0.939, 0.94, 0.941},
    {0.981, 0.962, 0.936, 0.936, 0.936}, {0.991, 0.981, 0.954, 0.954, 0.954},
    {0.941, 0.957, 0.957, 0.963, 0.956}, {0.948, 0.963, 0.973, 0.976, 0.974},
    {0.931, 0.901, 0.92, 0.922, 0.922},  {0.968, 0.942, 0.925, 0.926, 0.925},
    {0.813, 0.811, 0.818, 0.81, 0.8},    {0.977, 0.986, 0.987, 0.99, 0.989},
    {0.883, 0.915, 0.938, 0.94, 0.94},   {0.924, 0.897, 0.919, 0.921, 0.921},
};

}  // namespace

std::vector<TableCellSpec> reference_table(TableKind t) {
  const auto& values = t == TableKind::kSfd ? kSfdTable : t == TableKind::kGreedy ? kGreedyTable : kGreedyFdTable;
  std::vector<TableCellSpec> cells;
  cells.reserve(60);
  for (std::size_t pi = 0; pi < kDenominators.size(); ++pi) {
    for (std::size_t ni = 0; ni < kSizes.size(); ++ni) {
      for (std::size_t ri = 0; ri < kRanges.size(); ++ri) {
        TableCellSpec c;
        c.n = kSizes[ni];
        c.p_denominator = kDenominators[pi];
        c.range = kRanges[ri];
        c.reference = values[pi * kSizes.size() + ni][ri];
        // The SFD value at p=1/5, n=50, R=10 is printed as "0705." in the source.
        c.excluded = t == TableKind::kSfd && c.p_denominator == 5 && c.n == 50 && c.range == 10;
        cells.push_back(c);
      }
    }
  }
  return cells;
}

int TableReport::compared() const {
  int count = 0;
  for (const auto& c : cells) count += c.spec.excluded ? 0 : 1;
  return count;
}

std::vector<const TableCellResult*> TableReport::outliers(double tolerance) const {
  std::vector<const TableCellResult*> out;
  for (const auto& c : cells) {
    if (!c.spec.excluded && std::abs(c.diff) > tolerance) out.push_back(&c);
  }
  return out;
}

std::uint64_t table_cell_seed(std::uint64_t master, TableKind t, std::size_t cell_index) {
  return derive_stream(derive_stream(master, static_cast<std::uint64_t>(t)), cell_index);
}

TableReport reproduce_table(TableKind t, std::uint64_t seed, std::int64_t trials, int threads,
                            ZeroOptRule zero_opt) {
  TableReport report;
  report.kind = t;
  const auto specs = reference_table(t);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    ExperimentConfig cfg;
    cfg.model = ModelKind::kKnownIid;
    cfg.params = ModelParams::with_p(spec.n, 1.0 / spec.p_denominator, spec.range);
    cfg.algorithm = table_algorithm(t);
    cfg.trials = trials;
    cfg.seed = Seed{table_cell_seed(seed, t, i)};
    cfg.zero_opt = zero_opt;
    cfg.threads = threads;
    TableCellResult cell{spec, run_experiment(cfg), 0.0};
    cell.diff = cell.stats.mean_ratio - spec.reference;
    report.cells.push_back(std::move(cell));
  }
  return report;
}

// ---- RTPAM curve sweep ------------------------------------------------------

std::vector<SweepPoint> sweep_rtpam_curve(std::span<const double> c_grid, int n, std::int64_t trials,
                                          std::uint64_t seed, int threads, const NumericConfig& cfg) {
  std::vector<SweepPoint> out;
  out.reserve(c_grid.size());
  for (std::size_t i = 0; i < c_grid.size(); ++i) {
    const double c = c_grid[i];
    SweepPoint pt;
    pt.analytic = evaluate_curve_point(c, cfg);

    ExperimentConfig exp;
    exp.params = ModelParams::with_c(n, c);
    exp.algorithm = Algorithm::kGreedy;
    exp.trials = trials;
    exp.threads = threads;
    exp.ratio_mode = RatioMode::kRatioOfMeans;
    exp.allow_large = true;

    exp.model = ModelKind::kRtpam;
    exp.seed = Seed{derive_stream(seed, 2 * i)};
    const ExperimentStats rtpam = run_experiment(exp);
    pt.emp_mu_rtpam = rtpam.mean_alg / n;
    pt.emp_mu_rtpam_se = rtpam.alg_std_err / n;
    pt.emp_opt_rtpam = rtpam.mean_opt / n;
    pt.emp_ratio_rtpam = rtpam.ratio_of_means;

    exp.model = ModelKind::kGnnpOnline;
    exp.seed = Seed{derive_stream(seed, 2 * i + 1)};
    const ExperimentStats gnnp = run_experiment(exp);
    pt.emp_mu_gnnp = gnnp.mean_alg / n;
    pt.emp_mu_gnnp_se = gnnp.alg_std_err / n;
    out.push_back(pt);
  }
  return out;
}

std::string sweep_csv_header() {
  return "c,mu_rtpam,mu_gnnp,opt_upper,ratio_lower,emp_mu_rtpam,emp_mu_rtpam_se,emp_mu_gnnp,emp_mu_gnnp_se,"
         "emp_opt_rtpam,emp_ratio_rtpam";
}

std::string sweep_csv_row(const SweepPoint& p) {
  const auto& a = p.analytic;
  std::string row = format_double(a.c);
  for (double v : {a.mu_rtpam, a.mu_gnnp, a.opt_upper, a.ratio_lower, p.emp_mu_rtpam, p.emp_mu_rtpam_se,
                   p.emp_mu_gnnp, p.emp_mu_gnnp_se, p.emp_opt_rtpam, p.emp_ratio_rtpam}) {
    row += ',' + format_double(v);
  }
  return row;
}

// ---- perfect matchings ------------------------------------------------------

PerfectMatchingEstimate estimate_perfect_matching(int n, double p, std::int64_t trials, std::uint64_t seed,
                                                  int threads) {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  const ModelParams params = ModelParams::with_p(n, p);
  const Seed master{seed};
  struct Flags {
    bool perfect = false;
    bool min_degree = false;
  };
  const auto flags = parallel_map<Flags>(trials, threads, [&](std::int64_t i) {
    const TypeGraph g =
        gen_gnnp(params, sub_stream(master.trial_key(static_cast<std::uint64_t>(i)), StreamTag::kTypeGraph));
    Flags f;
    f.perfect = static_cast<int>(max_cardinality_matching(g).size()) == n;
    bool ok = true;
    for (TypeId t = 0; t < g.num_types() && ok; ++t) ok = g.degree(t) >= 1;
    if (ok) {
      for (int d : g.offline_degrees()) ok = ok && d >= 1;
    }
    f.min_degree = ok;
    return f;
  });
  std::vector<double> pm;
  std::vector<double> md;
  pm.reserve(flags.size());
  md.reserve(flags.size());
  for (const auto& f : flags) {
    pm.push_back(f.perfect ? 1.0 : 0.0);
    md.push_back(f.min_degree ? 1.0 : 0.0);
  }
  const MeanSe a = mean_se(pm);
  const MeanSe b = mean_se(md);
  return {trials, a.mean, b.mean, a.se, b.se};
}

// ---- SFD expectation --------------------------------------------------------

ArrivalProbabilities arrival_probabilities(int n) {
  if (n < 1) throw ValidationError("n must be >= 1");
  const double nn = n;
  const double none = std::pow(1.0 - 1.0 / nn, nn);
  const double once = std::pow(1.0 - 1.0 / nn, nn - 1.0);
  ArrivalProbabilities q;
  q.at_least_once = 1.0 - none;
  q.at_least_twice = 1.0 - none - once;
  if (n >= 2) {
    // P(a absent) - P(a, b absent) - P(a absent, b exactly once)
    q.absent_and_other_twice = none - std::pow(1.0 - 2.0 / nn, nn) - std::pow(1.0 - 2.0 / nn, nn - 1.0);
  }
  return q;
}

SfdExpectation sfd_expectation(const TypeGraph& graph) {
  const SfdPlan plan = SfdPlan::build(graph);
  const ArrivalProbabilities q = arrival_probabilities(graph.num_types());
  SfdExpectation e;
  e.m1_weight = plan.m1.total_weight();
  e.m2_weight = plan.m2.total_weight();
  for (const auto& pair : plan.m2.pairs()) e.stacked_base += plan.residual.base_weight[static_cast<std::size_t>(pair.offline)];
  e.lemma = q.at_least_once * static_cast<double>(e.m1_weight) + q.at_least_twice * static_cast<double>(e.m2_weight);
  e.exact = e.lemma + q.absent_and_other_twice * static_cast<double>(e.stacked_base);
  return e;
}

}  // namespace matchlab
