#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "matchlab/analytics.hpp"
#include "matchlab/graph.hpp"
#include "matchlab/rng.hpp"

namespace matchlab {

enum class ModelKind {
  kKnownIid,         // G_{n,n,p[,R]} type graph, n i.i.d. uniform arrivals
  kRtpam,            // each type repeated Poi(1) times, consecutively
  kRtpamThreeStep,   // RTPAM counts in uniformly random order
  kPoissonArrivals,  // Poi(n) i.i.d. uniform arrivals
  kGnnpOnline,       // every type once, in index order
};

enum class Algorithm { kGreedy, kGreedyFd, kOneSm, kSfd };

enum class RatioMode { kMeanOfRatios, kRatioOfMeans };

/// Per-trial ratio when the realization has OPT = 0 (so ALG = 0 too).
enum class ZeroOptRule {
  kZero,  // ratio 0; the default, consistent with the reference tables
  kOne,   // ratio 1
  kSkip,  // excluded from the ratio average
};

std::string_view to_string(ModelKind m) noexcept;
std::string_view to_string(Algorithm a) noexcept;
std::string_view to_string(RatioMode r) noexcept;
std::string_view to_string(ZeroOptRule z) noexcept;
ModelKind model_kind_from_string(std::string_view s);
Algorithm algorithm_from_string(std::string_view s);
RatioMode ratio_mode_from_string(std::string_view s);
ZeroOptRule zero_opt_rule_from_string(std::string_view s);

inline constexpr int kDefaultMaxN = 2000;

struct ExperimentConfig {
  ModelKind model = ModelKind::kKnownIid;
  ModelParams params = ModelParams::with_p(1, 1.0);
  Algorithm algorithm = Algorithm::kGreedy;
  std::int64_t trials = 1;
  Seed seed;
  RatioMode ratio_mode = RatioMode::kMeanOfRatios;
  ZeroOptRule zero_opt = ZeroOptRule::kZero;
  int threads = 1;  // 0 = hardware concurrency
  bool allow_large = false;

  /// Throws ValidationError: trials < 1, n > 2000 without allow_large,
  /// SFD without a weight range, threads < 0.
  void validate() const;
};

/// One realization: type graph plus arrivals, as drawn for trial `index`.
struct TrialInstance {
  TypeGraph graph;
  ArrivalSequence arrivals;
};
TrialInstance draw_trial(ModelKind model, const ModelParams& params, std::uint64_t trial_key);

struct TrialOutcome {
  Weight alg = 0;
  Weight opt = 0;
};

/// Runs the configured algorithm on one trial and the exact offline optimum
/// on its realization graph.
TrialOutcome run_trial(const ExperimentConfig& cfg, std::int64_t index);

struct ExperimentStats {
  ExperimentConfig config;
  std::int64_t trials = 0;
  double mean_alg = 0.0;
  double mean_opt = 0.0;
  double mean_of_ratios = 0.0;
  double ratio_of_means = 0.0;
  double mean_ratio = 0.0;  // whichever of the two cfg.ratio_mode selects
  double std_err = 0.0;     // of mean_ratio
  double alg_std_err = 0.0; // of mean_alg
  std::int64_t zero_opt_trials = 0;
};

/// Aggregates outcomes in trial-index order.
ExperimentStats summarize(const ExperimentConfig& cfg, std::span<const TrialOutcome> outcomes);

std::vector<TrialOutcome> run_trials(const ExperimentConfig& cfg);
ExperimentStats run_experiment(const ExperimentConfig& cfg);

/// Header and row of the fixed experiment CSV schema
/// `model,n,density,R,algorithm,trials,seed,mean_alg,mean_opt,mean_ratio,std_err`.
std::string experiment_csv_header();
std::string experiment_csv_row(const ExperimentStats& s);

// ---- reference tables -------------------------------------------------------

enum class TableKind { kSfd, kGreedy, kGreedyFd };
std::string_view to_string(TableKind t) noexcept;
TableKind table_kind_from_string(std::string_view s);
Algorithm table_algorithm(TableKind t) noexcept;

struct TableCellSpec {
  int n = 0;
  int p_denominator = 0;  // p = 1 / p_denominator
  Weight range = 1;
  double reference = 0.0;
  bool excluded = false;  // reference value is a known typo
};

/// The 60 cells of a reference table, ordered by p, n, R.
std::vector<TableCellSpec> reference_table(TableKind t);

struct TableCellResult {
  TableCellSpec spec;
  ExperimentStats stats;
  double diff = 0.0;  // mean_ratio - reference
};

struct TableReport {
  TableKind kind = TableKind::kGreedy;
  std::vector<TableCellResult> cells;

  int compared() const;
  /// Compared cells with |diff| > tolerance.
  std::vector<const TableCellResult*> outliers(double tolerance) const;
};

/// Seed of a table cell: derived from the master seed and the cell's
/// position, so any cell can be rerun on its own.
std::uint64_t table_cell_seed(std::uint64_t master, TableKind t, std::size_t cell_index);

TableReport reproduce_table(TableKind t, std::uint64_t seed, std::int64_t trials = 1000, int threads = 1,
                            ZeroOptRule zero_opt = ZeroOptRule::kZero);

// ---- RTPAM curve sweep ------------------------------------------------------

struct SweepPoint {
  CurvePoint analytic;
  double emp_mu_rtpam = 0.0;  // Greedy size / n on RTPAM(n, c)
  double emp_mu_rtpam_se = 0.0;
  double emp_mu_gnnp = 0.0;   // Greedy size / n on online G_{n,n,c/n}
  double emp_mu_gnnp_se = 0.0;
  double emp_opt_rtpam = 0.0; // OPT / n on RTPAM(n, c)
  double emp_ratio_rtpam = 0.0;  // ratio of means
};

std::vector<SweepPoint> sweep_rtpam_curve(std::span<const double> c_grid, int n, std::int64_t trials,
                                          std::uint64_t seed, int threads = 1, const NumericConfig& cfg = {});
std::string sweep_csv_header();
std::string sweep_csv_row(const SweepPoint& p);

// ---- perfect matchings ------------------------------------------------------

struct PerfectMatchingEstimate {
  std::int64_t trials = 0;
  double pm_freq = 0.0;      // G_{n,n,p} has a perfect matching
  double mindeg_freq = 0.0;  // every node on both sides has degree >= 1
  double pm_se = 0.0;
  double mindeg_se = 0.0;
};

PerfectMatchingEstimate estimate_perfect_matching(int n, double p, std::int64_t trials, std::uint64_t seed,
                                                  int threads = 1);

// ---- SFD expectation --------------------------------------------------------

/// Exact arrival probabilities for n i.i.d. uniform arrivals over n types.
struct ArrivalProbabilities {
  double at_least_once = 0.0;   // q1 = 1 - (1-1/n)^n
  double at_least_twice = 0.0;  // q2 = q1 - (1-1/n)^(n-1)
  double absent_and_other_twice = 0.0;  // P(type a absent, type b >= 2), a != b
};
ArrivalProbabilities arrival_probabilities(int n);

struct SfdExpectation {
  Weight m1_weight = 0;
  Weight m2_weight = 0;   // residual weights
  Weight stacked_base = 0; // M1 weight at offline nodes matched in both M1 and M2
  double lemma = 0.0;     // q1 w(M1) + q2 w(M2)
  double exact = 0.0;     // lemma + P(absent, other twice) * stacked_base
};

/// Expected SFD weight on `graph` under n = num_types i.i.d. uniform arrivals.
SfdExpectation sfd_expectation(const TypeGraph& graph);

}  // namespace matchlab
