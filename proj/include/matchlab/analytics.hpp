#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace matchlab {

struct NumericConfig {
  double series_tol = 1e-14;     // relative truncation tolerance
  int series_max_terms = 500;
  double ode_step = 1e-4;        // must divide 1
  double fixedpoint_tol = 1e-12;
  std::int64_t fixedpoint_max_iters = 1'000'000;
  // Re-solve the ODE at half the step and fail if the results disagree.
  bool verify_step = true;
  double step_tolerance = 1e-6;

  /// Throws ValidationError on non-positive fields or a step that does not divide 1.
  void validate() const;
};

/// Modified Bessel function of the first kind, by its power series.
double bessel_i(int k, double x, const NumericConfig& cfg = {});

/// Marcum Q function of order n >= 1.
///
/// Sums (a/b)^k I_k(ab) for k >= 1-n with I_{-k} = I_k. The truncation point
/// K comes from the bound I_k(z) <= (z/2)^k/k! exp(z^2/(4(k+1))); the terms
/// are then produced by downward recurrence from K, carrying the prefactor
/// exp(-(a^2+b^2)/2) so every intermediate stays in [0, 1].
/// At a = 0 the sum reduces to exp(-b^2/2) sum_{m<n} (b^2/2)^m / m!.
double marcum_q(int n, double a, double b, const NumericConfig& cfg = {});

/// E[min(Poi(x), Poi(1))] from the Bessel/Marcum closed form. h(0) = 0.
double h_closed(double x, const NumericConfig& cfg = {});
/// Same quantity as sum_{m>=1} P(Poi(x) >= m) P(Poi(1) >= m).
double h_oracle(double x, const NumericConfig& cfg = {});

/// Asymptotic matched fraction of Greedy on G_{n,n,c/n}: 1 - ln(2 - e^-c)/c.
double greedy_fraction_gnnp(double c);

/// Fixed-step RK4 solution of g' = h(c(1 - g)), g(0) = 0, on [0, 1].
struct OdeSolution {
  std::vector<double> t;
  std::vector<double> g;
};
OdeSolution solve_greedy_ode(double c, const NumericConfig& cfg = {});

/// g_c(1): asymptotic matched fraction of Greedy on RTPAM(n, c).
/// With cfg.verify_step, throws NumericError when the half-step solution
/// differs by more than cfg.step_tolerance.
double greedy_fraction_rtpam(double c, const NumericConfig& cfg = {});

struct FixedPointResult {
  double gamma_star_lower = 0.0;  // smallest solution of x = c exp(-c exp(-x))
  double gamma_star_upper = 0.0;  // c exp(-gamma_star_lower)
  double residual = 0.0;
  std::int64_t iterations = 0;
};

struct BbBound {
  FixedPointResult fixed_point;
  double value = 0.0;  // 2 - (g* + g_* + g* g_*)/c, per offline node
};

/// Upper bound on E[max matching]/n for G_{n,n,c/n} in the limit.
/// Iterates x <- c exp(-c exp(-x)) from 0, which increases monotonically to
/// the smallest fixed point. Throws NumericError after fixedpoint_max_iters.
/// Convergence is sublinear at c = e where the fixed point is a tangency.
BbBound bb_upper_bound(double c, const NumericConfig& cfg = {});

/// min(c(1 - 1/e), bb_upper_bound(c)): upper bound on E[OPT]/n for RTPAM(n, c).
double opt_upper_rtpam(double c, const NumericConfig& cfg = {});

/// g_c(1) / opt_upper_rtpam(c), clipped to [0, 1].
double ratio_lower_rtpam(double c, const NumericConfig& cfg = {});
/// greedy_fraction_gnnp(c) / bb_upper_bound(c), clipped to [0, 1].
double ratio_lower_gnnp(double c, const NumericConfig& cfg = {});

struct MinimizerResult {
  double c_star = 0.0;
  double ratio_star = 0.0;
  int grid_points = 0;
  double tolerance = 0.0;
  bool at_boundary = false;  // argmin of the grid scan was an endpoint
};

/// Log-spaced grid scan of `curve` on [c_lo, c_hi], then golden-section
/// search in the bracket around the best grid point until its width is
/// below `tolerance`.
MinimizerResult minimize_curve(const std::function<double(double)>& curve, double c_lo, double c_hi,
                               int grid_points = 400, double tolerance = 1e-6);

/// Minimizer of ratio_lower_rtpam. The grid scan runs without the
/// step-halving check; the check is applied once at the returned c*.
MinimizerResult minimize_ratio(double c_lo, double c_hi, const NumericConfig& cfg = {},
                               int grid_points = 400, double tolerance = 1e-6);
MinimizerResult minimize_ratio_gnnp(double c_lo, double c_hi, const NumericConfig& cfg = {},
                                    int grid_points = 400, double tolerance = 1e-6);

/// Limit of P(G_{n,n,(log n + c)/n} has a perfect matching): exp(-2 exp(-c)).
double perfect_matching_limit(double c);

struct CurvePoint {
  double c = 0.0;
  double mu_rtpam = 0.0;
  double mu_gnnp = 0.0;
  double opt_upper = 0.0;
  double ratio_lower = 0.0;
};
CurvePoint evaluate_curve_point(double c, const NumericConfig& cfg = {});
std::vector<CurvePoint> evaluate_curve(std::span<const double> c_grid, const NumericConfig& cfg = {});

/// Probabilities p_1..p_n and a cap k for E[min(Ber(p_1) + ... + Ber(p_n), k)].
struct BerMinQuery {
  std::vector<double> p;
  int k = 0;

  double tau() const;
  void validate() const;
};

/// Poisson-binomial pmf P(S = j), j = 0..n, by sequential convolution.
std::vector<double> poisson_binomial_pmf(std::span<const double> p);

/// Exact E[min(S, k)] from the Poisson-binomial pmf.
double min_ber_sum_expectation(const BerMinQuery& q);

struct EqualSplitReport {
  double equal_value = 0.0;        // R(tau/n, ..., tau/n)
  double min_sampled = 0.0;        // smallest R over accepted samples
  double min_margin = 0.0;         // min over samples of R(p) - equal_value
  std::vector<double> worst_p;     // sample attaining min_margin
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t counterexamples = 0;       // R(p) < equal_value - 1e-12
  std::int64_t averaging_violations = 0;  // averaging a pair increased R by > 1e-12
  std::vector<double> first_counterexample;

  bool passed() const { return counterexamples == 0 && averaging_violations == 0; }
};

/// Samples feasible p with sum tau (exponentials normalized to tau, draws
/// with a coordinate above 1 rejected) and checks that the equal split
/// minimizes R and that replacing a random pair by its average does not
/// increase R. Throws ValidationError if tau is outside [0, n] or if the
/// rejection rate leaves fewer than `trials` samples after 1000 * trials draws.
EqualSplitReport check_equal_split_minimizes(int n, double tau, int k, std::int64_t trials,
                                             std::uint64_t seed);

}  // namespace matchlab
