#include "matchlab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "matchlab/error.hpp"
#include "matchlab/rng.hpp"

namespace matchlab {
namespace {

constexpr double kAbsoluteFloor = 1e-30;

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

// sum_i (z/2)^{2i} k! / (i! (i+k)!) = I_k(z) * k! / (z/2)^k, which is >= 1.
double bessel_scaled_series(int k, double z, const NumericConfig& cfg) {
  const double q = 0.25 * z * z;
  double sum = 1.0;
  double term = 1.0;
  for (int i = 0; i < cfg.series_max_terms; ++i) {
    term *= q / ((i + 1.0) * (i + 1.0 + k));
    sum += term;
    const double r = q / ((i + 2.0) * (i + 2.0 + k));
    if (r < 1.0 && term * r / (1.0 - r) < std::max(cfg.series_tol * sum, kAbsoluteFloor)) return sum;
  }
  throw NumericError("Bessel series did not converge within " + std::to_string(cfg.series_max_terms) +
                     " terms (k=" + std::to_string(k) + ", x=" + std::to_string(z) + ")");
}

// ln I_k(z) for z > 0.
double log_bessel_i(int k, double z, const NumericConfig& cfg) {
  return k * std::log(0.5 * z) - std::lgamma(k + 1.0) + std::log(bessel_scaled_series(k, z, cfg));
}

double checked(double value, const char* what) {
  if (!std::isfinite(value)) throw NumericError(std::string(what) + " is not finite");
  return value;
}

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

double rk4_final(double c, int steps, const NumericConfig& cfg, OdeSolution* out) {
  const double dt = 1.0 / steps;
  auto f = [&](double g) { return h_closed(std::max(0.0, c * (1.0 - g)), cfg); };
  double g = 0.0;
  if (out != nullptr) {
    out->t.assign(1, 0.0);
    out->g.assign(1, 0.0);
    out->t.reserve(static_cast<std::size_t>(steps) + 1);
    out->g.reserve(static_cast<std::size_t>(steps) + 1);
  }
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(g);
    const double k2 = f(g + 0.5 * dt * k1);
    const double k3 = f(g + 0.5 * dt * k2);
    const double k4 = f(g + dt * k3);
    g += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (out != nullptr) {
      out->t.push_back((i + 1) * dt);
      out->g.push_back(g);
    }
  }
  return checked(g, "ODE solution");
}

int ode_steps(const NumericConfig& cfg) {
  cfg.validate();
  return static_cast<int>(std::lround(1.0 / cfg.ode_step));
}

}  // namespace

void NumericConfig::validate() const {
  require(series_tol > 0 && series_max_terms > 0 && ode_step > 0 && fixedpoint_tol > 0 &&
              fixedpoint_max_iters > 0 && step_tolerance > 0,
          "numeric settings must be positive");
  require(ode_step <= 1.0, "ode_step must be at most 1");
  const double steps = std::round(1.0 / ode_step);
  require(std::abs(steps * ode_step - 1.0) < 1e-9, "ode_step must divide 1");
}

double bessel_i(int k, double x, const NumericConfig& cfg) {
  require(std::isfinite(x) && x >= 0.0, "bessel_i requires finite x >= 0");
  k = std::abs(k);
  if (x == 0.0) return k == 0 ? 1.0 : 0.0;
  const double lead = k == 0 ? 1.0 : std::exp(k * std::log(0.5 * x) - std::lgamma(k + 1.0));
  return checked(lead * bessel_scaled_series(k, x, cfg), "bessel_i");
}

double marcum_q(int n, double a, double b, const NumericConfig& cfg) {
  require(n >= 1, "marcum_q requires order n >= 1");
  require(std::isfinite(a) && a >= 0.0, "marcum_q requires finite a >= 0");
  require(std::isfinite(b) && b >= 0.0, "marcum_q requires finite b >= 0");
  if (b == 0.0) return 1.0;

  const double half_b2 = 0.5 * b * b;
  if (a == 0.0) {
    double term = std::exp(-half_b2);
    double sum = term;
    for (int m = 1; m < n; ++m) {
      term *= half_b2 / m;
      sum += term;
    }
    return clip01(sum);
  }

  const double a2 = a * a;
  const double z = a * b;
  const double log_ratio = std::log(a / b);
  const double log_pref = -0.5 * (a2 + b * b);
  // I_0(z) >= e^z / (1 + 2z) gives a lower bound on the k = 0 term.
  const double log_first = log_pref + std::max(0.0, z - std::log1p(2.0 * z));
  const double target = std::max(std::log(cfg.series_tol) + log_first, std::log(kAbsoluteFloor));

  int top = std::max({1, n, static_cast<int>(std::ceil(a2))});
  const double log_half_a2 = std::log(0.5 * a2);
  for (;; ++top) {
    if (top > cfg.series_max_terms) {
      throw NumericError("Marcum Q needs more than " + std::to_string(cfg.series_max_terms) + " terms");
    }
    const double bound =
        log_pref + top * log_half_a2 - std::lgamma(top + 1.0) + z * z / (4.0 * (top + 1.0));
    if (std::numbers::ln2 + bound < target) break;
  }

  // u[k] = exp(log_pref) (a/b)^k I_k(ab), filled downward from `top`.
  std::vector<double> u(static_cast<std::size_t>(top) + 2);
  auto seed = [&](int k) { return std::exp(log_pref + k * log_ratio + log_bessel_i(k, z, cfg)); };
  u[static_cast<std::size_t>(top) + 1] = seed(top + 1);
  u[static_cast<std::size_t>(top)] = seed(top);
  const double b2_over_a2 = (b * b) / a2;
  for (int k = top; k >= 1; --k) {
    const auto i = static_cast<std::size_t>(k);
    u[i - 1] = (2.0 * k / a2) * u[i] + b2_over_a2 * u[i + 1];
  }

  double sum = 0.0;
  for (int k = top; k >= 0; --k) sum += u[static_cast<std::size_t>(k)];
  for (int k = 1; k < n; ++k) {
    const double uk = u[static_cast<std::size_t>(k)];
    if (uk > 0.0) sum += std::exp(std::log(uk) - 2.0 * k * log_ratio);
  }
  return clip01(checked(sum, "marcum_q"));
}

double h_closed(double x, const NumericConfig& cfg) {
  require(std::isfinite(x) && x >= 0.0, "h requires finite x >= 0");
  if (x == 0.0) return 0.0;
  const double sx = std::sqrt(x);
  const double i0 = bessel_i(0, 2.0 * sx, cfg);
  const double i1 = bessel_i(1, 2.0 * sx, cfg);
  const double q1 = marcum_q(1, std::sqrt(2.0 * x), std::numbers::sqrt2, cfg);
  const double value =
      0.5 * (1.0 + x - 2.0 * std::exp(-x - 1.0) * (i0 + sx * i1) - (1.0 - x) * (1.0 - 2.0 * q1));
  return checked(value, "h_closed");
}

double h_oracle(double x, const NumericConfig& cfg) {
  require(std::isfinite(x) && x >= 0.0, "h requires finite x >= 0");
  // Tails of Poi(1), summed backward so small tails keep relative accuracy.
  constexpr int kMaxM = 80;
  std::vector<double> pmf1(kMaxM + 1);
  pmf1[0] = std::exp(-1.0);
  for (int j = 1; j <= kMaxM; ++j) pmf1[static_cast<std::size_t>(j)] = pmf1[static_cast<std::size_t>(j) - 1] / j;
  std::vector<double> tail1(kMaxM + 2, 0.0);
  for (int j = kMaxM; j >= 0; --j) {
    tail1[static_cast<std::size_t>(j)] = tail1[static_cast<std::size_t>(j) + 1] + pmf1[static_cast<std::size_t>(j)];
  }

  double sum = 0.0;
  double pmf_x = std::exp(-x);    // P(Poi(x) = m - 1)
  double tail_x = -std::expm1(-x);  // P(Poi(x) >= m)
  for (int m = 1; m <= kMaxM; ++m) {
    const double t1 = tail1[static_cast<std::size_t>(m)];
    sum += tail_x * t1;
    if (2.0 * tail1[static_cast<std::size_t>(m) + 1] < std::max(cfg.series_tol * sum, kAbsoluteFloor)) break;
    pmf_x *= x / m;
    tail_x = std::max(0.0, tail_x - pmf_x);
  }
  return sum;
}

double greedy_fraction_gnnp(double c) {
  require(std::isfinite(c) && c > 0.0, "greedy_fraction_gnnp requires c > 0");
  // ln(2 - e^-c) = log1p(1 - e^-c)
  return 1.0 - std::log1p(-std::expm1(-c)) / c;
}

OdeSolution solve_greedy_ode(double c, const NumericConfig& cfg) {
  require(std::isfinite(c) && c > 0.0, "the Greedy ODE requires c > 0");
  OdeSolution sol;
  rk4_final(c, ode_steps(cfg), cfg, &sol);
  return sol;
}

double greedy_fraction_rtpam(double c, const NumericConfig& cfg) {
  require(std::isfinite(c) && c > 0.0, "greedy_fraction_rtpam requires c > 0");
  const int steps = ode_steps(cfg);
  const double coarse = rk4_final(c, steps, cfg, nullptr);
  if (cfg.verify_step) {
    const double fine = rk4_final(c, 2 * steps, cfg, nullptr);
    if (std::abs(fine - coarse) > cfg.step_tolerance) {
      throw NumericError("ODE step-halving disagreement at c=" + std::to_string(c));
    }
  }
  return coarse;
}

BbBound bb_upper_bound(double c, const NumericConfig& cfg) {
  require(std::isfinite(c) && c > 0.0, "bb_upper_bound requires c > 0");
  auto f = [c](double x) { return c * std::exp(-c * std::exp(-x)); };
  FixedPointResult fp;
  double x = 0.0;
  for (;;) {
    const double fx = f(x);
    fp.residual = std::abs(x - fx);
    if (fp.residual < cfg.fixedpoint_tol) break;
    if (fp.iterations >= cfg.fixedpoint_max_iters) {
      throw NumericError("fixed-point iteration did not converge for c=" + std::to_string(c) + " after " +
                         std::to_string(fp.iterations) + " iterations");
    }
    x = fx;
    ++fp.iterations;
  }
  fp.gamma_star_lower = x;
  fp.gamma_star_upper = c * std::exp(-x);
  const double gl = fp.gamma_star_lower;
  const double gu = fp.gamma_star_upper;
  return {fp, 2.0 - (gu + gl + gu * gl) / c};
}

double opt_upper_rtpam(double c, const NumericConfig& cfg) {
  return std::min(c * (1.0 - std::exp(-1.0)), bb_upper_bound(c, cfg).value);
}

double ratio_lower_rtpam(double c, const NumericConfig& cfg) {
  return clip01(greedy_fraction_rtpam(c, cfg) / opt_upper_rtpam(c, cfg));
}

double ratio_lower_gnnp(double c, const NumericConfig& cfg) {
  return clip01(greedy_fraction_gnnp(c) / bb_upper_bound(c, cfg).value);
}

MinimizerResult minimize_curve(const std::function<double(double)>& curve, double c_lo, double c_hi,
                               int grid_points, double tolerance) {
  require(std::isfinite(c_lo) && std::isfinite(c_hi) && c_lo > 0.0 && c_lo < c_hi,
          "minimizer requires 0 < c_lo < c_hi");
  require(grid_points >= 3, "minimizer needs at least 3 grid points");
  require(tolerance > 0.0, "minimizer tolerance must be positive");

  const double log_lo = std::log(c_lo);
  const double log_step = (std::log(c_hi) - log_lo) / (grid_points - 1);
  auto grid = [&](int i) {
    if (i == 0) return c_lo;
    if (i == grid_points - 1) return c_hi;
    return std::exp(log_lo + i * log_step);
  };
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double v = curve(grid(i));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }

  MinimizerResult result;
  result.grid_points = grid_points;
  result.tolerance = tolerance;
  result.at_boundary = best == 0 || best == grid_points - 1;
  result.c_star = grid(best);
  result.ratio_star = best_value;

  double lo = grid(std::max(0, best - 1));
  double hi = grid(std::min(grid_points - 1, best + 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = curve(x1);
  double f2 = curve(x2);
  while (hi - lo > tolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = curve(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = curve(x2);
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double f_mid = curve(mid);
  if (f_mid <= result.ratio_star) {
    result.c_star = mid;
    result.ratio_star = f_mid;
  }
  return result;
}

MinimizerResult minimize_ratio(double c_lo, double c_hi, const NumericConfig& cfg, int grid_points,
                               double tolerance) {
  NumericConfig scan = cfg;
  scan.verify_step = false;
  MinimizerResult result = minimize_curve([&](double c) { return ratio_lower_rtpam(c, scan); }, c_lo, c_hi,
                                          grid_points, tolerance);
  if (cfg.verify_step) greedy_fraction_rtpam(result.c_star, cfg);
  return result;
}

MinimizerResult minimize_ratio_gnnp(double c_lo, double c_hi, const NumericConfig& cfg, int grid_points,
                                    double tolerance) {
  return minimize_curve([&](double c) { return ratio_lower_gnnp(c, cfg); }, c_lo, c_hi, grid_points,
                        tolerance);
}

double perfect_matching_limit(double c) { return std::exp(-2.0 * std::exp(-c)); }

CurvePoint evaluate_curve_point(double c, const NumericConfig& cfg) {
  CurvePoint pt;
  pt.c = c;
  pt.mu_rtpam = greedy_fraction_rtpam(c, cfg);
  pt.mu_gnnp = greedy_fraction_gnnp(c);
  pt.opt_upper = opt_upper_rtpam(c, cfg);
  pt.ratio_lower = clip01(pt.mu_rtpam / pt.opt_upper);
  return pt;
}

std::vector<CurvePoint> evaluate_curve(std::span<const double> c_grid, const NumericConfig& cfg) {
  std::vector<CurvePoint> out;
  out.reserve(c_grid.size());
  for (double c : c_grid) out.push_back(evaluate_curve_point(c, cfg));
  return out;
}

double BerMinQuery::tau() const {
  double s = 0.0;
  for (double x : p) s += x;
  return s;
}

void BerMinQuery::validate() const {
  require(k >= 0, "cap k must be >= 0");
  for (double x : p) require(std::isfinite(x) && x >= 0.0 && x <= 1.0, "probabilities must lie in [0, 1]");
}

std::vector<double> poisson_binomial_pmf(std::span<const double> p) {
  std::vector<double> pmf(p.size() + 1, 0.0);
  pmf[0] = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j > 0; --j) pmf[j] = pmf[j] * (1.0 - p[i]) + pmf[j - 1] * p[i];
    pmf[0] *= 1.0 - p[i];
  }
  return pmf;
}

double min_ber_sum_expectation(const BerMinQuery& q) {
  q.validate();
  const auto pmf = poisson_binomial_pmf(q.p);
  double e = 0.0;
  for (std::size_t j = 0; j < pmf.size(); ++j) e += static_cast<double>(std::min<std::size_t>(j, static_cast<std::size_t>(q.k))) * pmf[j];
  return e;
}

EqualSplitReport check_equal_split_minimizes(int n, double tau, int k, std::int64_t trials, std::uint64_t seed) {
  require(n >= 1, "n must be >= 1");
  require(k >= 0, "k must be >= 0");
  require(std::isfinite(tau) && tau >= 0.0 && tau <= n, "tau must lie in [0, n]");
  require(trials >= 0, "trials must be >= 0");

  EqualSplitReport report;
  BerMinQuery equal{std::vector<double>(static_cast<std::size_t>(n), tau / n), k};
  report.equal_value = min_ber_sum_expectation(equal);
  report.min_sampled = report.equal_value;
  report.worst_p = equal.p;
  // At tau = 0 or tau = n the equal split is the only feasible point.
  if (tau == 0.0 || tau == static_cast<double>(n)) return report;

  constexpr double kSlack = 1e-12;
  Rng rng(seed);
  const std::int64_t max_draws = 1000 * trials + 1000;
  report.min_margin = std::numeric_limits<double>::infinity();
  report.min_sampled = std::numeric_limits<double>::infinity();
  BerMinQuery q{std::vector<double>(static_cast<std::size_t>(n)), k};
  while (report.accepted < trials) {
    if (report.accepted + report.rejected >= max_draws) {
      throw ValidationError("too many rejected draws; tau is too close to n for exponential sampling");
    }
    double total = 0.0;
    for (auto& x : q.p) total += (x = rng.exponential());
    bool feasible = true;
    for (auto& x : q.p) {
      x = tau * x / total;
      if (x > 1.0) feasible = false;
    }
    if (!feasible) {
      ++report.rejected;
      continue;
    }
    ++report.accepted;
    const double value = min_ber_sum_expectation(q);
    const double margin = value - report.equal_value;
    if (margin < report.min_margin) {
      report.min_margin = margin;
      report.min_sampled = value;
      report.worst_p = q.p;
    }
    if (margin < -kSlack && report.counterexamples++ == 0) report.first_counterexample = q.p;

    if (n >= 2) {
      const auto i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n)));
      auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (j >= i) ++j;
      BerMinQuery averaged = q;
      averaged.p[i] = averaged.p[j] = 0.5 * (q.p[i] + q.p[j]);
      if (min_ber_sum_expectation(averaged) > value + kSlack) ++report.averaging_violations;
    }
  }
  if (report.accepted == 0) report.min_margin = 0.0;
  return report;
}

}  // namespace matchlab
