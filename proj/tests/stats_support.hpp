#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace matchlab::testing {

// Pearson goodness of fit. Bins with expected count below `min_expected`
// are merged into their left neighbour so the chi-square approximation holds.
inline double chi_square_p_value(std::span<const std::int64_t> observed, std::span<const double> probs,
                                 double min_expected = 5.0) {
  if (observed.size() != probs.size()) throw std::invalid_argument("size mismatch");
  std::int64_t total = 0;
  for (auto o : observed) total += o;
  std::vector<double> obs, exp;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probs[i] * static_cast<double>(total);
    if (!exp.empty() && (e < min_expected || exp.back() < min_expected)) {
      obs.back() += static_cast<double>(observed[i]);
      exp.back() += e;
    } else {
      obs.push_back(static_cast<double>(observed[i]));
      exp.push_back(e);
    }
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) stat += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  const double df = static_cast<double>(obs.size() - 1);
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), stat));
}

// Two-sample chi-square test of homogeneity on a 2 x k table, merging sparse
// columns as above.
inline double homogeneity_p_value(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                  double min_expected = 5.0) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
  double na = 0, nb = 0;
  for (auto x : a) na += static_cast<double>(x);
  for (auto x : b) nb += static_cast<double>(x);
  std::vector<double> ca, cb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double col = static_cast<double>(a[i] + b[i]);
    const double small = std::min(na, nb) * col / (na + nb);
    if (!ca.empty() && (small < min_expected || std::min(na, nb) * (ca.back() + cb.back()) / (na + nb) < min_expected)) {
      ca.back() += static_cast<double>(a[i]);
      cb.back() += static_cast<double>(b[i]);
    } else {
      ca.push_back(static_cast<double>(a[i]));
      cb.push_back(static_cast<double>(b[i]));
    }
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const double col = ca[i] + cb[i];
    const double ea = na * col / (na + nb);
    const double eb = nb * col / (na + nb);
    stat += (ca[i] - ea) * (ca[i] - ea) / ea + (cb[i] - eb) * (cb[i] - eb) / eb;
  }
  const double df = static_cast<double>(ca.size() - 1);
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), stat));
}

}  // namespace matchlab::testing
