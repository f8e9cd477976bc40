#pragma once

#include <span>

#include "matchlab/graph.hpp"

// Exhaustive reference implementations for small inputs. They share no code
// with the production matchers and are used by the tests and `matchlab check`.
namespace matchlab::oracle {

/// Maximum matching weight by dynamic programming over subsets of offline
/// nodes. Requires n_offline <= 20.
Weight max_weight_bruteforce(const TypeGraph& graph);

/// Maximum matching size, same method, ignoring weights.
int max_cardinality_bruteforce(const TypeGraph& graph);

/// E[min(Ber(p_1) + ... + Ber(p_n), k)] by enumerating all 2^n outcomes.
/// Requires n <= 24.
double min_ber_sum_enumerate(std::span<const double> p, int k);

}  // namespace matchlab::oracle
