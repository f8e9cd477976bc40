#pragma once

#include <cstdint>
#include <utility>

#include "matchlab/graph.hpp"
#include "matchlab/rng.hpp"

namespace matchlab {

// Generators for the stochastic input models. Every generator is a pure
// function of (parameters, stream key): type i's neighborhood is drawn from
// the stream derive(key, i), so a graph does not depend on the order in which
// its rows are produced.

/// Bipartite G_{n,n,p}: n offline nodes, n types, each edge present
/// independently with probability p. Unweighted (weight 1).
TypeGraph gen_gnnp(const ModelParams& params, std::uint64_t key);

/// G_{n,n,p,R}: as gen_gnnp, each edge weighted uniformly on {1, ..., R}.
/// Throws ValidationError if R is absent.
TypeGraph gen_gnnpR(const ModelParams& params, std::uint64_t key);

/// Dispatches to gen_gnnpR when R is present, gen_gnnp otherwise.
TypeGraph gen_type_graph(const ModelParams& params, std::uint64_t key);

enum class RtpamView { kOneStep, kTwoStep };

/// Random Type Poisson Arrival Model. Each type i gets Z_i ~ Poi(1) copies,
/// presented consecutively in type order.
///
/// The one-step view interleaves generation: type i's neighborhood and then
/// Z_i come from the same per-type stream. The two-step view first draws the
/// whole type graph, then all counts from a separate counts stream. The two
/// views give different realizations for the same key but identical
/// distributions.
std::pair<TypeGraph, ArrivalSequence> sample_rtpam(const ModelParams& params, std::uint64_t key,
                                                   RtpamView view);

/// Two-step RTPAM counts on a given type graph, consecutive in type order.
ArrivalSequence sample_rtpam_counts(const TypeGraph& graph, std::uint64_t key);

/// Three-step RTPAM: Poi(1) copies per type (drawn internally), then a
/// uniformly random permutation of the multiset of arrivals.
ArrivalSequence sample_rtpam_threestep(const TypeGraph& graph, std::uint64_t key);

/// Permutes a given count vector uniformly at random.
ArrivalSequence permute_counts(std::span<const int> counts, std::uint64_t key);

/// Known i.i.d. model with unit arrival rates: m arrivals, each type uniform.
/// Throws ValidationError for m < 0 or a graph with no types.
ArrivalSequence sample_known_iid(const TypeGraph& graph, std::int64_t m, std::uint64_t key);

/// Poisson arrivals: total ~ Poi(number of types), then i.i.d. uniform types.
ArrivalSequence sample_poisson_arrivals(const TypeGraph& graph, std::uint64_t key);

/// Each type exactly once in index order; the online G_{n,n,p} process.
ArrivalSequence sequential_arrivals(const TypeGraph& graph);

}  // namespace matchlab
