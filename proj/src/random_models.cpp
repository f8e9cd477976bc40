#include "matchlab/random_models.hpp"

#include <cmath>
#include <numeric>

#include "matchlab/error.hpp"

namespace matchlab {
namespace {

// Dense rows switch to per-pair Bernoulli draws; sparse rows skip
// geometrically between edges (one log per edge instead of one draw per pair).
constexpr double kDenseThreshold = 0.25;

void draw_row(TypeGraph& graph, TypeId type, int n, double p, Weight range, Rng& rng) {
  const bool weighted = range > 1;
  auto add = [&](OfflineId u) {
    const Weight w = weighted ? 1 + static_cast<Weight>(rng.below(static_cast<std::uint64_t>(range))) : 1;
    graph.add_edge(type, u, w);
  };
  if (p <= 0.0) return;
  if (p >= 1.0) {
    for (OfflineId u = 0; u < n; ++u) add(u);
    return;
  }
  if (p > kDenseThreshold) {
    for (OfflineId u = 0; u < n; ++u) {
      if (rng.bernoulli(p)) add(u);
    }
    return;
  }
  const double log1m_p = std::log1p(-p);
  std::uint64_t next = rng.geometric_failures(log1m_p);
  while (next < static_cast<std::uint64_t>(n)) {
    add(static_cast<OfflineId>(next));
    const std::uint64_t gap = rng.geometric_failures(log1m_p);
    if (gap >= static_cast<std::uint64_t>(n)) break;
    next += gap + 1;
  }
}

TypeGraph draw_graph(const ModelParams& params, std::uint64_t key, Weight range) {
  const int n = params.n();
  TypeGraph graph(n, n, params.weight_range().has_value());
  const double p = params.p();
  for (TypeId t = 0; t < n; ++t) {
    Rng rng(derive_stream(key, static_cast<std::uint64_t>(t)));
    draw_row(graph, t, n, p, range, rng);
  }
  return graph;
}

ArrivalSequence consecutive_from_counts(std::vector<int> counts, ArrivalModel model) {
  ArrivalSequence seq;
  std::size_t total = 0;
  for (int z : counts) total += static_cast<std::size_t>(z);
  seq.arrivals.reserve(total);
  for (std::size_t t = 0; t < counts.size(); ++t) {
    seq.arrivals.insert(seq.arrivals.end(), static_cast<std::size_t>(counts[t]),
                        static_cast<TypeId>(t));
  }
  seq.counts = std::move(counts);
  seq.model = model;
  return seq;
}

}  // namespace

TypeGraph gen_gnnp(const ModelParams& params, std::uint64_t key) {
  return draw_graph(params, key, 1);
}

TypeGraph gen_gnnpR(const ModelParams& params, std::uint64_t key) {
  if (!params.weight_range()) throw ValidationError("gen_gnnpR requires a weight range R");
  return draw_graph(params, key, *params.weight_range());
}

TypeGraph gen_type_graph(const ModelParams& params, std::uint64_t key) {
  return params.weight_range() ? gen_gnnpR(params, key) : gen_gnnp(params, key);
}

std::pair<TypeGraph, ArrivalSequence> sample_rtpam(const ModelParams& params, std::uint64_t key,
                                                   RtpamView view) {
  const std::uint64_t graph_key = sub_stream(key, StreamTag::kTypeGraph);
  if (view == RtpamView::kTwoStep) {
    TypeGraph graph = gen_type_graph(params, graph_key);
    ArrivalSequence seq = sample_rtpam_counts(graph, sub_stream(key, StreamTag::kCounts));
    return {std::move(graph), std::move(seq)};
  }

  const int n = params.n();
  const Weight range = params.weight_range().value_or(1);
  TypeGraph graph(n, n, params.weight_range().has_value());
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  const double p = params.p();
  for (TypeId t = 0; t < n; ++t) {
    Rng rng(derive_stream(graph_key, static_cast<std::uint64_t>(t)));
    draw_row(graph, t, n, p, range, rng);
    counts[static_cast<std::size_t>(t)] = static_cast<int>(rng.poisson(1.0));
  }
  ArrivalSequence seq = consecutive_from_counts(std::move(counts), ArrivalModel::kRtpamOneStep);
  return {std::move(graph), std::move(seq)};
}

ArrivalSequence sample_rtpam_counts(const TypeGraph& graph, std::uint64_t key) {
  Rng rng(key);
  std::vector<int> counts(static_cast<std::size_t>(graph.num_types()));
  for (auto& z : counts) z = static_cast<int>(rng.poisson(1.0));
  return consecutive_from_counts(std::move(counts), ArrivalModel::kRtpamTwoStep);
}

ArrivalSequence permute_counts(std::span<const int> counts, std::uint64_t key) {
  ArrivalSequence seq =
      consecutive_from_counts(std::vector<int>(counts.begin(), counts.end()), ArrivalModel::kRtpamThreeStep);
  Rng rng(key);
  rng.shuffle(std::span<TypeId>(seq.arrivals));
  return seq;
}

ArrivalSequence sample_rtpam_threestep(const TypeGraph& graph, std::uint64_t key) {
  const ArrivalSequence two_step = sample_rtpam_counts(graph, sub_stream(key, StreamTag::kCounts));
  return permute_counts(two_step.counts, sub_stream(key, StreamTag::kOrder));
}

ArrivalSequence sample_known_iid(const TypeGraph& graph, std::int64_t m, std::uint64_t key) {
  if (m < 0) throw ValidationError("number of arrivals must be >= 0");
  if (graph.num_types() < 1) throw ValidationError("known i.i.d. model needs at least one type");
  Rng rng(key);
  const auto types = static_cast<std::uint64_t>(graph.num_types());
  std::vector<TypeId> arrivals(static_cast<std::size_t>(m));
  for (auto& t : arrivals) t = static_cast<TypeId>(rng.below(types));
  return ArrivalSequence::from_list(std::move(arrivals), graph.num_types(), ArrivalModel::kKnownIid);
}

ArrivalSequence sample_poisson_arrivals(const TypeGraph& graph, std::uint64_t key) {
  Rng total_rng(sub_stream(key, StreamTag::kTotal));
  const auto total = static_cast<std::int64_t>(total_rng.poisson(static_cast<double>(graph.num_types())));
  if (graph.num_types() == 0) return ArrivalSequence::from_list({}, 0, ArrivalModel::kPoissonArrivals);
  ArrivalSequence seq = sample_known_iid(graph, total, sub_stream(key, StreamTag::kArrivals));
  seq.model = ArrivalModel::kPoissonArrivals;
  return seq;
}

ArrivalSequence sequential_arrivals(const TypeGraph& graph) {
  std::vector<TypeId> arrivals(static_cast<std::size_t>(graph.num_types()));
  std::iota(arrivals.begin(), arrivals.end(), 0);
  return ArrivalSequence::from_list(std::move(arrivals), graph.num_types(), ArrivalModel::kOnline);
}

}  // namespace matchlab
