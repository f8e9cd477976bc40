#include "matchlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matchlab/error.hpp"
#include "matchlab/format.hpp"

namespace matchlab {

TypeGraph::TypeGraph(int n_offline, int num_types, bool weighted)
    : n_offline_(n_offline), weighted_(weighted), adjacency_(static_cast<std::size_t>(num_types)) {
  if (n_offline < 0 || num_types < 0) throw ValidationError("negative graph size");
}

void TypeGraph::add_edge(TypeId type, OfflineId offline, Weight weight) {
  adjacency_.at(type).push_back({offline, weight});
}

void TypeGraph::normalize() {
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.offline < b.offline; });
  }
}

std::optional<Weight> TypeGraph::weight(OfflineId offline, TypeId type) const {
  const auto& list = adjacency_.at(type);
  auto it = std::lower_bound(list.begin(), list.end(), offline,
                             [](const Neighbor& nb, OfflineId id) { return nb.offline < id; });
  if (it == list.end() || it->offline != offline) return std::nullopt;
  return it->weight;
}

std::int64_t TypeGraph::edge_count() const noexcept {
  std::int64_t total = 0;
  for (const auto& list : adjacency_) total += static_cast<std::int64_t>(list.size());
  return total;
}

std::vector<int> TypeGraph::offline_degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n_offline_), 0);
  for (const auto& list : adjacency_) {
    for (const auto& nb : list) ++deg[static_cast<std::size_t>(nb.offline)];
  }
  return deg;
}

void TypeGraph::validate() const {
  for (std::size_t t = 0; t < adjacency_.size(); ++t) {
    const auto& list = adjacency_[t];
    for (std::size_t k = 0; k < list.size(); ++k) {
      const auto& nb = list[k];
      if (nb.offline < 0 || nb.offline >= n_offline_) {
        throw ValidationError("type " + std::to_string(t) + ": neighbor " +
                              std::to_string(nb.offline) + " out of range");
      }
      if (nb.weight < 1) {
        throw ValidationError("type " + std::to_string(t) + ": weight " +
                              std::to_string(nb.weight) + " < 1");
      }
      if (k > 0 && list[k - 1].offline >= nb.offline) {
        throw ValidationError("type " + std::to_string(t) +
                              ": neighbor list not strictly increasing (duplicate or unsorted)");
      }
    }
  }
}

namespace {
constexpr std::pair<ArrivalModel, std::string_view> kModelNames[] = {
    {ArrivalModel::kExplicit, "explicit"},
    {ArrivalModel::kOnline, "online"},
    {ArrivalModel::kRtpamOneStep, "rtpam-one-step"},
    {ArrivalModel::kRtpamTwoStep, "rtpam-two-step"},
    {ArrivalModel::kRtpamThreeStep, "rtpam-three-step"},
    {ArrivalModel::kKnownIid, "known-iid"},
    {ArrivalModel::kPoissonArrivals, "poisson-arrivals"},
};
}  // namespace

std::string_view to_string(ArrivalModel model) noexcept {
  for (const auto& [m, name] : kModelNames) {
    if (m == model) return name;
  }
  return "explicit";
}

ArrivalModel arrival_model_from_string(std::string_view name) {
  for (const auto& [m, n] : kModelNames) {
    if (n == name) return m;
  }
  throw ValidationError("unknown arrival model '" + std::string(name) + "'");
}

bool is_consecutive(ArrivalModel model) noexcept {
  return model == ArrivalModel::kRtpamOneStep || model == ArrivalModel::kRtpamTwoStep ||
         model == ArrivalModel::kOnline;
}

ArrivalSequence ArrivalSequence::from_list(std::vector<TypeId> arrivals, int num_types,
                                           ArrivalModel model) {
  ArrivalSequence seq;
  seq.counts.assign(static_cast<std::size_t>(num_types), 0);
  for (TypeId t : arrivals) {
    if (t < 0 || t >= num_types) {
      throw ValidationError("arrival type " + std::to_string(t) + " out of range");
    }
    ++seq.counts[static_cast<std::size_t>(t)];
  }
  seq.arrivals = std::move(arrivals);
  seq.model = model;
  return seq;
}

bool ArrivalSequence::consistent() const {
  std::vector<int> recount(counts.size(), 0);
  for (TypeId t : arrivals) {
    if (t < 0 || static_cast<std::size_t>(t) >= counts.size()) return false;
    ++recount[static_cast<std::size_t>(t)];
  }
  if (recount != counts) return false;
  if (is_consecutive(model)) {
    std::vector<bool> closed(counts.size(), false);
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
      const auto t = static_cast<std::size_t>(arrivals[i]);
      if (closed[t]) return false;
      if (i + 1 == arrivals.size() || arrivals[i + 1] != arrivals[i]) closed[t] = true;
    }
  }
  return true;
}

ModelParams ModelParams::with_p(int n, double p, std::optional<Weight> weight_range) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
  if (weight_range && *weight_range < 1) throw ValidationError("R must be >= 1");
  return ModelParams(n, {Density::Kind::kProbability, p}, weight_range);
}

ModelParams ModelParams::with_c(int n, double c, std::optional<Weight> weight_range) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("c must be >= 0");
  if (c / n > 1.0) throw ValidationError("c/n must be <= 1");
  if (weight_range && *weight_range < 1) throw ValidationError("R must be >= 1");
  return ModelParams(n, {Density::Kind::kScaled, c}, weight_range);
}

double ModelParams::p() const noexcept {
  return density_.kind == Density::Kind::kProbability ? density_.value
                                                      : density_.value / static_cast<double>(n_);
}

double ModelParams::c() const noexcept {
  return density_.kind == Density::Kind::kScaled ? density_.value
                                                 : density_.value * static_cast<double>(n_);
}

std::string ModelParams::describe() const {
  std::string out = density_.kind == Density::Kind::kProbability ? "p=" : "c=";
  out += format_double(density_.value);
  if (weight_range_) out += ",R=" + std::to_string(*weight_range_);
  return out;
}

}  // namespace matchlab
