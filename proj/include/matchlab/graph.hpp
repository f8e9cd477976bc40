#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace matchlab {

using OfflineId = std::int32_t;
using TypeId = std::int32_t;
using Weight = std::int64_t;

/// One entry of a type's neighbor list.
struct Neighbor {
  OfflineId offline = 0;
  Weight weight = 1;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Bipartite type graph: offline nodes [0, n_offline) and online types
/// [0, num_types()), each type carrying a neighbor list sorted by offline id.
///
/// Unweighted graphs store weight 1 on every edge; `weighted()` only records
/// whether the weights were drawn from a range.
class TypeGraph {
 public:
  TypeGraph() = default;
  TypeGraph(int n_offline, int num_types, bool weighted = false);

  int n_offline() const noexcept { return n_offline_; }
  int num_types() const noexcept { return static_cast<int>(adjacency_.size()); }
  bool weighted() const noexcept { return weighted_; }
  void set_weighted(bool weighted) noexcept { weighted_ = weighted; }

  std::span<const Neighbor> neighbors(TypeId type) const { return adjacency_.at(type); }

  /// Appends an edge. Neighbor lists must be built in increasing offline order
  /// or normalized afterwards with `normalize()`.
  void add_edge(TypeId type, OfflineId offline, Weight weight = 1);

  /// Sorts neighbor lists by offline id.
  void normalize();

  /// Weight of edge (offline, type), or nullopt if absent. O(log degree).
  std::optional<Weight> weight(OfflineId offline, TypeId type) const;

  std::int64_t edge_count() const noexcept;
  int degree(TypeId type) const { return static_cast<int>(adjacency_.at(type).size()); }
  std::vector<int> offline_degrees() const;

  /// Checks ids in range, no duplicate neighbors, weights >= 1. Throws
  /// ValidationError with a description of the first violation.
  void validate() const;

  friend bool operator==(const TypeGraph&, const TypeGraph&) = default;

 private:
  int n_offline_ = 0;
  bool weighted_ = false;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Which generator produced an arrival sequence.
enum class ArrivalModel {
  kExplicit,
  kOnline,          // every type exactly once, in index order (online G_{n,n,p})
  kRtpamOneStep,
  kRtpamTwoStep,
  kRtpamThreeStep,
  kKnownIid,
  kPoissonArrivals,
};

std::string_view to_string(ArrivalModel model) noexcept;
ArrivalModel arrival_model_from_string(std::string_view name);

/// Whether all occurrences of each type are contiguous by construction.
bool is_consecutive(ArrivalModel model) noexcept;

/// Ordered online arrivals, each carrying a type id, plus per-type counts.
struct ArrivalSequence {
  std::vector<TypeId> arrivals;
  std::vector<int> counts;  // counts[type] = occurrences in `arrivals`
  ArrivalModel model = ArrivalModel::kExplicit;

  /// Builds counts from an explicit list over `num_types` types.
  static ArrivalSequence from_list(std::vector<TypeId> arrivals, int num_types,
                                   ArrivalModel model = ArrivalModel::kExplicit);

  std::size_t size() const noexcept { return arrivals.size(); }

  /// Counts agree with the list; ids in range; contiguity for consecutive models.
  bool consistent() const;

  friend bool operator==(const ArrivalSequence&, const ArrivalSequence&) = default;
};

/// Edge density either as a probability p or as c with p = c/n.
struct Density {
  enum class Kind { kProbability, kScaled };
  Kind kind = Kind::kProbability;
  double value = 0.0;
};

/// Parameters shared by every random model.
class ModelParams {
 public:
  /// Throws ValidationError unless n >= 1, p in [0,1], R >= 1 when present.
  static ModelParams with_p(int n, double p, std::optional<Weight> weight_range = std::nullopt);
  /// Throws ValidationError unless n >= 1, c >= 0, c/n <= 1, R >= 1 when present.
  static ModelParams with_c(int n, double c, std::optional<Weight> weight_range = std::nullopt);

  int n() const noexcept { return n_; }
  const Density& density() const noexcept { return density_; }
  std::optional<Weight> weight_range() const noexcept { return weight_range_; }

  /// Edge probability.
  double p() const noexcept;
  /// Expected degree scale c = p * n.
  double c() const noexcept;

  /// Compact token such as "p=0.5,R=10" or "c=1".
  std::string describe() const;

 private:
  ModelParams(int n, Density density, std::optional<Weight> weight_range)
      : n_(n), density_(density), weight_range_(weight_range) {}

  int n_;
  Density density_;
  std::optional<Weight> weight_range_;
};

}  // namespace matchlab
