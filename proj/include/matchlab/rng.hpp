#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace matchlab {

/// SplitMix64 output finalizer. Also used to derive child stream keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key of the child stream `index` under `parent`.
constexpr std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(parent ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

/// Master seed of an experiment.
///
/// Every random quantity is drawn from a stream whose key is derived from
/// the master value and a path of indices (trial, purpose, type), so results
/// never depend on thread count or on the order in which trials execute.
struct Seed {
  std::uint64_t master = 0;

  std::uint64_t trial_key(std::uint64_t trial_index) const noexcept {
    return derive_stream(master, trial_index);
  }
};

/// Purpose tags for sub-streams within one trial.
enum class StreamTag : std::uint64_t {
  kTypeGraph = 1,
  kCounts = 2,
  kOrder = 3,
  kArrivals = 4,
  kTotal = 5,
};

constexpr std::uint64_t sub_stream(std::uint64_t key, StreamTag tag) noexcept {
  return derive_stream(key, static_cast<std::uint64_t>(tag));
}

/// SplitMix64: a counter-based 64-bit generator. Satisfies
/// UniformRandomBitGenerator, but callers should use the member
/// distributions, which are bit-reproducible across platforms.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t key) noexcept : state_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1].
  double uniform_pos() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound), unbiased (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) noexcept;

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  /// Exponential with rate 1.
  double exponential() noexcept;

  /// Poisson(lambda). Inversion by sequential search for lambda <= 10,
  /// PTRS transformed rejection (Hormann 1993) above.
  std::uint64_t poisson(double lambda) noexcept;

  /// Number of failures before the first success of Bernoulli(p), 0 < p < 1,
  /// given log1p(-p).
  std::uint64_t geometric_failures(double log1m_p) noexcept;

  /// Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t poisson_inversion(double lambda) noexcept;
  std::uint64_t poisson_ptrs(double lambda) noexcept;

  std::uint64_t state_;
};

}  // namespace matchlab
