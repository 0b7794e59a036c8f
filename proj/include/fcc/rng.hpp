#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fcc {

/// SplitMix64 finalizer; the mixing step behind seed derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based seed splitting: every sub-algorithm derives its own seed
/// from the run seed, a stable tag and an index, so substreams stay
/// independent and reproducible no matter the order they are requested in.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index = 0) noexcept;

/// SplitMix64 stream. Eight bytes of state keep per-call construction cheap,
/// which matters because every ClusterFitting call seeds its own generator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() noexcept {
    const result_type out = mix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
  }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(*this);
  }
  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(*this); }
  bool bernoulli(double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return uniform01() < p;
  }

 private:
  std::uint64_t state_;
};

}  // namespace fcc
