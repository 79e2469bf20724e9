#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace ldfm {

/// SplitMix64 finalizer; mixes (seed, stream) into an engine seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seedable 64-bit generator. Rng(seed, k) for distinct k gives independent
/// streams, so per-chain and per-instance randomness is reproducible no
/// matter how work is scheduled.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(derive_seed(seed, stream)) {}

  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  Rng split(std::uint64_t stream) { return Rng(engine_(), stream); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n). Requires n > 0.
  std::size_t below(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  /// Index drawn with probability proportional to exp(log_weights[k]).
  /// Returns log_weights.size() when every weight is -inf.
  std::size_t categorical_log(std::span<const double> log_weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ldfm
