#include "ldfm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ldfm {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t Rng::categorical_log(std::span<const double> log_weights) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (top == -std::numeric_limits<double>::infinity()) return log_weights.size();
  double total = 0.0;
  for (double lw : log_weights) total += std::exp(lw - top);
  double u = uniform() * total;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    const double w = std::exp(log_weights[k] - top);
    if (w <= 0.0) continue;
    last_positive = k;
    if (u < w) return k;
    u -= w;
  }
  return last_positive;
}

}  // namespace ldfm
