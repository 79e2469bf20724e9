#include "ldfm/linalg.hpp"

#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace ldfm {

LuDecomposition::LuDecomposition(Matrix a, double min_pivot)
    : lu_(std::move(a)), perm_(lu_.rows()) {
  if (lu_.rows() != lu_.cols()) throw std::invalid_argument("LU requires a square matrix");
  const std::size_t n = lu_.rows();
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    double best_abs = std::abs(lu_(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      const double v = std::abs(lu_(r, k));
      if (v > best_abs) {
        best = r;
        best_abs = v;
      }
    }
    if (!(best_abs >= min_pivot)) {
      singular_ = true;
      return;
    }
    if (best != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(best, c));
      std::swap(perm_[k], perm_[best]);
      sign_ = -sign_;
    }
    const double pivot = lu_(k, k);
    if (pivot < 0) sign_ = -sign_;
    log_abs_det_ += std::log(best_abs);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double factor = lu_(r, k) / pivot;
      lu_(r, k) = factor;
      if (factor == 0.0) continue;
      for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= factor * lu_(k, c);
    }
  }
}

void LuDecomposition::solve(std::span<double> b) const {
  assert(!singular_);
  const std::size_t n = lu_.rows();
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    double s = b[perm_[r]];
    for (std::size_t c = 0; c < r; ++c) s -= lu_(r, c) * y[c];
    y[r] = s;
  }
  for (std::size_t r = n; r-- > 0;) {
    double s = y[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= lu_(r, c) * b[c];
    b[r] = s / lu_(r, r);
  }
}

Matrix LuDecomposition::inverse() const {
  const std::size_t n = lu_.rows();
  Matrix inv(n, n);
  std::vector<double> col(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(col.begin(), col.end(), 0.0);
    col[c] = 1.0;
    solve(col);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
  }
  return inv;
}

}  // namespace ldfm
