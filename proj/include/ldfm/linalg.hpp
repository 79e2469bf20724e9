#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ldfm {

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const double> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// LU factorization with partial pivoting, PA = LU. The determinant is kept
/// as (sign, log|det|) so large systems neither underflow nor overflow.
class LuDecomposition {
 public:
  /// `min_pivot`: any |pivot| below it marks the matrix singular.
  explicit LuDecomposition(Matrix a, double min_pivot = 1e-300);

  bool singular() const { return singular_; }
  int sign() const { return sign_; }
  double log_abs_det() const { return log_abs_det_; }

  /// Solves A x = b in place. Requires !singular().
  void solve(std::span<double> b) const;
  Matrix inverse() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  double log_abs_det_ = 0.0;
  bool singular_ = false;
};

}  // namespace ldfm
