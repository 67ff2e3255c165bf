#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <vector>

#include "pfi/coefficient.hpp"

namespace pfi {

/// Dense matrix of constant coefficients, row-major.
class CoeffMatrix {
 public:
  CoeffMatrix(std::size_t rows, std::size_t cols, Mode mode);
  /// Rows of integers, e.g. {{1, 1}, {0, 1}}.
  CoeffMatrix(std::initializer_list<std::initializer_list<long>> rows, Mode mode);

  static CoeffMatrix identity(std::size_t n, Mode mode);
  /// a (+) b (+) ... as a block-diagonal matrix.
  static CoeffMatrix block_diagonal(std::initializer_list<const CoeffMatrix*> blocks);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Mode mode() const { return mode_; }
  bool is_square() const { return rows_ == cols_; }

  Coefficient& operator()(std::size_t r, std::size_t c) { return data_.at(r * cols_ + c); }
  const Coefficient& operator()(std::size_t r, std::size_t c) const { return data_.at(r * cols_ + c); }

  CoeffMatrix transpose() const;
  CoeffMatrix to_float() const;

  Coefficient determinant() const;
  /// nullopt for a singular matrix (Float: pivot below 1e-12 * scale).
  std::optional<CoeffMatrix> inverse() const;

  friend CoeffMatrix operator*(const CoeffMatrix& a, const CoeffMatrix& b);
  friend bool operator==(const CoeffMatrix& a, const CoeffMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  Mode mode_;
  std::vector<Coefficient> data_;
};

}  // namespace pfi
