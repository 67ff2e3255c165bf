#include "pfi/matrix.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace pfi {

CoeffMatrix::CoeffMatrix(std::size_t rows, std::size_t cols, Mode mode)
    : rows_(rows), cols_(cols), mode_(mode), data_(rows * cols, Coefficient::zero(mode)) {}

CoeffMatrix::CoeffMatrix(std::initializer_list<std::initializer_list<long>> rows, Mode mode)
    : CoeffMatrix(rows.size(), rows.size() == 0 ? 0 : rows.begin()->size(), mode) {
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != cols_) throw std::invalid_argument("ragged matrix literal");
    std::size_t c = 0;
    for (long v : row) (*this)(r, c++) = Coefficient::integer(v, mode);
    ++r;
  }
}

CoeffMatrix CoeffMatrix::identity(std::size_t n, Mode mode) {
  CoeffMatrix out(n, n, mode);
  for (std::size_t k = 0; k < n; ++k) out(k, k) = Coefficient::one(mode);
  return out;
}

CoeffMatrix CoeffMatrix::block_diagonal(std::initializer_list<const CoeffMatrix*> blocks) {
  std::size_t rows = 0, cols = 0;
  Mode mode = Mode::Exact;
  bool first = true;
  for (const auto* b : blocks) {
    if (first) mode = b->mode();
    if (b->mode() != mode) throw ModeMismatch("block_diagonal: blocks differ in mode");
    first = false;
    rows += b->rows();
    cols += b->cols();
  }
  CoeffMatrix out(rows, cols, mode);
  std::size_t r0 = 0, c0 = 0;
  for (const auto* b : blocks) {
    for (std::size_t r = 0; r < b->rows(); ++r)
      for (std::size_t c = 0; c < b->cols(); ++c) out(r0 + r, c0 + c) = (*b)(r, c);
    r0 += b->rows();
    c0 += b->cols();
  }
  return out;
}

CoeffMatrix CoeffMatrix::transpose() const {
  CoeffMatrix out(cols_, rows_, mode_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

CoeffMatrix CoeffMatrix::to_float() const {
  CoeffMatrix out(rows_, cols_, Mode::Float);
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k].to_float();
  return out;
}

CoeffMatrix operator*(const CoeffMatrix& a, const CoeffMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product: shape mismatch");
  if (a.mode_ != b.mode_) throw ModeMismatch("matrix product: mode mismatch");
  CoeffMatrix out(a.rows_, b.cols_, a.mode_);
  for (std::size_t r = 0; r < a.rows_; ++r)
    for (std::size_t c = 0; c < b.cols_; ++c) {
      Coefficient sum = Coefficient::zero(a.mode_);
      for (std::size_t k = 0; k < a.cols_; ++k) sum += a(r, k) * b(k, c);
      out(r, c) = sum;
    }
  return out;
}

namespace {

// Gauss-Jordan reduction of `work` to diagonal form; returns the determinant.
// `aug` receives the same row operations.
Coefficient eliminate(CoeffMatrix& work, CoeffMatrix* aug, bool& singular) {
  const std::size_t n = work.rows();
  const Mode mode = work.mode();
  Coefficient det = Coefficient::one(mode);
  singular = false;
  double scale = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, work(r, c).magnitude());

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    double best = 0.0;
    for (std::size_t r = col; r < n; ++r) {
      if (work(r, col).is_zero()) continue;
      if (mode == Mode::Exact) {
        pivot = r;
        break;
      }
      if (work(r, col).magnitude() > best) {
        best = work(r, col).magnitude();
        pivot = r;
      }
    }
    if (pivot == n || (mode == Mode::Float && best <= 1e-12 * std::max(1.0, scale))) {
      singular = true;
      return Coefficient::zero(mode);
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(work(pivot, c), work(col, c));
      if (aug)
        for (std::size_t c = 0; c < aug->cols(); ++c) std::swap((*aug)(pivot, c), (*aug)(col, c));
      det = -det;
    }
    const Coefficient p = work(col, col);
    det *= p;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || work(r, col).is_zero()) continue;
      const Coefficient f = work(r, col) / p;
      for (std::size_t c = 0; c < n; ++c) work(r, c) -= f * work(col, c);
      if (aug)
        for (std::size_t c = 0; c < aug->cols(); ++c) (*aug)(r, c) -= f * (*aug)(col, c);
    }
  }
  return det;
}

}  // namespace

Coefficient CoeffMatrix::determinant() const {
  if (!is_square()) throw std::invalid_argument("determinant of a non-square matrix");
  CoeffMatrix work = *this;
  bool singular = false;
  return eliminate(work, nullptr, singular);
}

std::optional<CoeffMatrix> CoeffMatrix::inverse() const {
  if (!is_square()) throw std::invalid_argument("inverse of a non-square matrix");
  CoeffMatrix work = *this;
  CoeffMatrix aug = identity(rows_, mode_);
  bool singular = false;
  eliminate(work, &aug, singular);
  if (singular) return std::nullopt;
  for (std::size_t r = 0; r < rows_; ++r) {
    const Coefficient p = work(r, r);
    for (std::size_t c = 0; c < cols_; ++c) aug(r, c) /= p;
  }
  return aug;
}

}  // namespace pfi
