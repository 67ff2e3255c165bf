#include "pfi/linalg.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/SVD>

namespace pfi::linalg {

namespace {

struct GaussianInteger {
  mpz_class re{0};
  mpz_class im{0};

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};

GaussianInteger mul(const GaussianInteger& a, const GaussianInteger& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

GaussianInteger sub(const GaussianInteger& a, const GaussianInteger& b) { return {a.re - b.re, a.im - b.im}; }

// Exact quotient in Z[i]; Bareiss guarantees divisibility.
GaussianInteger divide_exact(const GaussianInteger& a, const GaussianInteger& b) {
  const mpz_class norm = b.re * b.re + b.im * b.im;
  const mpz_class re = a.re * b.re + a.im * b.im;
  const mpz_class im = a.im * b.re - a.re * b.im;
  if (!mpz_divisible_p(re.get_mpz_t(), norm.get_mpz_t()) || !mpz_divisible_p(im.get_mpz_t(), norm.get_mpz_t()))
    throw std::logic_error("fraction-free elimination produced an inexact division");
  return {re / norm, im / norm};
}

std::vector<GaussianInteger> to_integer_row(const ExactVector& row) {
  mpz_class l = 1;
  for (const auto& g : row) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), g.re.get_den_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), g.im.get_den_mpz_t());
  }
  std::vector<GaussianInteger> out;
  out.reserve(row.size());
  for (const auto& g : row) {
    mpq_class re = g.re * l, im = g.im * l;
    out.push_back({re.get_num(), im.get_num()});
  }
  return out;
}

GaussianRational to_rational(const GaussianInteger& g) { return {mpq_class(g.re), mpq_class(g.im)}; }

GaussianRational q_mul(const GaussianRational& a, const GaussianRational& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

GaussianRational q_div(const GaussianRational& a, const GaussianRational& b) {
  const mpq_class norm = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / norm, (a.im * b.re - a.re * b.im) / norm};
}

}  // namespace

std::vector<ExactVector> exact_nullspace(const ExactMatrix& rows, std::size_t cols) {
  std::vector<std::vector<GaussianInteger>> m;
  m.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() != cols) throw std::invalid_argument("exact_nullspace: ragged matrix");
    m.push_back(to_integer_row(row));
  }

  std::vector<std::size_t> pivot_cols;
  GaussianInteger prev{1, 0};
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < m.size(); ++col) {
    std::size_t p = r;
    while (p < m.size() && m[p][col].is_zero()) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    const GaussianInteger& piv = m[r][col];
    for (std::size_t i = r + 1; i < m.size(); ++i) {
      const GaussianInteger lead = m[i][col];
      for (std::size_t j = col + 1; j < cols; ++j)
        m[i][j] = divide_exact(sub(mul(piv, m[i][j]), mul(lead, m[r][j])), prev);
      m[i][col] = GaussianInteger{};
    }
    prev = piv;
    pivot_cols.push_back(col);
    ++r;
  }

  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_cols) is_pivot[c] = true;

  std::vector<ExactVector> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    ExactVector x(cols);
    x[free] = GaussianRational{1, 0};
    for (std::size_t k = pivot_cols.size(); k-- > 0;) {
      const std::size_t pc = pivot_cols[k];
      GaussianRational acc{0, 0};
      for (std::size_t j = pc + 1; j < cols; ++j) {
        if (x[j].is_zero() || m[k][j].is_zero()) continue;
        const auto t = q_mul(to_rational(m[k][j]), x[j]);
        acc.re += t.re;
        acc.im += t.im;
      }
      auto v = q_div(acc, to_rational(m[k][pc]));
      x[pc] = {-v.re, -v.im};
    }
    basis.push_back(std::move(x));
  }
  return basis;
}

std::vector<Eigen::VectorXcd> float_nullspace(const Eigen::MatrixXcd& a, double tol) {
  const Eigen::Index n = a.cols();
  if (n == 0) return {};
  Eigen::MatrixXcd padded = a;
  if (a.rows() < n) {
    // JacobiSVD only returns min(rows, cols) singular values; pad with zero rows
    // so every right singular vector gets one.
    padded = Eigen::MatrixXcd::Zero(n, n);
    padded.topRows(a.rows()) = a;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(padded, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);

  std::vector<Eigen::Index> kernel_cols;
  for (Eigen::Index j = 0; j < n; ++j)
    if (sv(j) < cutoff) kernel_cols.push_back(j);
  if (kernel_cols.empty()) return {};

  // Rows of `basis` span the kernel; reduce to row-echelon form over the
  // coordinates (column pivoting with the largest entry).
  Eigen::MatrixXcd basis(static_cast<Eigen::Index>(kernel_cols.size()), n);
  for (std::size_t k = 0; k < kernel_cols.size(); ++k) basis.row(k) = svd.matrixV().col(kernel_cols[k]).transpose();

  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < n && row < basis.rows(); ++col) {
    Eigen::Index best = row;
    for (Eigen::Index r = row + 1; r < basis.rows(); ++r)
      if (std::abs(basis(r, col)) > std::abs(basis(best, col))) best = r;
    if (std::abs(basis(best, col)) < 1e-8) continue;
    basis.row(row).swap(basis.row(best));
    basis.row(row) /= basis(row, col);
    for (Eigen::Index r = 0; r < basis.rows(); ++r)
      if (r != row) basis.row(r) -= basis(r, col) * basis.row(row);
    ++row;
  }

  std::vector<Eigen::VectorXcd> out;
  for (Eigen::Index r = 0; r < row; ++r) out.emplace_back(basis.row(r).transpose());
  return out;
}

std::size_t numeric_rank(const Eigen::MatrixXcd& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > rel_tol * sv(0)) ++rank;
  return rank;
}

}  // namespace pfi::linalg
