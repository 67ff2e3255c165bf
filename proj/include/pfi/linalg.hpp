#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "pfi/coefficient.hpp"

namespace pfi::linalg {

using ExactMatrix = std::vector<std::vector<GaussianRational>>;
using ExactVector = std::vector<GaussianRational>;

/// Kernel basis of a matrix over Q(i).
///
/// Rows are scaled to Gaussian integers and reduced with fraction-free
/// (Bareiss) elimination over Z[i]; each basis vector has a 1 in its free
/// column and 0 in the other free columns.
std::vector<ExactVector> exact_nullspace(const ExactMatrix& rows, std::size_t cols);

/// Kernel basis from the right singular vectors whose singular value is below
/// tol * max(1, sigma_max). The basis is brought to reduced column-echelon
/// form, so rational kernels come back with (nearly) rational entries.
std::vector<Eigen::VectorXcd> float_nullspace(const Eigen::MatrixXcd& a, double tol = 1e-9);

/// Count of singular values above rel_tol * sigma_max.
std::size_t numeric_rank(const Eigen::MatrixXcd& a, double rel_tol = 1e-9);

}  // namespace pfi::linalg
