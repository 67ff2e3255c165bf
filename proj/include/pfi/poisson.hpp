#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pfi/matrix.hpp"
#include "pfi/parse.hpp"
#include "pfi/polynomial.hpp"

namespace pfi {

/// Float-mode tolerance for identities that are exact in Exact mode.
inline constexpr double kFloatIdentityTolerance = 1e-9;

/// Polynomial vector field; component i is the time derivative of x_i.
using VectorField = std::vector<Polynomial>;

/// True iff p is the zero polynomial (Float: coefficients within tol).
bool vanishes(const Polynomial& p, double tol = kFloatIdentityTolerance);

/// Lie derivative sum_i f_i * d_i(F).
Polynomial lie_derivative(const VectorField& field, const Polynomial& f);

/// n x n polynomial matrix with J_ij = -J_ji and J_ii = 0.
class StructureMatrix {
 public:
  /// Throws std::invalid_argument when the grid is not square or not
  /// skew-symmetric. Float grids are accepted within tolerance and
  /// re-symmetrized from the upper triangle.
  explicit StructureMatrix(std::vector<std::vector<Polynomial>> rows);

  /// Builds from the strict upper triangle: upper[i] holds J_{i,i+1}..J_{i,n-1}.
  static StructureMatrix from_upper(std::size_t n, const std::vector<std::vector<Polynomial>>& upper,
                                    std::size_t nvars, Mode mode);

  std::size_t n() const { return rows_.size(); }
  std::size_t nvars() const { return rows_.front().front().nvars(); }
  Mode mode() const { return rows_.front().front().mode(); }
  const Polynomial& operator()(std::size_t i, std::size_t j) const { return rows_.at(i).at(j); }
  const std::vector<std::vector<Polynomial>>& rows() const { return rows_; }

  StructureMatrix to_float() const;
  std::optional<StructureMatrix> rationalized(double tol = kFloatIdentityTolerance) const;

  friend bool operator==(const StructureMatrix&, const StructureMatrix&) = default;

 private:
  std::vector<std::vector<Polynomial>> rows_;
};

/// Polynomial diffeomorphism stored with its explicit polynomial inverse.
/// forward(x) plays the role of y(x); inverse(y) of x(y).
class PolyMap {
 public:
  /// Verifies forward(inverse(y)) = y and inverse(forward(x)) = x
  /// (exactly, or within tolerance in Float mode); throws std::invalid_argument otherwise.
  PolyMap(std::vector<Polynomial> forward, std::vector<Polynomial> inverse);

  static PolyMap identity(std::size_t n, Mode mode);
  /// x -> A x with inverse A^-1 x; throws on a singular A.
  static PolyMap linear(const CoeffMatrix& a);

  std::size_t n() const { return forward_.size(); }
  Mode mode() const { return forward_.front().mode(); }
  const std::vector<Polynomial>& forward() const { return forward_; }
  const std::vector<Polynomial>& inverse() const { return inverse_; }

  /// next o this: first apply *this, then next.
  PolyMap then(const PolyMap& next) const;
  PolyMap to_float() const;

 private:
  std::vector<Polynomial> forward_;
  std::vector<Polynomial> inverse_;
};

/// Jacobian matrix d(polys_i)/d(x_j).
std::vector<std::vector<Polynomial>> jacobian(const std::vector<Polynomial>& polys);

/// x' = J(x) grad H(x) together with its declared Casimirs.
class PoissonSystem {
 public:
  /// Checks 2m+s = J.n = |vars| = nvars of H and Casimirs, and J grad D = 0
  /// for every declared Casimir D. Throws std::invalid_argument on failure.
  PoissonSystem(StructureMatrix structure, Polynomial hamiltonian, std::vector<Polynomial> casimirs,
                VarTable vars, std::size_t m, std::size_t s);

  const StructureMatrix& structure() const { return structure_; }
  const Polynomial& hamiltonian() const { return hamiltonian_; }
  const std::vector<Polynomial>& casimirs() const { return casimirs_; }
  const VarTable& vars() const { return vars_; }
  std::size_t m() const { return m_; }
  std::size_t s() const { return s_; }
  std::size_t n() const { return structure_.n(); }
  Mode mode() const { return structure_.mode(); }

  PoissonSystem to_float() const;
  std::optional<PoissonSystem> rationalized(double tol = kFloatIdentityTolerance) const;

 private:
  StructureMatrix structure_;
  Polynomial hamiltonian_;
  std::vector<Polynomial> casimirs_;
  VarTable vars_;
  std::size_t m_;
  std::size_t s_;
};

/// S_{2m} (+) O_s: blocks (O_m, I_m; -I_m, O_m) followed by s zero rows/columns.
StructureMatrix canonical_matrix(std::size_t m, std::size_t s, Mode mode = Mode::Exact);

struct JacobiViolation {
  std::size_t i, j, k;
  Polynomial residual;
};

struct JacobiReport {
  bool ok = true;
  std::vector<JacobiViolation> violations;
};

/// Cyclic sums sum_l (J_li d_l J_jk + J_lj d_l J_ki + J_lk d_l J_ij) over i<j<k.
JacobiReport check_jacobi(const StructureMatrix& j, double tol = kFloatIdentityTolerance);

/// Structure matrix after the change of variables y = map.forward(x),
/// written in the y coordinates.
StructureMatrix transform_structure(const StructureMatrix& j, const PolyMap& map);

/// J(x) = M(Phi(x)) S_{2m,s} M(Phi(x))^T with M the Jacobian of map.inverse.
StructureMatrix build_structure_from_diffeo(const PolyMap& map, std::size_t m, std::size_t s);

/// f_i = sum_j J_ij d_j H.
VectorField hamiltonian_vector_field(const StructureMatrix& j, const Polynomial& h);
VectorField hamiltonian_vector_field(const PoissonSystem& sys);

/// True iff every component of J grad D vanishes.
bool check_casimir(const StructureMatrix& j, const Polynomial& d, double tol = kFloatIdentityTolerance);

/// Largest numeric rank of J over `samples` random integer points in [-10,10]^n.
std::size_t generic_rank(const StructureMatrix& j, std::size_t samples = 8, std::uint64_t seed = 0);

}  // namespace pfi
