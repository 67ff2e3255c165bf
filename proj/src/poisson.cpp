#include "pfi/poisson.hpp"

#include <random>
#include <string>

#include "pfi/linalg.hpp"

namespace pfi {

bool vanishes(const Polynomial& p, double tol) {
  if (p.mode() == Mode::Exact) return p.is_zero();
  return p.max_abs_coefficient() < tol;
}

Polynomial lie_derivative(const VectorField& field, const Polynomial& f) {
  if (field.size() != f.nvars()) throw std::invalid_argument("lie_derivative: field dimension does not match nvars");
  Polynomial out(f.nvars(), f.mode(), f.epsilon());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!f.depends_on(i) || field[i].is_zero()) continue;
    out += field[i] * diff(f, i);
  }
  return out;
}

// --------------------------------------------------------- StructureMatrix

StructureMatrix::StructureMatrix(std::vector<std::vector<Polynomial>> rows) : rows_(std::move(rows)) {
  const std::size_t n = rows_.size();
  if (n == 0) throw std::invalid_argument("structure matrix must be non-empty");
  const std::size_t nvars = rows_[0].empty() ? 0 : rows_[0][0].nvars();
  const Mode mode = rows_[0].empty() ? Mode::Exact : rows_[0][0].mode();
  for (const auto& row : rows_) {
    if (row.size() != n) throw std::invalid_argument("structure matrix must be square");
    for (const auto& e : row) {
      if (e.nvars() != nvars) throw std::invalid_argument("structure matrix entries differ in nvars");
      if (e.mode() != mode) throw ModeMismatch("structure matrix entries differ in mode");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!vanishes(rows_[i][i])) throw std::invalid_argument("structure matrix has a nonzero diagonal entry J_" +
                                                             std::to_string(i + 1) + std::to_string(i + 1));
    rows_[i][i] = Polynomial(nvars, mode);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!vanishes(rows_[i][j] + rows_[j][i]))
        throw std::invalid_argument("structure matrix is not skew-symmetric at (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ")");
      if (mode == Mode::Float) rows_[j][i] = -rows_[i][j];
    }
  }
}

StructureMatrix StructureMatrix::from_upper(std::size_t n, const std::vector<std::vector<Polynomial>>& upper,
                                            std::size_t nvars, Mode mode) {
  if (upper.size() + 1 != n && !(n == 1 && upper.empty()))
    throw std::invalid_argument("upper-triangle grid must have n-1 rows");
  std::vector<std::vector<Polynomial>> rows(n, std::vector<Polynomial>(n, Polynomial(nvars, mode)));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (upper[i].size() != n - 1 - i)
      throw std::invalid_argument("upper-triangle row " + std::to_string(i + 1) + " must have " +
                                  std::to_string(n - 1 - i) + " entries");
    for (std::size_t j = i + 1; j < n; ++j) {
      rows[i][j] = upper[i][j - i - 1];
      rows[j][i] = -rows[i][j];
    }
  }
  return StructureMatrix(std::move(rows));
}

StructureMatrix StructureMatrix::to_float() const {
  auto rows = rows_;
  for (auto& row : rows)
    for (auto& e : row) e = pfi::to_float(e);
  return StructureMatrix(std::move(rows));
}

std::optional<StructureMatrix> StructureMatrix::rationalized(double tol) const {
  auto rows = rows_;
  for (auto& row : rows)
    for (auto& e : row) {
      auto r = rationalize(e, tol);
      if (!r) return std::nullopt;
      e = std::move(*r);
    }
  return StructureMatrix(std::move(rows));
}

// ------------------------------------------------------------------ PolyMap

namespace {

void check_identity(const std::vector<Polynomial>& outer, const std::vector<Polynomial>& inner, const char* what) {
  for (std::size_t k = 0; k < outer.size(); ++k) {
    const Polynomial round_trip = compose(outer[k], inner);
    const Polynomial expected = Polynomial::variable(outer.size(), k, outer[k].mode());
    if (!vanishes(round_trip - expected))
      throw std::invalid_argument(std::string("map inverse check failed: ") + what + " differs from identity in component " +
                                  std::to_string(k + 1));
  }
}

std::vector<Polynomial> linear_components(const CoeffMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<Polynomial> out;
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial p(n, a.mode());
    for (std::size_t j = 0; j < n; ++j) p.add_term(Monomial::variable(n, j), a(i, j));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

PolyMap::PolyMap(std::vector<Polynomial> forward, std::vector<Polynomial> inverse)
    : forward_(std::move(forward)), inverse_(std::move(inverse)) {
  const std::size_t n = forward_.size();
  if (n == 0) throw std::invalid_argument("map must have at least one component");
  if (inverse_.size() != n) throw std::invalid_argument("forward and inverse maps differ in length");
  for (const auto* side : {&forward_, &inverse_})
    for (const auto& p : *side) {
      if (p.nvars() != n) throw std::invalid_argument("map component nvars must equal the map dimension");
      if (p.mode() != forward_.front().mode()) throw ModeMismatch("map components differ in mode");
    }
  check_identity(forward_, inverse_, "forward(inverse(y))");
  check_identity(inverse_, forward_, "inverse(forward(x))");
}

PolyMap PolyMap::identity(std::size_t n, Mode mode) {
  std::vector<Polynomial> id;
  for (std::size_t k = 0; k < n; ++k) id.push_back(Polynomial::variable(n, k, mode));
  return PolyMap(id, id);
}

PolyMap PolyMap::linear(const CoeffMatrix& a) {
  if (!a.is_square()) throw std::invalid_argument("linear map needs a square matrix");
  auto inv = a.inverse();
  if (!inv) throw std::invalid_argument("linear map matrix is singular");
  return PolyMap(linear_components(a), linear_components(*inv));
}

PolyMap PolyMap::then(const PolyMap& next) const {
  if (next.n() != n()) throw std::invalid_argument("map composition: dimension mismatch");
  std::vector<Polynomial> fwd, inv;
  for (const auto& p : next.forward_) fwd.push_back(compose(p, forward_));
  for (const auto& p : inverse_) inv.push_back(compose(p, next.inverse_));
  return PolyMap(std::move(fwd), std::move(inv));
}

PolyMap PolyMap::to_float() const {
  std::vector<Polynomial> fwd, inv;
  for (const auto& p : forward_) fwd.push_back(pfi::to_float(p));
  for (const auto& p : inverse_) inv.push_back(pfi::to_float(p));
  return PolyMap(std::move(fwd), std::move(inv));
}

std::vector<std::vector<Polynomial>> jacobian(const std::vector<Polynomial>& polys) {
  std::vector<std::vector<Polynomial>> jac;
  for (const auto& p : polys) {
    std::vector<Polynomial> row;
    for (std::size_t j = 0; j < p.nvars(); ++j) row.push_back(diff(p, j));
    jac.push_back(std::move(row));
  }
  return jac;
}

// ------------------------------------------------------------ PoissonSystem

PoissonSystem::PoissonSystem(StructureMatrix structure, Polynomial hamiltonian, std::vector<Polynomial> casimirs,
                             VarTable vars, std::size_t m, std::size_t s)
    : structure_(std::move(structure)),
      hamiltonian_(std::move(hamiltonian)),
      casimirs_(std::move(casimirs)),
      vars_(std::move(vars)),
      m_(m),
      s_(s) {
  const std::size_t n = structure_.n();
  if (2 * m_ + s_ != n)
    throw std::invalid_argument("dimension mismatch: 2m+s = " + std::to_string(2 * m_ + s_) + " but J is " +
                                std::to_string(n) + "x" + std::to_string(n));
  if (vars_.size() != n) throw std::invalid_argument("variable table size differs from J dimension");
  if (structure_.nvars() != n) throw std::invalid_argument("J entries must be polynomials in the n coordinates");
  if (hamiltonian_.nvars() != n) throw std::invalid_argument("Hamiltonian nvars differs from J dimension");
  if (hamiltonian_.mode() != structure_.mode()) throw ModeMismatch("Hamiltonian mode differs from J mode");
  for (std::size_t k = 0; k < casimirs_.size(); ++k) {
    const auto& d = casimirs_[k];
    if (d.nvars() != n) throw std::invalid_argument("Casimir nvars differs from J dimension");
    if (d.mode() != structure_.mode()) throw ModeMismatch("Casimir mode differs from J mode");
    if (!check_casimir(structure_, d))
      throw std::invalid_argument("declared Casimir " + std::to_string(k + 1) + " does not satisfy J grad D = 0");
  }
}

PoissonSystem PoissonSystem::to_float() const {
  std::vector<Polynomial> cas;
  for (const auto& d : casimirs_) cas.push_back(pfi::to_float(d));
  return PoissonSystem(structure_.to_float(), pfi::to_float(hamiltonian_), std::move(cas), vars_, m_, s_);
}

std::optional<PoissonSystem> PoissonSystem::rationalized(double tol) const {
  auto j = structure_.rationalized(tol);
  auto h = rationalize(hamiltonian_, tol);
  if (!j || !h) return std::nullopt;
  std::vector<Polynomial> cas;
  for (const auto& d : casimirs_) {
    auto r = rationalize(d, tol);
    if (!r) return std::nullopt;
    cas.push_back(std::move(*r));
  }
  return PoissonSystem(std::move(*j), std::move(*h), std::move(cas), vars_, m_, s_);
}

// --------------------------------------------------------------- operations

StructureMatrix canonical_matrix(std::size_t m, std::size_t s, Mode mode) {
  if (m == 0) throw std::invalid_argument("canonical_matrix: m must be >= 1");
  const std::size_t n = 2 * m + s;
  std::vector<std::vector<Polynomial>> rows(n, std::vector<Polynomial>(n, Polynomial(n, mode)));
  for (std::size_t k = 0; k < m; ++k) {
    rows[k][m + k] = Polynomial::constant(n, Coefficient::one(mode));
    rows[m + k][k] = Polynomial::constant(n, -Coefficient::one(mode));
  }
  return StructureMatrix(std::move(rows));
}

JacobiReport check_jacobi(const StructureMatrix& j, double tol) {
  const std::size_t n = j.n();
  if (j.nvars() != n) throw std::invalid_argument("check_jacobi: entries must be polynomials in the n coordinates");
  // grads[a][b] = d_l J_ab for every l, computed once.
  std::vector<std::vector<std::vector<Polynomial>>> grads(n, std::vector<std::vector<Polynomial>>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t l = 0; l < n; ++l) grads[a][b].push_back(diff(j(a, b), l));

  JacobiReport report;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        Polynomial sum(j.nvars(), j.mode());
        for (std::size_t l = 0; l < n; ++l) {
          sum += j(l, a) * grads[b][c][l];
          sum += j(l, b) * grads[c][a][l];
          sum += j(l, c) * grads[a][b][l];
        }
        if (!vanishes(sum, tol)) {
          report.ok = false;
          report.violations.push_back({a, b, c, std::move(sum)});
        }
      }
  return report;
}

namespace {

// out = A * B * A^T for polynomial A and constant/polynomial B.
std::vector<std::vector<Polynomial>> congruence(const std::vector<std::vector<Polynomial>>& a,
                                                const StructureMatrix& b) {
  const std::size_t n = a.size();
  const std::size_t nvars = a[0][0].nvars();
  const Mode mode = a[0][0].mode();
  // t = A * B
  std::vector<std::vector<Polynomial>> t(n, std::vector<Polynomial>(n, Polynomial(nvars, mode)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t l = 0; l < n; ++l)
        if (!b(k, l).is_zero()) t[i][l] += a[i][k] * b(k, l);
    }
  std::vector<std::vector<Polynomial>> out(n, std::vector<Polynomial>(n, Polynomial(nvars, mode)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l)
        if (!t[i][l].is_zero() && !a[j][l].is_zero()) out[i][j] += t[i][l] * a[j][l];
  return out;
}

}  // namespace

StructureMatrix transform_structure(const StructureMatrix& j, const PolyMap& map) {
  if (map.n() != j.n() || j.nvars() != j.n()) throw std::invalid_argument("transform_structure: dimension mismatch");
  if (map.mode() != j.mode()) throw ModeMismatch("transform_structure: mode mismatch");
  auto in_x = congruence(jacobian(map.forward()), j);
  for (auto& row : in_x)
    for (auto& e : row) e = compose(e, map.inverse());
  return StructureMatrix(std::move(in_x));
}

StructureMatrix build_structure_from_diffeo(const PolyMap& map, std::size_t m, std::size_t s) {
  if (map.n() != 2 * m + s)
    throw std::invalid_argument("build_structure_from_diffeo: map dimension " + std::to_string(map.n()) +
                                " differs from 2m+s = " + std::to_string(2 * m + s));
  auto in_y = congruence(jacobian(map.inverse()), canonical_matrix(m, s, map.mode()));
  for (auto& row : in_y)
    for (auto& e : row) e = compose(e, map.forward());
  return StructureMatrix(std::move(in_y));
}

VectorField hamiltonian_vector_field(const StructureMatrix& j, const Polynomial& h) {
  if (h.nvars() != j.nvars() || j.n() != h.nvars())
    throw std::invalid_argument("hamiltonian_vector_field: dimension mismatch");
  std::vector<Polynomial> grad;
  for (std::size_t k = 0; k < h.nvars(); ++k) grad.push_back(diff(h, k));
  VectorField f;
  for (std::size_t i = 0; i < j.n(); ++i) {
    Polynomial fi(h.nvars(), h.mode(), h.epsilon());
    for (std::size_t k = 0; k < j.n(); ++k)
      if (!j(i, k).is_zero() && !grad[k].is_zero()) fi += j(i, k) * grad[k];
    f.push_back(std::move(fi));
  }
  return f;
}

VectorField hamiltonian_vector_field(const PoissonSystem& sys) {
  return hamiltonian_vector_field(sys.structure(), sys.hamiltonian());
}

bool check_casimir(const StructureMatrix& j, const Polynomial& d, double tol) {
  for (const auto& component : hamiltonian_vector_field(j, d))
    if (!vanishes(component, tol)) return false;
  return true;
}

std::size_t generic_rank(const StructureMatrix& j, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("generic_rank: samples must be >= 1");
  const std::size_t n = j.n();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(-10, 10);
  std::size_t best = 0;
  std::size_t taken = 0;
  for (std::size_t attempt = 0; taken < samples && attempt < 64 * samples; ++attempt) {
    std::vector<std::complex<double>> point(j.nvars());
    for (auto& v : point) v = coord(rng);
    Eigen::MatrixXcd values(n, n);
    bool all_zero = true;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        values(a, b) = eval_complex(j(a, b), point);
        if (values(a, b) != 0.0) all_zero = false;
      }
    if (all_zero) continue;
    ++taken;
    best = std::max(best, linalg::numeric_rank(values));
  }
  return best;
}

}  // namespace pfi
