#include "pfi/darboux.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "pfi/linalg.hpp"

namespace pfi {

namespace {

void require_field(const VectorField& field, std::size_t nvars, const char* where) {
  if (field.size() != nvars)
    throw std::invalid_argument(std::string(where) + ": field has " + std::to_string(field.size()) +
                                " components for " + std::to_string(nvars) + " variables");
}

std::optional<VectorField> rationalize_field(const VectorField& field, double tol) {
  VectorField out;
  for (const auto& f : field) {
    auto r = rationalize(f, tol);
    if (!r) return std::nullopt;
    out.push_back(std::move(*r));
  }
  return out;
}

VectorField float_field(const VectorField& field) {
  VectorField out;
  for (const auto& f : field) out.push_back(f.mode() == Mode::Float ? f : to_float(f));
  return out;
}

// Exact witness for a Float candidate: rationalize F, K and the field and
// check X F = K F with zero residual.
std::optional<DarbouxCandidate> certify_exact(const VectorField& field, const Polynomial& f, const Polynomial& k,
                                              double tol) {
  auto ef = rationalize(f, tol);
  auto ek = rationalize(k, tol);
  auto efield = rationalize_field(field, tol);
  if (!ef || !ek || !efield) return std::nullopt;
  auto report = verify_candidate(*efield, *ef, *ek);
  if (!report.ok) return std::nullopt;
  return DarbouxCandidate{*ef, *ek, report.proper};
}

// Columns of the linear map F -> X F - K F in the monomial basis `cols`.
std::vector<Polynomial> operator_images(const VectorField& field, const Polynomial& k,
                                        const std::vector<Monomial>& cols) {
  std::vector<Polynomial> images;
  images.reserve(cols.size());
  const Coefficient one = Coefficient::one(k.mode());
  for (const auto& m : cols) {
    const auto mono = Polynomial::term(m, one);
    images.push_back(lie_derivative(field, mono) - k * mono);
  }
  return images;
}

std::map<Monomial, std::size_t, GradedLexGreater> row_index(const std::vector<Polynomial>& images) {
  std::map<Monomial, std::size_t, GradedLexGreater> rows;
  for (const auto& img : images)
    for (const auto& [m, c] : img.terms()) rows.emplace(m, 0);
  std::size_t r = 0;
  for (auto& [m, idx] : rows) idx = r++;
  return rows;
}

Polynomial from_vector(const std::vector<Monomial>& cols, const Eigen::VectorXcd& v, std::size_t nvars) {
  Polynomial p(nvars, Mode::Float);
  for (std::size_t j = 0; j < cols.size(); ++j)
    p.add_term(cols[j], Coefficient::floating(v(static_cast<Eigen::Index>(j))));
  return p;
}

// Zeroes real/imaginary parts below rel * |p|, then scales the leading
// coefficient to 1.
Polynomial clean_and_normalize(const Polynomial& p, double rel) {
  const double cutoff = rel * p.max_abs_coefficient();
  Polynomial cleaned(p.nvars(), Mode::Float);
  for (const auto& [m, c] : p.terms()) {
    auto z = c.to_complex();
    if (std::abs(z.real()) < cutoff) z.real(0.0);
    if (std::abs(z.imag()) < cutoff) z.imag(0.0);
    cleaned.add_term(m, Coefficient::floating(z));
  }
  if (cleaned.is_zero()) return cleaned;
  const Coefficient lead = cleaned.terms().begin()->second;
  return cleaned * (Coefficient::one(Mode::Float) / lead);
}

Polynomial clean(const Polynomial& p, double cutoff) {
  if (p.mode() == Mode::Exact) return p;
  Polynomial out(p.nvars(), Mode::Float);
  for (const auto& [m, c] : p.terms()) {
    auto z = c.to_complex();
    if (std::abs(z.real()) < cutoff) z.real(0.0);
    if (std::abs(z.imag()) < cutoff) z.imag(0.0);
    out.add_term(m, Coefficient::floating(z));
  }
  return out;
}

double float_distance(const Polynomial& a, const Polynomial& b) {
  const auto fa = a.mode() == Mode::Float ? a : to_float(a);
  const auto fb = b.mode() == Mode::Float ? b : to_float(b);
  if (fa.nvars() != fb.nvars()) return INFINITY;
  return (fa - fb).max_abs_coefficient();
}

}  // namespace

std::optional<Polynomial> cofactor_of(const VectorField& field, const Polynomial& f) {
  if (f.is_zero()) throw std::invalid_argument("cofactor_of: F is the zero polynomial");
  require_field(field, f.nvars(), "cofactor_of");
  return exact_divide(lie_derivative(field, f), f);
}

DarbouxReport verify_candidate(const VectorField& field, const Polynomial& f, const Polynomial& k, double tol) {
  require_field(field, f.nvars(), "verify_candidate");
  DarbouxReport report;
  report.residual = lie_derivative(field, f) - k * f;
  if (report.residual.mode() == Mode::Exact) {
    report.ok = report.residual.is_zero();
    report.proper = !f.is_constant() && !k.is_zero();
  } else {
    const double scale = std::max({1.0, f.max_abs_coefficient(), k.max_abs_coefficient()});
    report.ok = report.residual.max_abs_coefficient() < tol * scale;
    report.proper = !f.is_constant() && k.max_abs_coefficient() >= tol;
  }
  return report;
}

std::vector<Monomial> monomial_basis(std::size_t nvars, unsigned degree) {
  std::vector<Monomial> out;
  std::vector<Monomial::Exponent> exps(nvars, 0);
  // Enumerate exponent vectors with sum <= degree, odometer style.
  for (;;) {
    out.emplace_back(std::span<const Monomial::Exponent>(exps));
    std::size_t k = 0;
    for (; k < nvars; ++k) {
      unsigned sum = 0;
      for (auto e : exps) sum += e;
      if (sum < degree) {
        ++exps[k];
        break;
      }
      exps[k] = 0;
    }
    if (k == nvars) break;
  }
  std::sort(out.begin(), out.end(), GradedLexGreater{});
  return out;
}

std::uint64_t field_degree(const VectorField& field) {
  std::uint64_t d = 0;
  for (const auto& f : field) d = std::max(d, f.total_degree());
  return d;
}

std::vector<Polynomial> search_with_cofactor(const VectorField& field, const Polynomial& k, unsigned degree) {
  if (degree < 1) throw std::invalid_argument("search_with_cofactor: degree must be >= 1");
  const std::size_t n = k.nvars();
  require_field(field, n, "search_with_cofactor");
  for (const auto& f : field)
    if (f.mode() != k.mode()) throw ModeMismatch("search_with_cofactor: field and cofactor modes differ");

  std::vector<Polynomial> out;
  if (k.mode() == Mode::Exact) {
    // Ascending columns: each kernel vector is then supported on columns up
    // to its free column, which is its leading monomial with coefficient 1.
    auto cols = monomial_basis(n, degree);
    std::reverse(cols.begin(), cols.end());
    const auto images = operator_images(field, k, cols);
    const auto rows = row_index(images);
    linalg::ExactMatrix a(rows.size(), linalg::ExactVector(cols.size(), GaussianRational{0, 0}));
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (const auto& [m, c] : images[j].terms()) a[rows.at(m)][j] = c.exact_value();
    for (const auto& v : linalg::exact_nullspace(a, cols.size())) {
      Polynomial p(n, Mode::Exact);
      for (std::size_t j = 0; j < cols.size(); ++j)
        if (!v[j].is_zero()) p.add_term(cols[j], Coefficient::exact(v[j].re, v[j].im));
      out.push_back(p * (Coefficient::one(Mode::Exact) / p.terms().begin()->second));
    }
    return out;
  }

  const auto cols = monomial_basis(n, degree);
  const auto images = operator_images(field, k, cols);
  const auto rows = row_index(images);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows.size()),
                                              static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (const auto& [m, c] : images[j].terms())
      a(static_cast<Eigen::Index>(rows.at(m)), static_cast<Eigen::Index>(j)) = c.to_complex();
  for (const auto& v : linalg::float_nullspace(a, 1e-9)) {
    auto p = clean(from_vector(cols, v, n), 1e-12);
    if (p.is_zero()) continue;
    if (auto exact = certify_exact(field, p, k, 1e-9)) {
      out.push_back(exact->F);
    } else {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<DarbouxCandidate> search_bilinear_restricted(const VectorField& field,
                                                         const std::vector<Monomial>& cofactor_basis,
                                                         const BilinearSearchOptions& options) {
  if (options.degree < 1) throw std::invalid_argument("search_bilinear_restricted: degree must be >= 1");
  if (options.attempts < 1) throw std::invalid_argument("search_bilinear_restricted: attempts must be >= 1");
  if (field.empty()) throw std::invalid_argument("search_bilinear_restricted: empty field");
  if (cofactor_basis.empty()) throw std::invalid_argument("search_bilinear_restricted: empty cofactor basis");
  const std::size_t n = field.front().nvars();
  require_field(field, n, "search_bilinear_restricted");
  const std::uint64_t df = field_degree(field);
  for (const auto& m : cofactor_basis) {
    if (m.nvars() != n) throw std::invalid_argument("search_bilinear_restricted: basis monomial has wrong arity");
    if (df == 0 || m.degree() > df - 1)
      throw std::invalid_argument("search_bilinear_restricted: cofactor basis monomial of degree " +
                                  std::to_string(m.degree()) + " exceeds the bound " +
                                  (df == 0 ? std::string("(zero field)") : std::to_string(df - 1)));
  }

  const VectorField ffield = float_field(field);
  const auto cols = monomial_basis(n, options.degree);
  const auto N = static_cast<Eigen::Index>(cols.size());
  const auto k_terms = static_cast<Eigen::Index>(cofactor_basis.size());

  // Rows: every monomial reachable by X m_j or by m_alpha * m_j.
  std::vector<Polynomial> lie_images;
  std::map<Monomial, std::size_t, GradedLexGreater> rows;
  const Coefficient one = Coefficient::one(Mode::Float);
  for (const auto& m : cols) {
    lie_images.push_back(lie_derivative(ffield, Polynomial::term(m, one)));
    for (const auto& [t, c] : lie_images.back().terms()) rows.emplace(t, 0);
    for (const auto& b : cofactor_basis) rows.emplace(b * m, 0);
  }
  std::size_t r = 0;
  for (auto& [m, idx] : rows) idx = r++;
  const auto R = static_cast<Eigen::Index>(rows.size());

  Eigen::MatrixXcd lmat = Eigen::MatrixXcd::Zero(R, N);
  std::vector<Eigen::MatrixXcd> shift(cofactor_basis.size(), Eigen::MatrixXcd::Zero(R, N));
  for (Eigen::Index j = 0; j < N; ++j) {
    for (const auto& [t, c] : lie_images[static_cast<std::size_t>(j)].terms())
      lmat(static_cast<Eigen::Index>(rows.at(t)), j) = c.to_complex();
    for (std::size_t al = 0; al < cofactor_basis.size(); ++al)
      shift[al](static_cast<Eigen::Index>(rows.at(cofactor_basis[al] * cols[static_cast<std::size_t>(j)])), j) = 1.0;
  }

  auto padded_svd = [](const Eigen::MatrixXcd& a) {
    Eigen::MatrixXcd padded = a;
    if (a.rows() < a.cols()) {
      padded = Eigen::MatrixXcd::Zero(a.cols(), a.cols());
      padded.topRows(a.rows()) = a;
    }
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(padded, Eigen::ComputeFullV);
  };

  // (c = 0, F a first integral) solves the bilinear system trivially and
  // attracts the iteration, so F is sought orthogonal to ker X.
  Eigen::MatrixXcd q;
  {
    auto svd = padded_svd(lmat);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-9 * std::max(1.0, sv(0));
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) >= cutoff) ++rank;
    q = svd.matrixV().leftCols(rank);
  }
  if (q.cols() == 0) return {};

  auto operator_at = [&](const Eigen::VectorXcd& c) {
    Eigen::MatrixXcd a = lmat;
    for (Eigen::Index al = 0; al < k_terms; ++al) a -= c(al) * shift[static_cast<std::size_t>(al)];
    return a;
  };

  std::mt19937_64 rng(options.seed);
  // Start magnitudes spread log-uniformly over [1/10, 10] times the scale of X.
  const double scale = lmat.norm() / std::sqrt(static_cast<double>(N));
  std::uniform_real_distribution<double> log_mag(std::log(0.1 * scale), std::log(10.0 * scale));
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  std::vector<DarbouxCandidate> found;

  auto consider = [&](const Eigen::VectorXcd& fvec) {
    auto f = clean_and_normalize(from_vector(cols, fvec, n), 1e-10);
    if (f.is_zero() || f.is_constant()) return;
    auto k = cofactor_of(ffield, f);
    if (!k) return;
    auto kc = clean(*k, 1e-10);
    auto report = verify_candidate(ffield, f, kc, options.tol);
    if (!report.ok || !report.proper) return;

    DarbouxCandidate cand{f, kc, true};
    if (auto exact = certify_exact(field, f, kc, options.tol)) cand = *exact;
    const bool dup = std::any_of(found.begin(), found.end(), [&](const DarbouxCandidate& other) {
      return float_distance(other.F, cand.F) < 1e-6;
    });
    if (!dup) found.push_back(std::move(cand));
  };

  for (std::size_t attempt = 0; attempt < options.attempts; ++attempt) {
    Eigen::VectorXcd c(k_terms);
    for (Eigen::Index al = 0; al < k_terms; ++al)
      c(al) = std::polar(std::exp(log_mag(rng)), phase(rng));
    Eigen::VectorXcd fvec;
    double residual = INFINITY;
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
      auto svd = padded_svd(operator_at(c) * q);
      fvec = q * svd.matrixV().col(svd.matrixV().cols() - 1);
      Eigen::MatrixXcd g(R, k_terms);
      for (Eigen::Index al = 0; al < k_terms; ++al) g.col(al) = shift[static_cast<std::size_t>(al)] * fvec;
      const Eigen::VectorXcd b = lmat * fvec;
      c = g.completeOrthogonalDecomposition().solve(b);
      const double next = (b - g * c).norm();
      const bool stalled = std::abs(residual - next) < 1e-15;
      residual = next;
      if (next < 1e-13 || stalled) break;
    }
    if (!(residual < 1e-6)) continue;
    // The cofactor is located; take F from the full kernel at that cofactor.
    for (const auto& v : linalg::float_nullspace(operator_at(c), 1e-7)) consider(v);
  }

  std::sort(found.begin(), found.end(),
            [](const DarbouxCandidate& a, const DarbouxCandidate& b) { return to_string(a.F) < to_string(b.F); });
  return found;
}

}  // namespace pfi
