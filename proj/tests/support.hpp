#pragma once

// Shared fixtures and generators for the test suites.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pfi/parse.hpp"
#include "pfi/poisson.hpp"
#include "pfi/polynomial.hpp"

namespace pfi::testing {

inline const std::vector<std::string> kExample1Forward = {
    "x1",
    "x2 + x1*x2 + x1*x3 + x2*x3 + x1*x2*x3 + x1*x4 + x3*x4 + x1*x3*x4",
    "x3",
    "x4 - x1*x2 - x2*x3 - x1*x2*x3 - x1*x4 - x3*x4 - x1*x3*x4",
};

// Written in the y coordinates, but parsed against the same x1..x4 table.
inline const std::vector<std::string> kExample1Inverse = {
    "x1",
    "x2 - x1*x2 - x1*x3 + x1^2*x3 - x2*x3 - x1*x2*x3 + x1*x3^2 + x1^2*x3^2 - x1*x4 - x3*x4 - x1*x3*x4",
    "x3",
    "x4 + x1*x2 - x1^2*x3 + x2*x3 + x1*x2*x3 - x1*x3^2 - x1^2*x3^2 + x1*x4 + x3*x4 + x1*x3*x4",
};

// The six printed upper-triangle entries J_12, J_13, J_14, J_23, J_24, J_34.
inline const std::vector<std::string> kExample1Upper = {
    "-x2 + x1^2*(1 + x3) - x4 - x1*(1 + x2 - x3 + x4)",
    "1",
    "x2 - x1^2*(1 + x3) + x4 + x1*(x2 - x3 + x4)",
    "(1 + x1)*x3^2 - x2*(1 + x3) + x3*(-1 + x1 - x4) - x4",
    "1 - x2*x3 - x3*x4 + x1*(x2 + x4)",
    "x3^2 - x2*(1 + x3) + x1*x3*(1 + x3) - x4 - x3*x4",
};

/// H* = 1/2 (p1^2 + p2^2) + c q1^2 + q2^4 on S_4.
inline PoissonSystem example2_system(const mpq_class& c = 1, Mode mode = Mode::Exact) {
  Bindings b = {{"c", Coefficient::exact(c)}};
  auto h = parse_expression("1/2*(p1^2 + p2^2) + c*q1^2 + q2^4", VarTable({"q1", "q2", "p1", "p2"}), mode, b);
  return PoissonSystem(canonical_matrix(2, 0, mode), h, {}, VarTable({"q1", "q2", "p1", "p2"}), 2, 0);
}

/// m copies of 1.
inline std::vector<Coefficient> unit_mu(std::size_t m, Mode mode = Mode::Exact) {
  return std::vector<Coefficient>(m, Coefficient::one(mode));
}

/// F = i p2 + sqrt(2) q2^2 (Float).
inline Polynomial example2_F() {
  Bindings b = {{"r2", Coefficient::floating(std::sqrt(2.0))}};
  return parse_expression("i*p2 + r2*q2^2", VarTable({"q1", "q2", "p1", "p2"}), Mode::Float, b);
}

inline VarTable x_vars(std::size_t n) { return VarTable::numbered("x", n); }
inline VarTable qp_vars() { return VarTable({"q1", "q2", "p1", "p2"}); }

inline std::vector<Polynomial> parse_all(const std::vector<std::string>& texts, const VarTable& vars,
                                         Mode mode = Mode::Exact) {
  std::vector<Polynomial> out;
  for (const auto& t : texts) out.push_back(parse_expression(t, vars, mode));
  return out;
}

inline Polynomial P(const std::string& text, const VarTable& vars, Mode mode = Mode::Exact) {
  return parse_expression(text, vars, mode);
}

/// Small random Gaussian rational (or pure rational when real_only).
inline Coefficient random_coefficient(std::mt19937_64& rng, bool real_only = true) {
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<long> den(1, 5);
  mpq_class re(num(rng), den(rng));
  re.canonicalize();
  mpq_class im = 0;
  if (!real_only) {
    im = mpq_class(num(rng), den(rng));
    im.canonicalize();
  }
  if (sgn(re) == 0 && sgn(im) == 0) re = 1;
  return Coefficient::exact(re, im);
}

/// Random Exact polynomial with at most max_terms terms of total degree <= max_degree.
inline Polynomial random_polynomial(std::mt19937_64& rng, std::size_t nvars, unsigned max_degree,
                                    std::size_t max_terms, bool real_only = true) {
  Polynomial p(nvars, Mode::Exact);
  std::uniform_int_distribution<std::size_t> count(0, max_terms);
  std::uniform_int_distribution<unsigned> deg(0, max_degree);
  std::uniform_int_distribution<std::size_t> var(0, nvars - 1);
  const std::size_t terms = count(rng);
  for (std::size_t t = 0; t < terms; ++t) {
    std::vector<Monomial::Exponent> exps(nvars, 0);
    const unsigned d = deg(rng);
    for (unsigned k = 0; k < d; ++k) ++exps[var(rng)];
    p.add_term(Monomial(std::span<const Monomial::Exponent>(exps)), random_coefficient(rng, real_only));
  }
  return p;
}

inline Polynomial random_nonzero_polynomial(std::mt19937_64& rng, std::size_t nvars, unsigned max_degree,
                                            std::size_t max_terms, bool real_only = true) {
  for (;;) {
    auto p = random_polynomial(rng, nvars, max_degree, max_terms, real_only);
    if (!p.is_zero()) return p;
  }
}

/// Random polynomial diffeomorphism: a triangular map y_k = a_k x_k + g_k(x_1..x_{k-1})
/// with deg g_k <= max_degree, followed by a random permutation of the outputs.
inline PolyMap random_triangular_map(std::mt19937_64& rng, std::size_t n, unsigned max_degree = 2) {
  std::vector<Polynomial> tri, tri_inv;
  for (std::size_t k = 0; k < n; ++k) {
    Coefficient a = random_coefficient(rng);
    Polynomial g(n, Mode::Exact);
    if (k > 0) {
      auto lower = random_polynomial(rng, k, max_degree, 3);
      std::vector<Polynomial> embed;
      for (std::size_t j = 0; j < k; ++j) embed.push_back(Polynomial::variable(n, j, Mode::Exact));
      g = compose(lower, embed);
    }
    const auto xk = Polynomial::variable(n, k, Mode::Exact);
    tri.push_back(xk * a + g);
    // x_k = (y_k - g(x_1(y)..x_{k-1}(y))) / a_k
    std::vector<Polynomial> subs = tri_inv;
    for (std::size_t j = k; j < n; ++j) subs.push_back(Polynomial::variable(n, j, Mode::Exact));
    tri_inv.push_back((xk - compose(g, subs)) * (Coefficient::one(Mode::Exact) / a));
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 0; k < n; ++k) perm[k] = k;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> where(n);
  for (std::size_t k = 0; k < n; ++k) where[perm[k]] = k;
  std::vector<Polynomial> fwd, inv;
  std::vector<Polynomial> unpermute;
  for (std::size_t k = 0; k < n; ++k) {
    fwd.push_back(tri[perm[k]]);
    unpermute.push_back(Polynomial::variable(n, where[k], Mode::Exact));
  }
  for (std::size_t k = 0; k < n; ++k) inv.push_back(compose(tri_inv[k], unpermute));
  return PolyMap(std::move(fwd), std::move(inv));
}

}  // namespace pfi::testing
