#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pfi/poisson.hpp"
#include "pfi/polynomial.hpp"

namespace pfi {

/// Outcome of checking X F = K F.
struct DarbouxReport {
  bool ok = false;
  bool proper = false;
  Polynomial residual{1, Mode::Exact};  // X F - K F
};

/// A certified Darboux polynomial with its cofactor.
struct DarbouxCandidate {
  Polynomial F;
  Polynomial K;
  bool proper = false;
};

/// K = (X F) / F, or nullopt when X F is not a polynomial multiple of F.
/// Throws std::invalid_argument on a zero F.
std::optional<Polynomial> cofactor_of(const VectorField& field, const Polynomial& f);

/// Exact mode: ok iff the residual is the zero polynomial. Float mode: ok iff
/// every residual coefficient is below tol * max(1, |F|, |K|).
DarbouxReport verify_candidate(const VectorField& field, const Polynomial& f, const Polynomial& k,
                               double tol = 1e-9);

/// All monomials in nvars variables of total degree <= degree, leading (graded-lex largest) first.
std::vector<Monomial> monomial_basis(std::size_t nvars, unsigned degree);

/// Largest total degree among the field components (0 for the zero field).
std::uint64_t field_degree(const VectorField& field);

/// Kernel of F -> X F - K F on polynomials of degree <= degree.
///
/// Exact inputs give an exact basis, each element monic in its leading
/// monomial. Float inputs use the SVD; a kernel vector is returned as an
/// Exact polynomial when its rationalization verifies exactly against the
/// rationalized field and cofactor, and as a Float polynomial otherwise.
std::vector<Polynomial> search_with_cofactor(const VectorField& field, const Polynomial& k, unsigned degree);

struct BilinearSearchOptions {
  unsigned degree = 2;
  std::size_t attempts = 16;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 400;
  double tol = 1e-9;
};

/// Searches F of degree <= options.degree and K in the span of cofactor_basis
/// by alternating linear solves from random complex starts. Every hit is
/// normalized, its cofactor recomputed by exact division, and certified by
/// verify_candidate. Only proper candidates are returned, sorted by rendering.
///
/// Throws std::invalid_argument when a basis monomial exceeds the cofactor
/// degree bound field_degree(field) - 1.
std::vector<DarbouxCandidate> search_bilinear_restricted(const VectorField& field,
                                                         const std::vector<Monomial>& cofactor_basis,
                                                         const BilinearSearchOptions& options);

}  // namespace pfi
