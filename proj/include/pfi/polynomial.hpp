#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "pfi/coefficient.hpp"

namespace pfi {

/// Purge threshold for Float-mode terms.
inline constexpr double kDefaultFloatEpsilon = 1e-12;
/// Denominator bound used when snapping floats back to rationals.
inline constexpr std::int64_t kDefaultMaxDenominator = 1'000'000;

/// Raised when an exponent or total degree would leave the machine range.
class DegreeOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Exponent vector of a single term. The all-zero vector is the unit monomial.
class Monomial {
 public:
  using Exponent = std::uint32_t;

  explicit Monomial(std::size_t nvars) : exps_(nvars, 0) {}
  Monomial(std::initializer_list<Exponent> exps) : exps_(exps.begin(), exps.end()) {}
  explicit Monomial(std::span<const Exponent> exps) : exps_(exps.begin(), exps.end()) {}

  static Monomial variable(std::size_t nvars, std::size_t index, Exponent power = 1);

  std::size_t nvars() const { return exps_.size(); }
  Exponent operator[](std::size_t k) const { return exps_[k]; }
  std::span<const Exponent> exponents() const { return {exps_.data(), exps_.size()}; }
  std::uint64_t degree() const;
  bool is_unit() const { return degree() == 0; }

  /// Throws DegreeOverflow when an exponent leaves the Exponent range.
  Monomial operator*(const Monomial& rhs) const;
  bool divides(const Monomial& other) const;
  /// other / *this; requires divides(other).
  Monomial quotient_of(const Monomial& other) const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

 private:
  boost::container::small_vector<Exponent, 6> exps_;
};

/// Graded lexicographic order, leading (largest) monomial first.
struct GradedLexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse multivariate polynomial over Q(i) (Exact) or complex doubles (Float).
///
/// Stored terms never carry a zero coefficient; in Float mode every
/// operation purges terms whose magnitude falls below epsilon(). Exact
/// polynomials are canonical, so `==` is structural equality.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Coefficient, GradedLexGreater>;

  Polynomial(std::size_t nvars, Mode mode, double epsilon = kDefaultFloatEpsilon);

  static Polynomial constant(std::size_t nvars, const Coefficient& c);
  static Polynomial variable(std::size_t nvars, std::size_t index, Mode mode);
  static Polynomial term(const Monomial& m, const Coefficient& c);

  std::size_t nvars() const { return nvars_; }
  Mode mode() const { return mode_; }
  double epsilon() const { return epsilon_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Total degree; 0 for constants and for the zero polynomial.
  std::uint64_t total_degree() const;
  bool depends_on(std::size_t var) const;
  Coefficient coefficient(const Monomial& m) const;
  /// Largest coefficient magnitude; 0 for the zero polynomial.
  double max_abs_coefficient() const;

  /// Same polynomial with a different Float purge threshold.
  Polynomial with_epsilon(double epsilon) const;

  /// Adds c*m in place; enforces mode and arity.
  void add_term(const Monomial& m, const Coefficient& c);

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Polynomial& rhs);
  Polynomial& operator*=(const Coefficient& rhs);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Coefficient& c) { return a *= c; }
  friend Polynomial operator*(const Coefficient& c, Polynomial a) { return a *= c; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.mode_ == b.mode_ && a.terms_ == b.terms_;
  }

 private:
  void require_compatible(const Polynomial& other, const char* op) const;
  void purge();

  std::size_t nvars_;
  Mode mode_;
  double epsilon_;
  TermMap terms_;
};

Polynomial pow(const Polynomial& base, std::uint64_t exponent);

/// Formal partial derivative with respect to variable `var`.
Polynomial diff(const Polynomial& p, std::size_t var);

/// p(subs[0], ..., subs[n-1]); every substitution shares nvars and mode.
Polynomial compose(const Polynomial& p, std::span<const Polynomial> subs);

/// Replaces x_k by -x_k for every k in vars. An involution.
Polynomial sign_flip(const Polynomial& p, std::span<const std::size_t> vars);

/// Q with num = Q*den. Exact mode: zero remainder. Float mode: remainder
/// coefficients below tol * max(1, |num|). nullopt when den does not divide num.
/// Throws std::domain_error when den is the zero polynomial.
std::optional<Polynomial> exact_divide(const Polynomial& num, const Polynomial& den, double tol = 1e-9);

Coefficient eval(const Polynomial& p, std::span<const Coefficient> point);
/// Mode-independent numeric evaluation.
std::complex<double> eval_complex(const Polynomial& p, std::span<const std::complex<double>> point);
std::vector<std::complex<double>> gradient_at(const Polynomial& p, std::span<const std::complex<double>> point);

/// Snaps every coefficient of a Float polynomial to a Gaussian rational with
/// denominator <= max_denominator within tol. nullopt if any coefficient fails.
std::optional<Polynomial> rationalize(const Polynomial& p, double tol,
                                      std::int64_t max_denominator = kDefaultMaxDenominator);

/// Explicit Exact -> Float conversion (identity on Float input).
Polynomial to_float(const Polynomial& p, double epsilon = kDefaultFloatEpsilon);

/// True when every coefficient is real.
bool is_real(const Polynomial& p);

/// Canonical text: graded-lex order, explicit `*`, `^` for powers.
std::string to_string(const Polynomial& p, std::span<const std::string> names);
/// Same with default names x1..xn.
std::string to_string(const Polynomial& p);
std::ostream& operator<<(std::ostream& os, const Polynomial& p);

}  // namespace pfi
