#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <gmpxx.h>

namespace pfi {

/// Arithmetic mode shared by a coefficient and every polynomial built from it.
enum class Mode { Exact, Float };

std::string_view to_string(Mode mode);

/// Raised when Exact and Float values meet in one operation.
class ModeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An element re + im*i of Q(i). mpq_class keeps both parts canonical
/// (lowest terms, positive denominator).
struct GaussianRational {
  mpq_class re{0};
  mpq_class im{0};

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

/// Polynomial coefficient: exact Gaussian rational or a complex double.
class Coefficient {
 public:
  /// Exact zero.
  Coefficient() = default;

  static Coefficient exact(mpq_class re, mpq_class im = 0);
  static Coefficient floating(std::complex<double> value);
  static Coefficient floating(double re, double im = 0.0) { return floating({re, im}); }
  static Coefficient integer(long value, Mode mode);
  static Coefficient imaginary_unit(Mode mode);
  static Coefficient zero(Mode mode) { return integer(0, mode); }
  static Coefficient one(Mode mode) { return integer(1, mode); }

  Mode mode() const { return value_.index() == 0 ? Mode::Exact : Mode::Float; }

  /// Exactly zero (Float: both parts == 0.0).
  bool is_zero() const;
  /// |c| < eps in Float mode; exact zero test in Exact mode.
  bool is_negligible(double eps) const;
  bool is_real() const;
  bool is_one() const;

  /// Throws ModeMismatch on a Float coefficient.
  const GaussianRational& exact_value() const;
  std::complex<double> to_complex() const;
  double magnitude() const { return std::abs(to_complex()); }

  Coefficient to_float() const;
  Coefficient conj() const;

  Coefficient operator-() const;
  Coefficient& operator+=(const Coefficient& rhs);
  Coefficient& operator-=(const Coefficient& rhs);
  Coefficient& operator*=(const Coefficient& rhs);
  /// Throws std::domain_error on a zero divisor.
  Coefficient& operator/=(const Coefficient& rhs);

  friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }
  friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a -= b; }
  friend Coefficient operator*(Coefficient a, const Coefficient& b) { return a *= b; }
  friend Coefficient operator/(Coefficient a, const Coefficient& b) { return a /= b; }

  /// Identity comparison: equal modes and identical values.
  friend bool operator==(const Coefficient& a, const Coefficient& b) { return a.value_ == b.value_; }

  /// Text form used by the canonical renderer: `a`, `a/b`, `a/b*i` or `(a/b+c/d*i)`.
  /// Float values print with 17 significant digits.
  std::string to_string() const;

 private:
  using Value = std::variant<GaussianRational, std::complex<double>>;
  explicit Coefficient(Value v) : value_(std::move(v)) {}
  void require_same_mode(const Coefficient& other, const char* op) const;

  Value value_{GaussianRational{}};
};

Coefficient pow(const Coefficient& base, std::uint64_t exponent);

/// Best rational approximation of x with denominator <= max_denominator
/// (continued-fraction based, same result as Python's limit_denominator).
mpq_class best_rational(double x, std::int64_t max_denominator);

/// Snaps a Float coefficient to a Gaussian rational within tol per component.
/// Exact input is returned unchanged.
std::optional<Coefficient> rationalize(const Coefficient& c, double tol,
                                       std::int64_t max_denominator = 1'000'000);

}  // namespace pfi
