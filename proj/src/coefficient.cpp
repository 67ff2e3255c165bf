#include "pfi/coefficient.hpp"

#include <cmath>
#include <cstdio>

namespace pfi {

std::string_view to_string(Mode mode) { return mode == Mode::Exact ? "Exact" : "Float"; }

Coefficient Coefficient::exact(mpq_class re, mpq_class im) {
  re.canonicalize();
  im.canonicalize();
  return Coefficient(GaussianRational{std::move(re), std::move(im)});
}

Coefficient Coefficient::floating(std::complex<double> value) { return Coefficient(value); }

Coefficient Coefficient::integer(long value, Mode mode) {
  if (mode == Mode::Exact) return exact(mpq_class(value));
  return floating(static_cast<double>(value));
}

Coefficient Coefficient::imaginary_unit(Mode mode) {
  if (mode == Mode::Exact) return exact(0, 1);
  return floating(0.0, 1.0);
}

bool Coefficient::is_zero() const {
  if (const auto* g = std::get_if<GaussianRational>(&value_)) return g->is_zero();
  const auto& z = std::get<std::complex<double>>(value_);
  return z.real() == 0.0 && z.imag() == 0.0;
}

bool Coefficient::is_negligible(double eps) const {
  if (const auto* g = std::get_if<GaussianRational>(&value_)) return g->is_zero();
  return std::abs(std::get<std::complex<double>>(value_)) < eps;
}

bool Coefficient::is_real() const {
  if (const auto* g = std::get_if<GaussianRational>(&value_)) return g->is_real();
  return std::get<std::complex<double>>(value_).imag() == 0.0;
}

bool Coefficient::is_one() const {
  if (const auto* g = std::get_if<GaussianRational>(&value_)) return g->re == 1 && sgn(g->im) == 0;
  return std::get<std::complex<double>>(value_) == std::complex<double>(1.0, 0.0);
}

const GaussianRational& Coefficient::exact_value() const {
  if (const auto* g = std::get_if<GaussianRational>(&value_)) return *g;
  throw ModeMismatch("exact value requested from a Float coefficient");
}

std::complex<double> Coefficient::to_complex() const {
  if (const auto* g = std::get_if<GaussianRational>(&value_)) return {g->re.get_d(), g->im.get_d()};
  return std::get<std::complex<double>>(value_);
}

Coefficient Coefficient::to_float() const { return floating(to_complex()); }

Coefficient Coefficient::conj() const {
  if (const auto* g = std::get_if<GaussianRational>(&value_))
    return Coefficient(GaussianRational{g->re, -g->im});
  return floating(std::conj(std::get<std::complex<double>>(value_)));
}

void Coefficient::require_same_mode(const Coefficient& other, const char* op) const {
  if (mode() != other.mode())
    throw ModeMismatch(std::string("coefficient ") + op + ": " + std::string(pfi::to_string(mode())) +
                       " vs " + std::string(pfi::to_string(other.mode())));
}

Coefficient Coefficient::operator-() const {
  if (const auto* g = std::get_if<GaussianRational>(&value_))
    return Coefficient(GaussianRational{-g->re, -g->im});
  return floating(-std::get<std::complex<double>>(value_));
}

Coefficient& Coefficient::operator+=(const Coefficient& rhs) {
  require_same_mode(rhs, "+");
  if (auto* g = std::get_if<GaussianRational>(&value_)) {
    const auto& h = std::get<GaussianRational>(rhs.value_);
    g->re += h.re;
    g->im += h.im;
  } else {
    std::get<std::complex<double>>(value_) += std::get<std::complex<double>>(rhs.value_);
  }
  return *this;
}

Coefficient& Coefficient::operator-=(const Coefficient& rhs) {
  require_same_mode(rhs, "-");
  if (auto* g = std::get_if<GaussianRational>(&value_)) {
    const auto& h = std::get<GaussianRational>(rhs.value_);
    g->re -= h.re;
    g->im -= h.im;
  } else {
    std::get<std::complex<double>>(value_) -= std::get<std::complex<double>>(rhs.value_);
  }
  return *this;
}

Coefficient& Coefficient::operator*=(const Coefficient& rhs) {
  require_same_mode(rhs, "*");
  if (auto* g = std::get_if<GaussianRational>(&value_)) {
    const auto& h = std::get<GaussianRational>(rhs.value_);
    if (h.is_real() && g->is_real()) {
      g->re *= h.re;
    } else {
      mpq_class re = g->re * h.re - g->im * h.im;
      mpq_class im = g->re * h.im + g->im * h.re;
      g->re = std::move(re);
      g->im = std::move(im);
    }
  } else {
    std::get<std::complex<double>>(value_) *= std::get<std::complex<double>>(rhs.value_);
  }
  return *this;
}

Coefficient& Coefficient::operator/=(const Coefficient& rhs) {
  require_same_mode(rhs, "/");
  if (rhs.is_zero()) throw std::domain_error("coefficient division by zero");
  if (auto* g = std::get_if<GaussianRational>(&value_)) {
    const auto& h = std::get<GaussianRational>(rhs.value_);
    mpq_class norm = h.re * h.re + h.im * h.im;
    mpq_class re = (g->re * h.re + g->im * h.im) / norm;
    mpq_class im = (g->im * h.re - g->re * h.im) / norm;
    g->re = std::move(re);
    g->im = std::move(im);
  } else {
    std::get<std::complex<double>>(value_) /= std::get<std::complex<double>>(rhs.value_);
  }
  return *this;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string Coefficient::to_string() const {
  if (const auto* g = std::get_if<GaussianRational>(&value_)) {
    if (g->is_real()) return g->re.get_str();
    if (sgn(g->re) == 0) {
      if (g->im == 1) return "i";
      if (g->im == -1) return "-i";
      return g->im.get_str() + "*i";
    }
    mpq_class aim = abs(g->im);
    std::string im = aim == 1 ? "i" : aim.get_str() + "*i";
    return "(" + g->re.get_str() + (sgn(g->im) < 0 ? "-" : "+") + im + ")";
  }
  const auto& z = std::get<std::complex<double>>(value_);
  if (z.imag() == 0.0) return format_double(z.real());
  if (z.real() == 0.0) return format_double(z.imag()) + "*i";
  return "(" + format_double(z.real()) + (std::signbit(z.imag()) ? "-" : "+") +
         format_double(std::abs(z.imag())) + "*i)";
}

Coefficient pow(const Coefficient& base, std::uint64_t exponent) {
  Coefficient result = Coefficient::one(base.mode());
  Coefficient b = base;
  while (exponent != 0) {
    if (exponent & 1u) result *= b;
    exponent >>= 1;
    if (exponent != 0) b *= b;
  }
  return result;
}

mpq_class best_rational(double x, std::int64_t max_denominator) {
  if (max_denominator < 1) throw std::invalid_argument("max_denominator must be >= 1");
  if (!std::isfinite(x)) throw std::domain_error("cannot approximate a non-finite value");
  mpq_class value(x);  // exact binary value of x
  if (value.get_den() <= max_denominator) return value;

  // Convergents p0/q0, p1/q1 of the continued fraction, stopped by the bound.
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  mpz_class n = value.get_num(), d = value.get_den();
  const mpz_class bound = static_cast<long>(max_denominator);
  while (true) {
    mpz_class a = n / d;
    if (n < 0 && a * d != n) a -= 1;  // floor division
    mpz_class q2 = q0 + a * q1;
    if (q2 > bound) break;
    mpz_class p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    mpz_class r = n - a * d;
    n = d;
    d = r;
  }
  mpz_class k = (bound - q0) / q1;
  mpq_class bound1(p0 + k * p1, q0 + k * q1);
  mpq_class bound2(p1, q1);
  bound1.canonicalize();
  bound2.canonicalize();
  return abs(bound2 - value) <= abs(bound1 - value) ? bound2 : bound1;
}

std::optional<Coefficient> rationalize(const Coefficient& c, double tol, std::int64_t max_denominator) {
  if (!(tol > 0)) throw std::invalid_argument("rationalize: tol must be positive");
  if (c.mode() == Mode::Exact) return c;
  const auto z = c.to_complex();
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
  mpq_class re = std::abs(z.real()) < tol ? mpq_class(0) : best_rational(z.real(), max_denominator);
  mpq_class im = std::abs(z.imag()) < tol ? mpq_class(0) : best_rational(z.imag(), max_denominator);
  if (std::abs(re.get_d() - z.real()) > tol || std::abs(im.get_d() - z.imag()) > tol) return std::nullopt;
  return Coefficient::exact(std::move(re), std::move(im));
}

}  // namespace pfi
