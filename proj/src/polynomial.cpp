#include "pfi/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace pfi {

// ---------------------------------------------------------------- Monomial

Monomial Monomial::variable(std::size_t nvars, std::size_t index, Exponent power) {
  if (index >= nvars) throw std::out_of_range("variable index out of range");
  Monomial m(nvars);
  m.exps_[index] = power;
  return m;
}

std::uint64_t Monomial::degree() const {
  std::uint64_t d = 0;
  for (auto e : exps_) d += e;
  return d;
}

Monomial Monomial::operator*(const Monomial& rhs) const {
  if (nvars() != rhs.nvars()) throw std::invalid_argument("monomial arity mismatch");
  Monomial out(nvars());
  for (std::size_t k = 0; k < nvars(); ++k) {
    const std::uint64_t e = std::uint64_t{exps_[k]} + rhs.exps_[k];
    if (e > std::numeric_limits<Exponent>::max()) throw DegreeOverflow("exponent overflow in monomial product");
    out.exps_[k] = static_cast<Exponent>(e);
  }
  return out;
}

bool Monomial::divides(const Monomial& other) const {
  for (std::size_t k = 0; k < nvars(); ++k)
    if (exps_[k] > other.exps_[k]) return false;
  return true;
}

Monomial Monomial::quotient_of(const Monomial& other) const {
  Monomial out(nvars());
  for (std::size_t k = 0; k < nvars(); ++k) out.exps_[k] = other.exps_[k] - exps_[k];
  return out;
}

bool GradedLexGreater::operator()(const Monomial& a, const Monomial& b) const {
  const auto da = a.degree(), db = b.degree();
  if (da != db) return da > db;
  const auto ea = a.exponents(), eb = b.exponents();
  return std::lexicographical_compare(eb.begin(), eb.end(), ea.begin(), ea.end());
}

// -------------------------------------------------------------- Polynomial

namespace {

void accumulate(Polynomial::TermMap& terms, const Monomial& m, const Coefficient& c) {
  auto [it, inserted] = terms.try_emplace(m, c);
  if (!inserted) it->second += c;
}

}  // namespace

Polynomial::Polynomial(std::size_t nvars, Mode mode, double epsilon)
    : nvars_(nvars), mode_(mode), epsilon_(epsilon) {
  if (nvars == 0) throw std::invalid_argument("polynomial needs at least one variable");
  if (!(epsilon >= 0)) throw std::invalid_argument("negative purge epsilon");
}

Polynomial Polynomial::constant(std::size_t nvars, const Coefficient& c) {
  Polynomial p(nvars, c.mode());
  p.add_term(Monomial(nvars), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index, Mode mode) {
  return term(Monomial::variable(nvars, index), Coefficient::one(mode));
}

Polynomial Polynomial::term(const Monomial& m, const Coefficient& c) {
  Polynomial p(m.nvars(), c.mode());
  p.add_term(m, c);
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
}

std::uint64_t Polynomial::total_degree() const {
  return terms_.empty() ? 0 : terms_.begin()->first.degree();
}

bool Polynomial::depends_on(std::size_t var) const {
  if (var >= nvars_) throw std::out_of_range("variable index out of range");
  return std::any_of(terms_.begin(), terms_.end(), [&](const auto& t) { return t.first[var] != 0; });
}

Coefficient Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Coefficient::zero(mode_) : it->second;
}

double Polynomial::max_abs_coefficient() const {
  double best = 0.0;
  for (const auto& [m, c] : terms_) best = std::max(best, c.magnitude());
  return best;
}

Polynomial Polynomial::with_epsilon(double epsilon) const {
  Polynomial out(nvars_, mode_, epsilon);
  out.terms_ = terms_;
  out.purge();
  return out;
}

void Polynomial::add_term(const Monomial& m, const Coefficient& c) {
  if (m.nvars() != nvars_) throw std::invalid_argument("monomial arity does not match polynomial");
  if (c.mode() != mode_) throw ModeMismatch("term coefficient mode differs from polynomial mode");
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) it->second += c;
  if (it->second.is_negligible(epsilon_)) terms_.erase(it);
}

void Polynomial::purge() {
  std::erase_if(terms_, [&](const auto& t) { return t.second.is_negligible(epsilon_); });
}

void Polynomial::require_compatible(const Polynomial& other, const char* op) const {
  if (nvars_ != other.nvars_)
    throw std::invalid_argument(std::string("polynomial ") + op + ": nvars mismatch (" +
                                std::to_string(nvars_) + " vs " + std::to_string(other.nvars_) + ")");
  if (mode_ != other.mode_)
    throw ModeMismatch(std::string("polynomial ") + op + ": mode mismatch");
}

Polynomial Polynomial::operator-() const {
  Polynomial out(*this);
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  require_compatible(rhs, "add");
  epsilon_ = std::max(epsilon_, rhs.epsilon_);
  for (const auto& [m, c] : rhs.terms_) accumulate(terms_, m, c);
  purge();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  require_compatible(rhs, "sub");
  epsilon_ = std::max(epsilon_, rhs.epsilon_);
  for (const auto& [m, c] : rhs.terms_) accumulate(terms_, m, -c);
  purge();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.require_compatible(b, "mul");
  Polynomial out(a.nvars_, a.mode_, std::max(a.epsilon_, b.epsilon_));
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) accumulate(out.terms_, ma * mb, ca * cb);
  out.purge();
  return out;
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) { return *this = *this * rhs; }

Polynomial& Polynomial::operator*=(const Coefficient& rhs) {
  if (rhs.mode() != mode_) throw ModeMismatch("polynomial scale: mode mismatch");
  for (auto& [m, c] : terms_) c *= rhs;
  purge();
  return *this;
}

Polynomial pow(const Polynomial& base, std::uint64_t exponent) {
  if (exponent > std::numeric_limits<Monomial::Exponent>::max() && !base.is_constant())
    throw DegreeOverflow("polynomial power exponent too large");
  Polynomial result = Polynomial::constant(base.nvars(), Coefficient::one(base.mode())).with_epsilon(base.epsilon());
  Polynomial b = base;
  while (exponent != 0) {
    if (exponent & 1u) result *= b;
    exponent >>= 1;
    if (exponent != 0) b *= b;
  }
  return result;
}

Polynomial diff(const Polynomial& p, std::size_t var) {
  if (var >= p.nvars()) throw std::out_of_range("diff: variable index out of range");
  Polynomial out(p.nvars(), p.mode(), p.epsilon());
  for (const auto& [m, c] : p.terms()) {
    const auto e = m[var];
    if (e == 0) continue;
    std::vector<Monomial::Exponent> exps(m.exponents().begin(), m.exponents().end());
    exps[var] = e - 1;
    out.add_term(Monomial(std::span<const Monomial::Exponent>(exps)), c * Coefficient::integer(static_cast<long>(e), p.mode()));
  }
  return out;
}

Polynomial compose(const Polynomial& p, std::span<const Polynomial> subs) {
  if (subs.size() != p.nvars())
    throw std::invalid_argument("compose: expected " + std::to_string(p.nvars()) + " substitutions, got " +
                                std::to_string(subs.size()));
  const std::size_t target_nvars = subs.front().nvars();
  double eps = p.epsilon();
  for (const auto& s : subs) {
    if (s.nvars() != target_nvars) throw std::invalid_argument("compose: substitutions differ in nvars");
    if (s.mode() != p.mode()) throw ModeMismatch("compose: substitution mode differs from polynomial mode");
    eps = std::max(eps, s.epsilon());
  }

  // powers[k][e] = subs[k]^e, filled on demand.
  std::vector<std::vector<Polynomial>> powers(subs.size());
  auto power_of = [&](std::size_t k, std::size_t e) -> const Polynomial& {
    auto& cache = powers[k];
    if (cache.empty()) cache.push_back(Polynomial::constant(target_nvars, Coefficient::one(p.mode())));
    while (cache.size() <= e) cache.push_back(cache.back() * subs[k]);
    return cache[e];
  };

  Polynomial out(target_nvars, p.mode(), eps);
  for (const auto& [m, c] : p.terms()) {
    Polynomial t = Polynomial::constant(target_nvars, c).with_epsilon(eps);
    for (std::size_t k = 0; k < m.nvars(); ++k)
      if (m[k] != 0) t *= power_of(k, m[k]);
    out += t;
  }
  return out;
}

Polynomial sign_flip(const Polynomial& p, std::span<const std::size_t> vars) {
  for (auto v : vars)
    if (v >= p.nvars()) throw std::out_of_range("sign_flip: variable index out of range");
  Polynomial out(p.nvars(), p.mode(), p.epsilon());
  for (const auto& [m, c] : p.terms()) {
    std::uint64_t parity = 0;
    for (auto v : vars) parity += m[v];
    out.add_term(m, (parity & 1u) ? -c : c);
  }
  return out;
}

std::optional<Polynomial> exact_divide(const Polynomial& num, const Polynomial& den, double tol) {
  if (den.is_zero()) throw std::domain_error("exact_divide: division by the zero polynomial");
  if (num.nvars() != den.nvars()) throw std::invalid_argument("exact_divide: nvars mismatch");
  if (num.mode() != den.mode()) throw ModeMismatch("exact_divide: mode mismatch");

  const auto& [lead_m, lead_c] = *den.terms().begin();
  Polynomial quotient(num.nvars(), num.mode(), std::max(num.epsilon(), den.epsilon()));
  Polynomial remainder = num;
  Polynomial leftover(num.nvars(), num.mode(), num.epsilon());
  // {den} is a Groebner basis of (den), so the remainder is unique and
  // den | num iff it vanishes.
  while (!remainder.is_zero()) {
    const auto [rm, rc] = *remainder.terms().begin();
    if (!lead_m.divides(rm)) {
      if (num.mode() == Mode::Exact) return std::nullopt;
      leftover.add_term(rm, rc);
      remainder -= Polynomial::term(rm, rc);
      continue;
    }
    const auto step = Polynomial::term(lead_m.quotient_of(rm), rc / lead_c);
    quotient += step;
    remainder -= step * den;
    // drop any rounding residue left on the cancelled lead (Float)
    if (remainder.terms().count(rm) != 0) remainder -= Polynomial::term(rm, remainder.coefficient(rm));
  }
  if (num.mode() == Mode::Float && leftover.max_abs_coefficient() > tol * std::max(1.0, num.max_abs_coefficient()))
    return std::nullopt;
  return quotient;
}

Coefficient eval(const Polynomial& p, std::span<const Coefficient> point) {
  if (point.size() != p.nvars()) throw std::invalid_argument("eval: point arity mismatch");
  for (const auto& v : point)
    if (v.mode() != p.mode()) throw ModeMismatch("eval: point mode differs from polynomial mode");
  Coefficient total = Coefficient::zero(p.mode());
  for (const auto& [m, c] : p.terms()) {
    Coefficient t = c;
    for (std::size_t k = 0; k < m.nvars(); ++k)
      if (m[k] != 0) t *= pow(point[k], m[k]);
    total += t;
  }
  return total;
}

std::complex<double> eval_complex(const Polynomial& p, std::span<const std::complex<double>> point) {
  if (point.size() != p.nvars()) throw std::invalid_argument("eval: point arity mismatch");
  std::complex<double> total = 0.0;
  for (const auto& [m, c] : p.terms()) {
    std::complex<double> t = c.to_complex();
    for (std::size_t k = 0; k < m.nvars(); ++k)
      for (Monomial::Exponent e = 0; e < m[k]; ++e) t *= point[k];
    total += t;
  }
  return total;
}

std::vector<std::complex<double>> gradient_at(const Polynomial& p, std::span<const std::complex<double>> point) {
  std::vector<std::complex<double>> g(p.nvars());
  for (std::size_t k = 0; k < p.nvars(); ++k) g[k] = eval_complex(diff(p, k), point);
  return g;
}

std::optional<Polynomial> rationalize(const Polynomial& p, double tol, std::int64_t max_denominator) {
  if (!(tol > 0)) throw std::invalid_argument("rationalize: tol must be positive");
  Polynomial out(p.nvars(), Mode::Exact);
  for (const auto& [m, c] : p.terms()) {
    auto r = rationalize(c, tol, max_denominator);
    if (!r) return std::nullopt;
    out.add_term(m, *r);
  }
  return out;
}

Polynomial to_float(const Polynomial& p, double epsilon) {
  if (p.mode() == Mode::Float) return p;
  Polynomial out(p.nvars(), Mode::Float, epsilon);
  for (const auto& [m, c] : p.terms()) out.add_term(m, c.to_float());
  return out;
}

bool is_real(const Polynomial& p) {
  return std::all_of(p.terms().begin(), p.terms().end(), [](const auto& t) { return t.second.is_real(); });
}

// ---------------------------------------------------------------- render

namespace {

bool is_negative_form(const Coefficient& c) {
  const auto z = c.to_complex();
  if (c.mode() == Mode::Exact) {
    const auto& g = c.exact_value();
    if (g.is_real()) return sgn(g.re) < 0;
    if (sgn(g.re) == 0) return sgn(g.im) < 0;
    return false;
  }
  if (z.imag() == 0.0) return std::signbit(z.real());
  if (z.real() == 0.0) return std::signbit(z.imag());
  return false;
}

}  // namespace

std::string to_string(const Polynomial& p, std::span<const std::string> names) {
  if (names.size() != p.nvars()) throw std::invalid_argument("render: name count does not match nvars");
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const bool negative = is_negative_form(c);
    const Coefficient mag = negative ? -c : c;
    if (first) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;

    std::string vars;
    for (std::size_t k = 0; k < m.nvars(); ++k) {
      if (m[k] == 0) continue;
      if (!vars.empty()) vars += '*';
      vars += names[k];
      if (m[k] > 1) vars += '^' + std::to_string(m[k]);
    }
    if (vars.empty()) {
      out += mag.to_string();
    } else if (mag.is_one()) {
      out += vars;
    } else {
      out += mag.to_string() + '*' + vars;
    }
  }
  return out;
}

std::string to_string(const Polynomial& p) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < p.nvars(); ++k) names.push_back("x" + std::to_string(k + 1));
  return to_string(p, names);
}

std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << to_string(p); }

}  // namespace pfi
