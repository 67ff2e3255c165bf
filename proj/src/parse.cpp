#include "pfi/parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

namespace pfi {

// ---------------------------------------------------------------- VarTable

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; });
}

VarTable::VarTable(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw std::invalid_argument("variable table must not be empty");
  std::set<std::string_view> seen;
  for (const auto& n : names_) {
    if (!is_identifier(n)) throw std::invalid_argument("invalid variable name '" + n + "'");
    if (n == "i") throw std::invalid_argument("'i' is reserved for the imaginary unit");
    if (!seen.insert(n).second) throw std::invalid_argument("duplicate variable name '" + n + "'");
  }
}

VarTable VarTable::numbered(std::string_view prefix, std::size_t count) {
  std::vector<std::string> names;
  for (std::size_t k = 1; k <= count; ++k) names.push_back(std::string(prefix) + std::to_string(k));
  return VarTable(std::move(names));
}

std::optional<std::size_t> VarTable::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

// ------------------------------------------------------------------ parser

namespace {

constexpr int kMaxNesting = 256;
constexpr std::uint64_t kMaxExponent = 1'000'000;
constexpr double kMaxExpandedTerms = 20'000;

// Upper bound on the number of terms of b^e: multinomial count of the
// term choices, capped by the number of monomials of the result degree.
double expanded_term_bound(const Polynomial& b, std::uint64_t e) {
  const double t = static_cast<double>(b.size());
  if (t <= 1 || e <= 1) return t;
  auto log_binom = [](double top, double k) {
    return std::lgamma(top + 1) - std::lgamma(k + 1) - std::lgamma(top - k + 1);
  };
  const double ed = static_cast<double>(e);
  const double n = static_cast<double>(b.nvars());
  const double d = ed * static_cast<double>(b.total_degree());
  return std::exp(std::min(log_binom(ed + t - 1, t - 1), log_binom(n + d, n)));
}

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const VarTable* vars, Mode mode, const Bindings& bindings)
      : text_(text), vars_(vars), mode_(mode), bindings_(bindings), nvars_(vars ? vars->size() : 1) {}

  Polynomial parse() {
    skip_space();
    if (at_end()) fail("empty expression");
    Polynomial p = expr(0);
    skip_space();
    if (!at_end()) fail(std::string("unexpected '") + peek() + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { fail_at(pos_, message); }

  [[noreturn]] void fail_at(std::size_t offset, const std::string& message) const {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k < offset && k < text_.size(); ++k) {
      if (text_[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(line, column, message);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  static bool is_digit(char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Polynomial constant(const Coefficient& c) const { return Polynomial::constant(nvars_, c); }

  Polynomial expr(int depth) {
    if (depth > kMaxNesting) fail("expression nested too deeply");
    Polynomial acc = term(depth);
    for (;;) {
      skip_space();
      const char op = peek();
      if (op != '+' && op != '-') return acc;
      ++pos_;
      Polynomial rhs = term(depth);
      if (op == '+') {
        acc += rhs;
      } else {
        acc -= rhs;
      }
    }
  }

  Polynomial term(int depth) {
    Polynomial acc = unary(depth);
    for (;;) {
      skip_space();
      if (peek() != '*') return acc;
      ++pos_;
      acc *= unary(depth);
    }
  }

  Polynomial unary(int depth) {
    if (depth > kMaxNesting) fail("expression nested too deeply");
    skip_space();
    if (peek() == '-') {
      ++pos_;
      return -unary(depth + 1);
    }
    if (peek() == '+') {
      ++pos_;
      return unary(depth + 1);
    }
    return factor(depth);
  }

  Polynomial factor(int depth) {
    Polynomial b = base(depth);
    skip_space();
    if (peek() != '^') return b;
    ++pos_;
    skip_space();
    const std::size_t start = pos_;
    if (!is_digit(peek())) fail("exponent must be a non-negative integer");
    std::uint64_t e = 0;
    while (is_digit(peek())) {
      e = e * 10 + static_cast<std::uint64_t>(peek() - '0');
      if (e > kMaxExponent) fail_at(start, "exponent too large");
      ++pos_;
    }
    if (peek() == '/' || peek() == '.') fail_at(start, "exponent must be a non-negative integer");
    if (expanded_term_bound(b, e) > kMaxExpandedTerms) fail_at(start, "power expands to too many terms");
    try {
      return pow(b, e);
    } catch (const DegreeOverflow& ex) {
      fail_at(start, ex.what());
    }
  }

  Polynomial base(int depth) {
    skip_space();
    if (at_end()) fail("unexpected end of expression");
    const char ch = peek();
    if (ch == '(') {
      const std::size_t open = pos_;
      ++pos_;
      Polynomial inner = expr(depth + 1);
      skip_space();
      if (peek() != ')') fail_at(open, "unbalanced '('");
      ++pos_;
      return inner;
    }
    if (is_digit(ch)) return constant(number());
    if (std::isalpha(static_cast<unsigned char>(ch))) return identifier();
    fail(std::string("unexpected '") + ch + "'");
  }

  Coefficient number() {
    const std::size_t start = pos_;
    while (is_digit(peek())) ++pos_;
    const std::string_view digits = text_.substr(start, pos_ - start);

    if (peek() == '/' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1])) {
      ++pos_;
      const std::size_t den_start = pos_;
      while (is_digit(peek())) ++pos_;
      mpz_class num{std::string(digits)};
      mpz_class den{std::string(text_.substr(den_start, pos_ - den_start))};
      if (den == 0) fail_at(den_start, "zero denominator");
      mpq_class q(num, den);
      q.canonicalize();
      if (mode_ == Mode::Exact) return Coefficient::exact(q);
      return Coefficient::floating(q.get_d());
    }

    const bool has_fraction = peek() == '.';
    bool has_exponent = false;
    if (has_fraction) {
      ++pos_;
      while (is_digit(peek())) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && is_digit(text_[look])) {
        has_exponent = true;
        pos_ = look;
        while (is_digit(peek())) ++pos_;
      }
    }
    if (has_fraction || has_exponent) {
      if (mode_ == Mode::Exact) fail_at(start, "decimal literal in Exact mode");
      double value = 0.0;
      const auto* first = text_.data() + start;
      const auto* last = text_.data() + pos_;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last) fail_at(start, "malformed decimal literal");
      return Coefficient::floating(value);
    }
    mpz_class z{std::string(digits)};
    if (mode_ == Mode::Exact) return Coefficient::exact(mpq_class(z));
    return Coefficient::floating(z.get_d());
  }

  Polynomial identifier() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "i") return constant(Coefficient::imaginary_unit(mode_));
    if (vars_ != nullptr) {
      if (auto k = vars_->index_of(name)) return Polynomial::variable(nvars_, *k, mode_);
    }
    if (auto it = bindings_.find(name); it != bindings_.end()) {
      const Coefficient& c = it->second;
      if (c.mode() == mode_) return constant(c);
      if (mode_ == Mode::Float) return constant(c.to_float());
      fail_at(start, "parameter '" + std::string(name) + "' is Float but the expression is Exact");
    }
    fail_at(start, "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  const VarTable* vars_;
  Mode mode_;
  const Bindings& bindings_;
  std::size_t nvars_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_expression(std::string_view text, const VarTable& vars, Mode mode, const Bindings& bindings) {
  if (vars.size() == 0) throw std::invalid_argument("parse_expression: empty variable table");
  return ExpressionParser(text, &vars, mode, bindings).parse();
}

Coefficient parse_constant(std::string_view text, Mode mode, const Bindings& bindings) {
  const Polynomial p = ExpressionParser(text, nullptr, mode, bindings).parse();
  return p.is_zero() ? Coefficient::zero(mode) : p.terms().begin()->second;
}

std::string render(const Polynomial& p, const VarTable& vars) { return to_string(p, vars.names()); }

}  // namespace pfi
