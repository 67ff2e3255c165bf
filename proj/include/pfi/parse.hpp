#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pfi/polynomial.hpp"

namespace pfi {

/// Ordered list of distinct coordinate names; a name's index is its position.
class VarTable {
 public:
  VarTable() = default;
  /// Throws std::invalid_argument on an empty list, a duplicate, a malformed
  /// identifier or the reserved name `i`.
  explicit VarTable(std::vector<std::string> names);

  /// names prefix1..prefixN
  static VarTable numbered(std::string_view prefix, std::size_t count);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& operator[](std::size_t k) const { return names_.at(k); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const VarTable&, const VarTable&) = default;

 private:
  std::vector<std::string> names_;
};

bool is_identifier(std::string_view s);

/// Parse failure with a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Named numeric constants substituted while parsing (e.g. `c` in `c*q1^2`).
using Bindings = std::map<std::string, Coefficient, std::less<>>;

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := unary ('*' unary)*
///   unary  := ('-'|'+') unary | factor
///   factor := base ('^' uint)?
///   base   := number | 'i' | ident | '(' expr ')'
/// Numbers are integers, fractions `a/b` and (Float mode only) decimals.
Polynomial parse_expression(std::string_view text, const VarTable& vars, Mode mode,
                            const Bindings& bindings = {});

/// Numeric expression with no variables (used for mu entries and parameters).
Coefficient parse_constant(std::string_view text, Mode mode, const Bindings& bindings = {});

/// Canonical rendering; parse_expression(render(p, vars), vars, Exact) == p.
std::string render(const Polynomial& p, const VarTable& vars);

}  // namespace pfi
