#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pfi/integrals.hpp"
#include "pfi/matrix.hpp"
#include "pfi/parse.hpp"
#include "pfi/poisson.hpp"

namespace pfi {

/// Schema or consistency violation in a problem file. The message starts
/// with the offending field.
class ProblemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Where the structure matrix of a problem comes from.
enum class StructureSource { Canonical, Phi, ABlocks, TheoremOneA, Explicit };
std::string_view to_string(StructureSource source);

struct LinearBlocks {
  CoeffMatrix B;                 // m x m, acts on q
  CoeffMatrix C;                 // m x m, acts on p
  std::optional<CoeffMatrix> D;  // s x s, acts on z
};

/// A validated problem file.
///
/// Native expressions (phi, phi_inverse, structure, H, cofactor) use
/// `variables`; V, W and F use `chart_variables` (default q1..qm, p1..pm,
/// z1..zs), with V over the first m names and W over the last s.
struct ProblemDef {
  std::string name;
  VarTable variables;
  VarTable chart_variables;
  Mode mode = Mode::Exact;
  std::size_t m = 0;
  std::size_t s = 0;
  Bindings parameters;
  std::vector<Coefficient> mu;
  Polynomial V{1, Mode::Exact};
  std::optional<Polynomial> W;
  std::optional<std::vector<Polynomial>> phi;
  std::optional<std::vector<Polynomial>> phi_inverse;
  std::optional<LinearBlocks> A_blocks;
  std::optional<CoeffMatrix> A;
  std::optional<std::vector<std::vector<Polynomial>>> structure;  // full grid, not yet checked for skew
  std::optional<Polynomial> H;
  std::optional<Polynomial> F;
  std::optional<Polynomial> cofactor;

  std::size_t n() const { return 2 * m + s; }
  StructureSource source() const;
  NaturalSpec spec() const { return NaturalSpec(m, mu, V); }
};

/// Parses and validates JSON text; every expression is parsed eagerly.
/// Throws ProblemError (schema, dimensions, conflicting structure sources)
/// or ParseError (bad expression text, prefixed with the field name).
ProblemDef parse_problem(std::string_view text);
ProblemDef load_problem(const std::filesystem::path& path);

/// Theorem kind implied by the file: A -> T1; otherwise T3 when s > 0, else T2.
TheoremKind infer_theorem(const ProblemDef& def);

/// The construction of the requested (or inferred) kind. Throws ProblemError
/// when the file cannot support it (explicit structure, T1 with s > 0, ...).
TheoremInstance make_instance(const ProblemDef& def, std::optional<TheoremKind> kind = std::nullopt);

/// The file's Poisson system in native variables.
PoissonSystem make_system(const ProblemDef& def);

}  // namespace pfi
