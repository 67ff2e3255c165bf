#include "pfi/problem.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pfi {

using nlohmann::json;

namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "name", "description", "variables", "chart_variables", "mode", "m", "s", "parameters", "mu", "V", "W",
    "phi", "phi_inverse", "A_blocks", "A", "structure", "H", "F", "cofactor"};

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ProblemError(field + ": " + message);
}

std::size_t count_field(const json& doc, const char* key, std::size_t fallback, bool required) {
  if (!doc.contains(key)) {
    if (required) fail(key, "missing");
    return fallback;
  }
  const auto& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(key, "must be a non-negative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

VarTable names_field(const json& v, const std::string& field, std::size_t expected) {
  if (!v.is_array()) fail(field, "must be an array of names");
  std::vector<std::string> names;
  for (const auto& e : v) {
    if (!e.is_string()) fail(field, "must be an array of names");
    names.push_back(e.get<std::string>());
  }
  if (names.size() != expected)
    fail(field, "has " + std::to_string(names.size()) + " names, expected 2m+s = " + std::to_string(expected));
  try {
    return VarTable(std::move(names));
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
}

Coefficient scalar(const json& v, Mode mode, const Bindings& bindings, const std::string& field) {
  if (v.is_number_integer()) return Coefficient::integer(v.get<long>(), mode);
  if (v.is_number_float()) {
    if (mode == Mode::Exact) fail(field, "decimal value in Exact mode (write a fraction string)");
    return Coefficient::floating(v.get<double>());
  }
  if (v.is_string()) {
    try {
      return parse_constant(v.get<std::string>(), mode, bindings);
    } catch (const ParseError& e) {
      fail(field, e.what());
    }
  }
  fail(field, "must be a number or a numeric string");
}

Polynomial expression(const json& v, const VarTable& vars, Mode mode, const Bindings& bindings,
                      const std::string& field) {
  if (!v.is_string()) fail(field, "must be an expression string");
  try {
    return parse_expression(v.get<std::string>(), vars, mode, bindings);
  } catch (const ParseError& e) {
    fail(field, e.what());
  }
}

std::vector<Polynomial> expression_list(const json& v, const VarTable& vars, Mode mode, const Bindings& bindings,
                                        const std::string& field, std::size_t expected) {
  if (!v.is_array()) fail(field, "must be an array of expression strings");
  if (v.size() != expected)
    fail(field, "has " + std::to_string(v.size()) + " entries, expected 2m+s = " + std::to_string(expected));
  std::vector<Polynomial> out;
  for (std::size_t k = 0; k < v.size(); ++k)
    out.push_back(expression(v[k], vars, mode, bindings, field + "[" + std::to_string(k) + "]"));
  return out;
}

CoeffMatrix matrix_field(const json& v, std::size_t size, Mode mode, const Bindings& bindings,
                         const std::string& field) {
  if (!v.is_array() || v.size() != size) fail(field, "must be a " + std::to_string(size) + "x" + std::to_string(size) + " matrix");
  CoeffMatrix out(size, size, mode);
  for (std::size_t r = 0; r < size; ++r) {
    if (!v[r].is_array() || v[r].size() != size)
      fail(field, "must be a " + std::to_string(size) + "x" + std::to_string(size) + " matrix");
    for (std::size_t c = 0; c < size; ++c)
      out(r, c) = scalar(v[r][c], mode, bindings, field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return out;
}

// Full n x n grid, or the strict upper triangle (row i holds n-1-i entries).
std::vector<std::vector<Polynomial>> structure_field(const json& v, const VarTable& vars, Mode mode,
                                                     const Bindings& bindings, std::size_t n) {
  const std::string field = "structure";
  if (!v.is_array()) fail(field, "must be an array of rows");
  bool full = v.size() == n;
  bool upper = v.size() == n || v.size() + 1 == n;
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (!v[r].is_array()) fail(field, "must be an array of rows");
    full = full && v[r].size() == n;
    upper = upper && v[r].size() == n - 1 - r;
  }
  if (!full && !upper) fail(field, "must be a full (2m+s)x(2m+s) grid or its strict upper triangle");

  std::vector<std::vector<Polynomial>> grid(n, std::vector<Polynomial>(n, Polynomial(n, mode)));
  auto entry = [&](std::size_t r, std::size_t c, const json& e) {
    return expression(e, vars, mode, bindings, field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  };
  if (full) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) grid[r][c] = entry(r, c, v[r][c]);
  } else {
    for (std::size_t r = 0; r < v.size(); ++r)
      for (std::size_t k = 0; k < v[r].size(); ++k) {
        const std::size_t c = r + 1 + k;
        grid[r][c] = entry(r, k, v[r][k]);
        grid[c][r] = -grid[r][c];
      }
  }
  return grid;
}

Mode mode_field(const json& doc) {
  if (!doc.contains("mode")) return Mode::Exact;
  if (!doc.at("mode").is_string()) fail("mode", "must be \"exact\" or \"float\"");
  std::string text = doc.at("mode").get<std::string>();
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
  if (text == "exact") return Mode::Exact;
  if (text == "float") return Mode::Float;
  fail("mode", "must be \"exact\" or \"float\"");
}

VarTable default_chart(std::size_t m, std::size_t s) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= m; ++i) names.push_back("q" + std::to_string(i));
  for (std::size_t i = 1; i <= m; ++i) names.push_back("p" + std::to_string(i));
  for (std::size_t i = 1; i <= s; ++i) names.push_back("z" + std::to_string(i));
  return VarTable(std::move(names));
}

VarTable slice(const VarTable& vars, std::size_t lo, std::size_t hi) {
  return VarTable(std::vector<std::string>(vars.names().begin() + static_cast<std::ptrdiff_t>(lo),
                                           vars.names().begin() + static_cast<std::ptrdiff_t>(hi)));
}

}  // namespace

std::string_view to_string(StructureSource source) {
  switch (source) {
    case StructureSource::Canonical: return "canonical";
    case StructureSource::Phi: return "phi";
    case StructureSource::ABlocks: return "A_blocks";
    case StructureSource::TheoremOneA: return "A";
    case StructureSource::Explicit: return "structure";
  }
  return "?";
}

StructureSource ProblemDef::source() const {
  if (phi) return StructureSource::Phi;
  if (A_blocks) return StructureSource::ABlocks;
  if (A) return StructureSource::TheoremOneA;
  if (structure) return StructureSource::Explicit;
  return StructureSource::Canonical;
}

ProblemDef parse_problem(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProblemError(std::string("json: ") + e.what());
  }
  if (!doc.is_object()) throw ProblemError("json: top level must be an object");
  for (const auto& [key, value] : doc.items())
    if (!kKnownKeys.contains(key)) fail(key, "unknown field");

  ProblemDef def;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) fail("name", "must be a string");
    def.name = doc.at("name").get<std::string>();
  }
  def.mode = mode_field(doc);
  def.m = count_field(doc, "m", 0, true);
  def.s = count_field(doc, "s", 0, false);
  if (def.m == 0) fail("m", "must be at least 1");
  const std::size_t n = def.n();

  def.chart_variables = doc.contains("chart_variables") ? names_field(doc.at("chart_variables"), "chart_variables", n)
                                                        : default_chart(def.m, def.s);
  def.variables = doc.contains("variables") ? names_field(doc.at("variables"), "variables", n) : def.chart_variables;

  if (doc.contains("parameters")) {
    const auto& params = doc.at("parameters");
    if (!params.is_object()) fail("parameters", "must be an object of name: value");
    for (const auto& [key, value] : params.items()) {
      if (!is_identifier(key) || key == "i") fail("parameters." + key, "not a valid parameter name");
      if (def.variables.index_of(key) || def.chart_variables.index_of(key))
        fail("parameters." + key, "shadows a variable");
      def.parameters.emplace(key, scalar(value, def.mode, {}, "parameters." + key));
    }
  }
  const auto& b = def.parameters;

  if (!doc.contains("mu")) fail("mu", "missing");
  if (!doc.at("mu").is_array() || doc.at("mu").size() != def.m) fail("mu", "must hold m values");
  for (std::size_t i = 0; i < def.m; ++i)
    def.mu.push_back(scalar(doc.at("mu")[i], def.mode, b, "mu[" + std::to_string(i) + "]"));

  if (!doc.contains("V")) fail("V", "missing");
  def.V = expression(doc.at("V"), slice(def.chart_variables, 0, def.m), def.mode, b, "V");
  if (def.V.is_constant()) fail("V", "must be non-constant");

  if (doc.contains("W")) {
    if (def.s == 0) fail("W", "needs s >= 1");
    def.W = expression(doc.at("W"), slice(def.chart_variables, 2 * def.m, n), def.mode, b, "W");
  }

  const bool has_phi = doc.contains("phi"), has_inv = doc.contains("phi_inverse");
  if (has_phi != has_inv) fail(has_phi ? "phi_inverse" : "phi", "phi and phi_inverse must be given together");
  std::vector<std::string> sources;
  for (const char* key : {"phi", "A_blocks", "A", "structure"})
    if (doc.contains(key)) sources.emplace_back(key);
  if (sources.size() > 1) fail(sources[1], "conflicts with " + sources[0] + " (give one structure source)");

  if (has_phi) {
    def.phi = expression_list(doc.at("phi"), def.variables, def.mode, b, "phi", n);
    def.phi_inverse = expression_list(doc.at("phi_inverse"), def.variables, def.mode, b, "phi_inverse", n);
  }
  if (doc.contains("A_blocks")) {
    const auto& blocks = doc.at("A_blocks");
    if (!blocks.is_object()) fail("A_blocks", "must be an object with B, C and (for s > 0) D");
    for (const auto& [key, value] : blocks.items())
      if (key != "B" && key != "C" && key != "D") fail("A_blocks." + key, "unknown block");
    if (!blocks.contains("B") || !blocks.contains("C")) fail("A_blocks", "needs B and C");
    LinearBlocks lb{matrix_field(blocks.at("B"), def.m, def.mode, b, "A_blocks.B"),
                    matrix_field(blocks.at("C"), def.m, def.mode, b, "A_blocks.C"), std::nullopt};
    if (def.s > 0) {
      if (!blocks.contains("D")) fail("A_blocks.D", "missing (s > 0)");
      lb.D = matrix_field(blocks.at("D"), def.s, def.mode, b, "A_blocks.D");
    } else if (blocks.contains("D")) {
      fail("A_blocks.D", "given but s = 0");
    }
    def.A_blocks = std::move(lb);
  }
  if (doc.contains("A")) {
    if (def.s != 0) fail("A", "the linear canonical change needs s = 0");
    def.A = matrix_field(doc.at("A"), def.m, def.mode, b, "A");
  }
  if (doc.contains("structure")) def.structure = structure_field(doc.at("structure"), def.variables, def.mode, b, n);
  if (doc.contains("H")) {
    if (!def.structure) fail("H", "only allowed with an explicit structure (otherwise H comes from mu and V)");
    def.H = expression(doc.at("H"), def.variables, def.mode, b, "H");
  }
  if (doc.contains("F")) def.F = expression(doc.at("F"), def.chart_variables, def.mode, b, "F");
  if (doc.contains("cofactor")) def.cofactor = expression(doc.at("cofactor"), def.variables, def.mode, b, "cofactor");
  return def;
}

ProblemDef load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ProblemError(path.string() + ": cannot open");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_problem(buffer.str());
}

TheoremKind infer_theorem(const ProblemDef& def) {
  if (def.A) return TheoremKind::T1;
  return def.s > 0 ? TheoremKind::T3 : TheoremKind::T2;
}

TheoremInstance make_instance(const ProblemDef& def, std::optional<TheoremKind> requested) {
  if (def.structure) throw ProblemError("structure: explicit structure matrices have no theorem construction");
  const TheoremKind kind = requested.value_or(infer_theorem(def));
  const auto spec = def.spec();

  if (kind == TheoremKind::T1) {
    if (def.s != 0) throw ProblemError("theorem 1 needs s = 0");
    if (def.phi || def.A_blocks) throw ProblemError("theorem 1 takes A, not phi or A_blocks");
    return TheoremInstance::theorem1(spec, def.A ? *def.A : CoeffMatrix::identity(def.m, def.mode));
  }
  if (def.A) throw ProblemError("A: theorem " + std::string(to_string(kind)) + " takes phi or A_blocks");
  if (kind == TheoremKind::T2 && def.s != 0) throw ProblemError("theorem 2 needs s = 0 (use theorem 3)");

  auto map = [&]() -> PolyMap {
    if (def.phi) return PolyMap(*def.phi, *def.phi_inverse);
    if (def.A_blocks) {
      const auto& lb = *def.A_blocks;
      if (lb.D) return PolyMap::linear(CoeffMatrix::block_diagonal({&lb.B, &lb.C, &*lb.D}));
      return PolyMap::linear(CoeffMatrix::block_diagonal({&lb.B, &lb.C}));
    }
    return PolyMap::identity(def.n(), def.mode);
  }();
  if (kind == TheoremKind::T2) return TheoremInstance::theorem2(spec, std::move(map));
  return TheoremInstance::theorem3(spec, std::move(map), def.s, def.W);
}

PoissonSystem make_system(const ProblemDef& def) {
  if (def.structure) {
    StructureMatrix j(*def.structure);
    Polynomial h = def.H ? *def.H : def.spec().natural_hamiltonian(def.s);
    return PoissonSystem(std::move(j), std::move(h), {}, def.variables, def.m, def.s);
  }
  return build_system(make_instance(def), def.variables);
}

}  // namespace pfi
