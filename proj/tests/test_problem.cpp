#include <string>

#include <gtest/gtest.h>

#include "pfi/problem.hpp"
#include "support.hpp"

namespace pfi {
namespace {

const std::string kDir = PFI_PROBLEMS_DIR;

// Minimal valid file with extra fields spliced in.
std::string doc(const std::string& extra = "", const std::string& base = R"("m": 2, "mu": [1, 1], "V": "q1^2 + q2^4")") {
  return "{" + base + (extra.empty() ? "" : ", " + extra) + "}";
}

TEST(ParseProblem, Minimal) {
  auto def = parse_problem(doc());
  EXPECT_EQ(def.mode, Mode::Exact);
  EXPECT_EQ(def.n(), 4u);
  EXPECT_EQ(def.variables.names(), (std::vector<std::string>{"q1", "q2", "p1", "p2"}));
  EXPECT_EQ(def.source(), StructureSource::Canonical);
  EXPECT_EQ(make_system(def).hamiltonian(), testing::example2_system().hamiltonian());
}

TEST(ParseProblem, Example2File) {
  auto def = load_problem(kDir + "/example2.json");
  EXPECT_EQ(def.mode, Mode::Float);
  ASSERT_TRUE(def.F.has_value());
  EXPECT_LT((*def.F - testing::example2_F()).max_abs_coefficient(), 1e-15);
  EXPECT_EQ(infer_theorem(def), TheoremKind::T2);
}

TEST(ParseProblem, Example1FileIsVerbatim) {
  auto def = load_problem(kDir + "/example1.json");
  EXPECT_EQ(def.source(), StructureSource::Phi);
  EXPECT_EQ(*def.phi, testing::parse_all(testing::kExample1Forward, testing::x_vars(4)));
  auto sys = make_system(def);
  const auto upper = testing::parse_all(testing::kExample1Upper, testing::x_vars(4));
  EXPECT_EQ(sys.structure()(1, 3), upper[4]);
}

TEST(ParseProblem, AllShippedFilesLoad) {
  for (const char* name : {"example1", "example1_integral", "example2", "example3", "example4", "theorem1"}) {
    SCOPED_TRACE(name);
    auto def = load_problem(kDir + "/" + name + ".json");
    auto sys = make_system(def);
    EXPECT_TRUE(check_jacobi(sys.structure()).ok);
  }
}

TEST(ParseProblem, ModeIsCaseInsensitive) {
  EXPECT_EQ(parse_problem(doc(R"("mode": "FLOAT")")).mode, Mode::Float);
  EXPECT_EQ(parse_problem(doc(R"("mode": "Exact")")).mode, Mode::Exact);
  EXPECT_THROW(parse_problem(doc(R"("mode": "fast")")), ProblemError);
}

TEST(ParseProblem, Parameters) {
  auto def = parse_problem(doc(R"("parameters": {"c": "1/3"})", R"("m": 2, "mu": [1, "c"], "V": "c*q1^2 + q2^4")"));
  EXPECT_EQ(def.mu[1], Coefficient::exact(mpq_class(1, 3)));
  EXPECT_THROW(parse_problem(doc(R"("parameters": {"q1": 2})")), ProblemError);
}

TEST(ParseProblem, StructureGridOrTriangle) {
  auto full = parse_problem(doc(R"("structure": [["0","1","0","0"],["-1","0","0","0"],["0","0","0","q1"],["0","0","-q1","0"]])"));
  auto upper = parse_problem(doc(R"("structure": [["1","0","0"],["0","0"],["q1"]])"));
  EXPECT_EQ(*full.structure, *upper.structure);
  EXPECT_EQ(full.source(), StructureSource::Explicit);
  EXPECT_THROW(parse_problem(doc(R"("structure": [["1","0"],["0"]])")), ProblemError);
}

struct BadFile {
  const char* label;
  std::string text;
  const char* field;
};

class ProblemErrors : public ::testing::TestWithParam<BadFile> {};

TEST_P(ProblemErrors, RejectedWithField) {
  try {
    parse_problem(GetParam().text);
    FAIL() << "accepted";
  } catch (const ProblemError& e) {
    EXPECT_EQ(std::string(e.what()).rfind(GetParam().field, 0), 0u) << e.what();
  }
}

INSTANTIATE_TEST_SUITE_P(
    Files, ProblemErrors,
    ::testing::Values(
        BadFile{"not_json", "{m: 2}", "json"},
        BadFile{"array", "[1]", "json"},
        BadFile{"unknown_key", doc(R"("potential": "q1")"), "potential"},
        BadFile{"missing_m", R"({"mu": [1], "V": "q1^3"})", "m"},
        BadFile{"zero_m", R"({"m": 0, "mu": [], "V": "1"})", "m"},
        BadFile{"mu_length", R"({"m": 2, "mu": [1], "V": "q1^3"})", "mu"},
        BadFile{"constant_V", R"({"m": 2, "mu": [1, 1], "V": "3"})", "V"},
        BadFile{"decimal_exact", R"({"m": 2, "mu": [1, 0.5], "V": "q1^3"})", "mu[1]"},
        BadFile{"bad_V", R"({"m": 2, "mu": [1, 1], "V": "q1^^3"})", "V"},
        BadFile{"phi_length", doc(R"("phi": ["q1", "q2", "p1"], "phi_inverse": ["q1", "q2", "p1"])"), "phi"},
        BadFile{"phi_alone", doc(R"("phi": ["q1", "q2", "p1", "p2"])"), "phi_inverse"},
        BadFile{"two_sources", doc(R"("phi": ["q1","q2","p1","p2"], "phi_inverse": ["q1","q2","p1","p2"], "structure": [["1","0","0"],["0","0"],["0"]])"), "structure"},
        BadFile{"w_without_s", doc(R"("W": "z1")"), "W"},
        BadFile{"blocks_missing_D", R"({"m": 1, "s": 1, "mu": [1], "V": "q1^3", "A_blocks": {"B": [[1]], "C": [[1]]}})", "A_blocks.D"},
        BadFile{"A_with_s", R"({"m": 1, "s": 1, "mu": [1], "V": "q1^3", "A": [[1]]})", "A"},
        BadFile{"H_without_structure", doc(R"("H": "q1")"), "H"},
        BadFile{"variables_count", doc(R"("variables": ["x1", "x2"])"), "variables"},
        BadFile{"variables_dup", doc(R"("variables": ["x", "x", "y", "z"])"), "variables"}),
    [](const auto& info) { return std::string(info.param.label); });

TEST(MakeInstance, KindsAndRejections) {
  auto ex2 = load_problem(kDir + "/example2.json");
  EXPECT_EQ(make_instance(ex2).kind(), TheoremKind::T2);
  EXPECT_EQ(make_instance(ex2, TheoremKind::T1).kind(), TheoremKind::T1);
  EXPECT_EQ(make_instance(ex2, TheoremKind::T3).kind(), TheoremKind::T3);

  auto ex4 = load_problem(kDir + "/example4.json");
  EXPECT_EQ(infer_theorem(ex4), TheoremKind::T3);
  EXPECT_THROW(make_instance(ex4, TheoremKind::T2), ProblemError);
  EXPECT_THROW(make_instance(ex4, TheoremKind::T1), ProblemError);

  auto t1 = load_problem(kDir + "/theorem1.json");
  EXPECT_EQ(infer_theorem(t1), TheoremKind::T1);
  EXPECT_THROW(make_instance(t1, TheoremKind::T2), ProblemError);

  auto explicit_j = parse_problem(doc(R"("structure": [["1","0","0"],["0","0"],["1"]])"));
  EXPECT_THROW(make_instance(explicit_j), ProblemError);
}

TEST(MakeSystem, ExplicitStructureWithHamiltonian) {
  auto def = parse_problem(doc(R"("structure": [["1","0","0"],["0","0"],["1"]], "H": "q1*p2")"));
  auto sys = make_system(def);
  EXPECT_EQ(sys.hamiltonian(), testing::P("q1*p2", testing::qp_vars()));
  auto skewless = parse_problem(doc(R"("structure": [["0","1","0","0"],["1","0","0","0"],["0","0","0","0"],["0","0","0","0"]])"));
  EXPECT_THROW(make_system(skewless), std::invalid_argument);
}

TEST(MakeSystem, BadInverseIsRejected) {
  auto def = parse_problem(doc(R"("phi": ["q1 + q2^2","q2","p1","p2"], "phi_inverse": ["q1 + q2^2","q2","p1","p2"])"));
  EXPECT_THROW(make_system(def), std::invalid_argument);
}

}  // namespace
}  // namespace pfi
