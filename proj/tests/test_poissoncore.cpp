#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

namespace pfi {
namespace {

using testing::P;

StructureMatrix constant_structure(const CoeffMatrix& a) {
  std::vector<std::vector<Polynomial>> rows(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) rows[r].push_back(Polynomial::constant(a.rows(), a(r, c)));
  return StructureMatrix(std::move(rows));
}

PolyMap example1_map() {
  const auto x4 = testing::x_vars(4);
  return PolyMap(testing::parse_all(testing::kExample1Forward, x4),
                 testing::parse_all(testing::kExample1Inverse, x4));
}

TEST(CanonicalMatrix, Blocks) {
  auto s2 = canonical_matrix(1, 0);
  EXPECT_EQ(s2, constant_structure(CoeffMatrix({{0, 1}, {-1, 0}}, Mode::Exact)));
  auto s4 = canonical_matrix(2, 0);
  EXPECT_EQ(s4, constant_structure(CoeffMatrix({{0, 0, 1, 0}, {0, 0, 0, 1}, {-1, 0, 0, 0}, {0, -1, 0, 0}},
                                               Mode::Exact)));
  auto s5 = canonical_matrix(2, 1);
  EXPECT_EQ(s5.n(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_TRUE(s5(4, k).is_zero());
    EXPECT_TRUE(s5(k, 4).is_zero());
  }
  EXPECT_THROW(canonical_matrix(0, 1), std::invalid_argument);
}

TEST(StructureMatrix, RejectsNonSkew) {
  const auto x2 = testing::x_vars(2);
  std::vector<std::vector<Polynomial>> rows = {{P("0", x2), P("x1", x2)}, {P("x1", x2), P("0", x2)}};
  EXPECT_THROW(StructureMatrix{rows}, std::invalid_argument);
  rows = {{P("x2", x2), P("x1", x2)}, {P("-x1", x2), P("0", x2)}};
  EXPECT_THROW(StructureMatrix{rows}, std::invalid_argument);
}

TEST(PolyMap, RejectsWrongInverse) {
  const auto x2 = testing::x_vars(2);
  std::vector<Polynomial> f = {P("x1", x2), P("x2 + x1^2", x2)};
  std::vector<Polynomial> g = {P("x1", x2), P("x2 + x1^2", x2)};
  EXPECT_THROW(PolyMap(f, g), std::invalid_argument);
  std::vector<Polynomial> ginv = {P("x1", x2), P("x2 - x1^2", x2)};
  EXPECT_NO_THROW(PolyMap(f, ginv));
}

TEST(CheckJacobi, ConstantMatrixPasses) {
  EXPECT_TRUE(check_jacobi(canonical_matrix(2, 1)).ok);
  EXPECT_TRUE(check_jacobi(constant_structure(CoeffMatrix({{0, 3, -2}, {-3, 0, 5}, {2, -5, 0}}, Mode::Exact))).ok);
}

TEST(CheckJacobi, Example1PassesAndFlippedEntryFails) {
  auto j = build_structure_from_diffeo(example1_map(), 2, 0);
  EXPECT_TRUE(check_jacobi(j).ok);

  auto rows = j.rows();
  rows[0][2] = -rows[0][2];
  rows[2][0] = -rows[2][0];
  auto report = check_jacobi(StructureMatrix(rows));
  EXPECT_FALSE(report.ok);
  ASSERT_FALSE(report.violations.empty());
  EXPECT_FALSE(report.violations.front().residual.is_zero());
}

TEST(CheckJacobi, NonPoissonThreeDimensional) {
  const auto x3 = testing::x_vars(3);
  // J = [[0, 1, 0], [-1, 0, x2], [0, -x2, 0]] violates Jacobi.
  auto j = StructureMatrix::from_upper(3, {{P("1", x3), P("0", x3)}, {P("x2", x3)}}, 3, Mode::Exact);
  EXPECT_FALSE(check_jacobi(j).ok);
  // so(3): J = [[0, -x3, x2], [x3, 0, -x1], [-x2, x1, 0]] satisfies it.
  auto so3 = StructureMatrix::from_upper(3, {{P("-x3", x3), P("x2", x3)}, {P("-x1", x3)}}, 3, Mode::Exact);
  EXPECT_TRUE(check_jacobi(so3).ok);
  EXPECT_TRUE(check_casimir(so3, P("x1^2 + x2^2 + x3^2", x3)));
}

TEST(BuildFromDiffeo, Example1MatchesPrintedEntries) {
  const auto x4 = testing::x_vars(4);
  auto j = build_structure_from_diffeo(example1_map(), 2, 0);
  const std::size_t idx[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (std::size_t k = 0; k < 6; ++k) {
    const auto [r, c] = idx[k];
    EXPECT_EQ(j(r, c), P(testing::kExample1Upper[k], x4)) << "J_" << r + 1 << c + 1;
    EXPECT_EQ(j(c, r), -P(testing::kExample1Upper[k], x4));
  }
}

TEST(BuildFromDiffeo, IdentityGivesCanonical) {
  EXPECT_EQ(build_structure_from_diffeo(PolyMap::identity(4, Mode::Exact), 2, 0), canonical_matrix(2, 0));
  EXPECT_THROW(build_structure_from_diffeo(PolyMap::identity(4, Mode::Exact), 2, 1), std::invalid_argument);
}

TEST(BuildFromDiffeo, BlockLinearMapGivesCongruentConstant) {
  const CoeffMatrix b({{2, 1}, {1, 1}}, Mode::Exact);
  const CoeffMatrix c({{1, 0}, {3, 1}}, Mode::Exact);
  const CoeffMatrix d({{5}}, Mode::Exact);
  const auto a = CoeffMatrix::block_diagonal({&b, &c, &d});
  const auto a_inv = *a.inverse();
  const CoeffMatrix s({{0, 0, 1, 0, 0}, {0, 0, 0, 1, 0}, {-1, 0, 0, 0, 0}, {0, -1, 0, 0, 0}, {0, 0, 0, 0, 0}},
                      Mode::Exact);
  auto j = build_structure_from_diffeo(PolyMap::linear(a), 2, 1);
  EXPECT_EQ(j, constant_structure(a_inv * s * a_inv.transpose()));
}

TEST(TransformStructure, IdentityAndLinear) {
  auto j = build_structure_from_diffeo(example1_map(), 2, 0);
  EXPECT_EQ(transform_structure(j, PolyMap::identity(4, Mode::Exact)), j);

  const CoeffMatrix a({{1, 2, 0}, {0, 1, 0}, {1, 0, 1}}, Mode::Exact);
  const CoeffMatrix k({{0, 3, -2}, {-3, 0, 5}, {2, -5, 0}}, Mode::Exact);
  EXPECT_EQ(transform_structure(constant_structure(k), PolyMap::linear(a)), constant_structure(a * k * a.transpose()));
}

TEST(TransformStructure, Example1BackToCanonical) {
  auto map = example1_map();
  auto j = build_structure_from_diffeo(map, 2, 0);
  EXPECT_EQ(transform_structure(j, map), canonical_matrix(2, 0));
}

TEST(HamiltonianVectorField, Examples) {
  const VarTable qp1({"q", "p"});
  auto f = hamiltonian_vector_field(canonical_matrix(1, 0), P("1/2*(p^2 + q^2)", qp1));
  EXPECT_EQ(f[0], P("p", qp1));
  EXPECT_EQ(f[1], P("-q", qp1));

  const auto qp = testing::qp_vars();
  Bindings c = {{"c", Coefficient::exact(mpq_class(2, 3))}};
  auto h = parse_expression("1/2*(p1^2 + p2^2) + c*q1^2 + q2^4", qp, Mode::Exact, c);
  auto g = hamiltonian_vector_field(canonical_matrix(2, 0), h);
  EXPECT_EQ(g[0], P("p1", qp));
  EXPECT_EQ(g[1], P("p2", qp));
  EXPECT_EQ(g[2], P("-4/3*q1", qp));
  EXPECT_EQ(g[3], P("-4*q2^3", qp));

  auto zero = hamiltonian_vector_field(build_structure_from_diffeo(example1_map(), 2, 0), P("7", testing::x_vars(4)));
  for (const auto& comp : zero) EXPECT_TRUE(comp.is_zero());
}

TEST(CheckCasimir, Examples) {
  const VarTable qpz({"q1", "p1", "z1"});
  EXPECT_TRUE(check_casimir(canonical_matrix(1, 1), P("z1", qpz)));
  EXPECT_FALSE(check_casimir(canonical_matrix(1, 0), P("q", VarTable({"q", "p"}))));

  std::mt19937_64 rng(5);
  auto map = testing::random_triangular_map(rng, 5);
  auto j = build_structure_from_diffeo(map, 2, 1);
  EXPECT_TRUE(check_casimir(j, map.forward()[4]));
  EXPECT_NO_THROW(PoissonSystem(j, map.forward()[0], {map.forward()[4]}, testing::x_vars(5), 2, 1));
  EXPECT_THROW(PoissonSystem(j, map.forward()[0], {map.forward()[0]}, testing::x_vars(5), 2, 1),
               std::invalid_argument);
}

TEST(GenericRank, Examples) {
  EXPECT_EQ(generic_rank(canonical_matrix(2, 0)), 4u);
  EXPECT_EQ(generic_rank(canonical_matrix(1, 1)), 2u);
  EXPECT_EQ(generic_rank(build_structure_from_diffeo(example1_map(), 2, 0), 8, 42), 4u);
  EXPECT_EQ(generic_rank(build_structure_from_diffeo(example1_map(), 2, 0), 8, 42),
            generic_rank(build_structure_from_diffeo(example1_map(), 2, 0), 8, 42));
}

// ---------------------------------------------------------------- properties

class DiffeoProperties : public ::testing::TestWithParam<int> {};

TEST_P(DiffeoProperties, BuiltStructureIsPoissonAndTransformsBack) {
  std::mt19937_64 rng(500 + GetParam());
  const std::size_t n = 2 + GetParam() % 3;
  const std::size_t m = 1 + (GetParam() / 3) % (n / 2);
  const std::size_t s = n - 2 * m;
  auto map = testing::random_triangular_map(rng, n);
  auto j = build_structure_from_diffeo(map, m, s);
  EXPECT_TRUE(check_jacobi(j).ok);
  for (std::size_t a = 0; a < n; ++a) {
    EXPECT_TRUE(j(a, a).is_zero());
    for (std::size_t b = 0; b < n; ++b) EXPECT_EQ(j(a, b), -j(b, a));
  }
  EXPECT_EQ(transform_structure(j, map), canonical_matrix(m, s));
  for (std::size_t k = 0; k < s; ++k) EXPECT_TRUE(check_casimir(j, map.forward()[2 * m + k]));
}

TEST_P(DiffeoProperties, TransformIsFunctorial) {
  std::mt19937_64 rng(900 + GetParam());
  const std::size_t n = 2 + GetParam() % 2;
  auto base = testing::random_triangular_map(rng, n);
  auto j = build_structure_from_diffeo(base, 1, n - 2);
  auto phi = testing::random_triangular_map(rng, n);
  auto psi = testing::random_triangular_map(rng, n);
  EXPECT_EQ(transform_structure(transform_structure(j, phi), psi), transform_structure(j, phi.then(psi)));
}

TEST_P(DiffeoProperties, HamiltonianIsConserved) {
  std::mt19937_64 rng(1300 + GetParam());
  const std::size_t n = 2 + GetParam() % 3;
  auto map = testing::random_triangular_map(rng, n);
  auto j = build_structure_from_diffeo(map, 1, n - 2);
  auto h = testing::random_polynomial(rng, n, 3, 5);
  EXPECT_TRUE(lie_derivative(hamiltonian_vector_field(j, h), h).is_zero());
}

INSTANTIATE_TEST_SUITE_P(Random, DiffeoProperties, ::testing::Range(0, 12));

}  // namespace
}  // namespace pfi
