#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pfi/darboux.hpp"
#include "pfi/linalg.hpp"
#include "support.hpp"

namespace pfi {
namespace {

using testing::P;

const VarTable kQP({"q", "p"});

VectorField oscillator_field(Mode mode = Mode::Exact) { return {P("p", kQP, mode), P("-q", kQP, mode)}; }

Polynomial example2_cofactor() {
  // K = -2 i sqrt(2) q2, the sign fixed by exact division.
  return Polynomial::term(Monomial({0, 1, 0, 0}), Coefficient::floating(0.0, -2.0 * std::sqrt(2.0)));
}

// True iff p lies in the span of basis (numerically, via rank).
bool in_span(const std::vector<Polynomial>& basis, const Polynomial& p) {
  std::vector<Monomial> monos;
  auto collect = [&](const Polynomial& q) {
    for (const auto& [m, c] : q.terms())
      if (std::find(monos.begin(), monos.end(), m) == monos.end()) monos.push_back(m);
  };
  for (const auto& b : basis) collect(b);
  collect(p);
  auto fill = [&](Eigen::MatrixXcd& a, Eigen::Index row, const Polynomial& q) {
    for (std::size_t j = 0; j < monos.size(); ++j) a(row, static_cast<Eigen::Index>(j)) = q.coefficient(monos[j]).to_complex();
  };
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(basis.size() + 1),
                                              static_cast<Eigen::Index>(monos.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) fill(a, static_cast<Eigen::Index>(k), basis[k]);
  const std::size_t without = linalg::numeric_rank(a.topRows(static_cast<Eigen::Index>(basis.size())));
  fill(a, static_cast<Eigen::Index>(basis.size()), p);
  return linalg::numeric_rank(a) == without;
}

TEST(CofactorOf, OscillatorEnergyHasZeroCofactor) {
  auto k = cofactor_of(oscillator_field(), P("q^2 + p^2", kQP));
  ASSERT_TRUE(k.has_value());
  EXPECT_TRUE(k->is_zero());
}

TEST(CofactorOf, Example2SignFixedByDivision) {
  const auto sys = testing::example2_system(1, Mode::Float);
  const auto field = hamiltonian_vector_field(sys);
  auto k = cofactor_of(field, testing::example2_F());
  ASSERT_TRUE(k.has_value());
  EXPECT_LT((*k - example2_cofactor()).max_abs_coefficient(), 1e-12);
  EXPECT_EQ(k->size(), 1u);
}

TEST(CofactorOf, NotDarbouxAndZeroF) {
  EXPECT_FALSE(cofactor_of(oscillator_field(), P("q", kQP)).has_value());
  EXPECT_THROW(cofactor_of(oscillator_field(), Polynomial(2, Mode::Exact)), std::invalid_argument);
}

TEST(VerifyCandidate, Examples) {
  const auto sys = testing::example2_system(1, Mode::Float);
  const auto field = hamiltonian_vector_field(sys);
  auto good = verify_candidate(field, testing::example2_F(), example2_cofactor());
  EXPECT_TRUE(good.ok);
  EXPECT_TRUE(good.proper);
  EXPECT_LT(good.residual.max_abs_coefficient(), 1e-10);

  auto constant = verify_candidate(oscillator_field(), P("5", kQP), Polynomial(2, Mode::Exact));
  EXPECT_TRUE(constant.ok);
  EXPECT_FALSE(constant.proper);

  auto wrong = verify_candidate(field, testing::example2_F(), -example2_cofactor());
  EXPECT_FALSE(wrong.ok);
  EXPECT_GT(wrong.residual.max_abs_coefficient(), 1.0);
}

TEST(MonomialBasis, CountsAndOrder) {
  auto b = monomial_basis(4, 2);
  EXPECT_EQ(b.size(), 15u);
  EXPECT_EQ(b.front(), Monomial({2, 0, 0, 0}));
  EXPECT_TRUE(b.back().is_unit());
  EXPECT_EQ(monomial_basis(2, 3).size(), 10u);
}

TEST(SearchWithCofactor, OscillatorFirstIntegrals) {
  auto basis = search_with_cofactor(oscillator_field(), Polynomial(2, Mode::Exact), 2);
  ASSERT_EQ(basis.size(), 2u);
  EXPECT_EQ(basis[0], P("1", kQP));
  EXPECT_EQ(basis[1], P("q^2 + p^2", kQP));
}

TEST(SearchWithCofactor, Example2RecoversF) {
  const auto field = hamiltonian_vector_field(testing::example2_system(1, Mode::Float));
  auto basis = search_with_cofactor(field, example2_cofactor(), 2);
  ASSERT_EQ(basis.size(), 1u);
  EXPECT_TRUE(in_span(basis, testing::example2_F()));
  auto report = verify_candidate(field, basis[0], example2_cofactor());
  EXPECT_TRUE(report.ok);
  EXPECT_LT(report.residual.max_abs_coefficient(), 1e-9);
}

TEST(SearchWithCofactor, Example2WrongCofactorGivesEmptyKernel) {
  const auto field = hamiltonian_vector_field(testing::example2_system(1, Mode::Exact));
  auto k = P("q1", VarTable({"q1", "q2", "p1", "p2"}));
  EXPECT_TRUE(search_with_cofactor(field, k, 2).empty());
}

TEST(SearchWithCofactor, FloatRationalKernelComesBackExact) {
  auto basis = search_with_cofactor(oscillator_field(Mode::Float), Polynomial(2, Mode::Float), 2);
  ASSERT_EQ(basis.size(), 2u);
  for (const auto& b : basis) EXPECT_EQ(b.mode(), Mode::Exact);
  EXPECT_TRUE(in_span(basis, P("q^2 + p^2", kQP)));
}

TEST(SearchWithCofactor, KernelClosedUnderScaling) {
  const auto field = hamiltonian_vector_field(testing::example2_system(1, Mode::Float));
  auto basis = search_with_cofactor(field, example2_cofactor(), 2);
  ASSERT_FALSE(basis.empty());
  for (double s : {-3.0, 0.5, 1e3})
    EXPECT_TRUE(verify_candidate(field, basis[0] * Coefficient::floating(s, s), example2_cofactor()).ok);
}

TEST(SearchBilinear, Example2RecoversPairUnderFixedSeed) {
  const auto field = hamiltonian_vector_field(testing::example2_system(1, Mode::Float));
  BilinearSearchOptions opts;
  opts.degree = 2;
  opts.attempts = 8;
  opts.seed = 1;
  auto found = search_bilinear_restricted(field, {Monomial({0, 1, 0, 0})}, opts);
  bool hit = false;
  for (const auto& c : found) {
    EXPECT_TRUE(c.proper);
    EXPECT_TRUE(verify_candidate(field, c.F, c.K).ok);
    if (in_span({c.F}, testing::example2_F())) {
      hit = true;
      EXPECT_LT((c.K - example2_cofactor()).max_abs_coefficient(), 1e-9);
    }
  }
  EXPECT_TRUE(hit);
  auto again = search_bilinear_restricted(field, {Monomial({0, 1, 0, 0})}, opts);
  ASSERT_EQ(again.size(), found.size());
  for (std::size_t k = 0; k < found.size(); ++k) EXPECT_EQ(to_string(again[k].F), to_string(found[k].F));
}

TEST(SearchBilinear, OscillatorLinearFactors) {
  BilinearSearchOptions opts;
  opts.degree = 1;
  opts.attempts = 8;
  auto found = search_bilinear_restricted(oscillator_field(), {Monomial({0, 0})}, opts);
  ASSERT_EQ(found.size(), 2u);
  EXPECT_EQ(found[0].F.mode(), Mode::Exact);
  std::vector<std::string> fs = {render(found[0].F, kQP), render(found[1].F, kQP)};
  std::sort(fs.begin(), fs.end());
  EXPECT_EQ(fs[0], "q + i*p");
  EXPECT_EQ(fs[1], "q - i*p");
  for (const auto& c : found) {
    EXPECT_TRUE(verify_candidate(oscillator_field(), c.F, c.K).ok);
    EXPECT_EQ(*cofactor_of(oscillator_field(), c.F), c.K);
  }
}

TEST(SearchBilinear, CofactorDegreeBoundIsEnforced) {
  BilinearSearchOptions opts;
  opts.degree = 1;
  EXPECT_THROW(search_bilinear_restricted(oscillator_field(), {Monomial({1, 0}), Monomial({0, 1})}, opts),
               std::invalid_argument);
  opts.attempts = 0;
  EXPECT_THROW(search_bilinear_restricted(oscillator_field(), {Monomial({0, 0})}, opts), std::invalid_argument);
}

TEST(SearchBilinear, SingleAttemptIsAllowedToFindNothing) {
  BilinearSearchOptions opts;
  opts.degree = 1;
  opts.attempts = 1;
  opts.max_iterations = 1;
  EXPECT_NO_THROW(search_bilinear_restricted(oscillator_field(), {Monomial({0, 0})}, opts));
}

// ---------------------------------------------------------------- properties

// A field on R^n carrying F1 and F2 as Darboux polynomials:
//   X = F1 F2 u + r J grad(F1 F2)
// with u a random polynomial vector and J a constant skew matrix, so
// X F_i = F_i (F_j u.grad F_i + r {F_i, F_j}).
VectorField field_with_factors(std::mt19937_64& rng, const Polynomial& f1, const Polynomial& f2) {
  const std::size_t n = f1.nvars();
  const auto prod = f1 * f2;
  const auto r = testing::random_polynomial(rng, n, 1, 2);
  const auto j = canonical_matrix(n / 2, n % 2);
  auto ham = hamiltonian_vector_field(j, prod);
  VectorField field;
  for (std::size_t i = 0; i < n; ++i) field.push_back(prod * testing::random_polynomial(rng, n, 1, 2) + r * ham[i]);
  return field;
}

class DarbouxProperties : public ::testing::TestWithParam<int> {};

TEST_P(DarbouxProperties, ProductOfCandidatesIsCandidate) {
  std::mt19937_64 rng(77 + GetParam());
  const std::size_t n = 2 + GetParam() % 3;
  const auto f1 = testing::random_nonzero_polynomial(rng, n, 2, 3, GetParam() % 2 == 0);
  const auto f2 = testing::random_nonzero_polynomial(rng, n, 2, 3);
  const auto field = field_with_factors(rng, f1, f2);
  auto k1 = cofactor_of(field, f1);
  auto k2 = cofactor_of(field, f2);
  ASSERT_TRUE(k1 && k2);
  EXPECT_TRUE(verify_candidate(field, f1, *k1).ok);
  EXPECT_TRUE(verify_candidate(field, f2, *k2).ok);
  auto product = verify_candidate(field, f1 * f2, *k1 + *k2);
  EXPECT_TRUE(product.ok);
  EXPECT_TRUE(product.residual.is_zero());
}

TEST_P(DarbouxProperties, SearchOutputsAreCertified) {
  std::mt19937_64 rng(150 + GetParam());
  const VarTable xy({"x", "y"});
  // Lotka-Volterra: x and y are Darboux with cofactors a + b x + c y and d + e x + f y.
  auto coef = [&] { return testing::random_coefficient(rng); };
  VectorField field = {P("x", xy) * (Polynomial::constant(2, coef()) + P("x", xy) * coef() + P("y", xy) * coef()),
                       P("y", xy) * (Polynomial::constant(2, coef()) + P("x", xy) * coef() + P("y", xy) * coef())};
  auto kx = *cofactor_of(field, P("x", xy));
  for (const auto& f : search_with_cofactor(field, kx, 2)) {
    auto report = verify_candidate(field, f, kx);
    EXPECT_TRUE(report.ok);
    EXPECT_TRUE(report.residual.is_zero());
  }
  EXPECT_TRUE(in_span(search_with_cofactor(field, kx, 2), P("x", xy)));
}

INSTANTIATE_TEST_SUITE_P(Random, DarbouxProperties, ::testing::Range(0, 20));

}  // namespace
}  // namespace pfi
