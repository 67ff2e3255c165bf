#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pfi/matrix.hpp"
#include "pfi/parse.hpp"
#include "pfi/poisson.hpp"

namespace pfi {

/// Raised when F is not a Darboux polynomial of the chart system.
class NotDarboux : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// H*(q,p) = 1/2 sum mu_i p_i^2 + V(q).
class NaturalSpec {
 public:
  /// Throws std::invalid_argument when m = 0, |mu| != m, V.nvars != m,
  /// V is constant, or mu and V disagree on the mode.
  NaturalSpec(std::size_t m, std::vector<Coefficient> mu, Polynomial v);

  std::size_t m() const { return m_; }
  const std::vector<Coefficient>& mu() const { return mu_; }
  const Polynomial& V() const { return v_; }
  Mode mode() const { return v_.mode(); }

  bool potential_degree_ok() const { return v_.total_degree() >= 3; }
  std::size_t nonzero_mu() const;

  /// H* written in the chart (q1..qm, p1..pm, z1..zs).
  Polynomial natural_hamiltonian(std::size_t s = 0) const;

  NaturalSpec to_float() const;

 private:
  std::size_t m_;
  std::vector<Coefficient> mu_;
  Polynomial v_;
};

enum class TheoremKind { T1, T2, T3 };
std::string_view to_string(TheoremKind kind);

/// Data of one of the three constructions. The chart is (q, p, z) with
/// 2m+s coordinates, where the structure matrix is S_{2m,s}.
class TheoremInstance {
 public:
  /// Linear canonical change with a nonsingular m x m matrix A.
  static TheoremInstance theorem1(NaturalSpec spec, CoeffMatrix a);
  /// Diffeomorphism of R^{2m}.
  static TheoremInstance theorem2(NaturalSpec spec, PolyMap map);
  /// Diffeomorphism of R^{2m+s} with Casimir part; W is a polynomial in s
  /// variables (zero when absent). s = 0 is accepted and matches theorem2.
  static TheoremInstance theorem3(NaturalSpec spec, PolyMap map, std::size_t s, std::optional<Polynomial> w);

  TheoremKind kind() const { return kind_; }
  const NaturalSpec& spec() const { return spec_; }
  std::size_t m() const { return spec_.m(); }
  std::size_t s() const { return s_; }
  std::size_t n() const { return 2 * spec_.m() + s_; }
  Mode mode() const { return spec_.mode(); }
  const std::optional<CoeffMatrix>& A() const { return a_; }
  const std::optional<Polynomial>& W() const { return w_; }

  /// Native -> chart coordinates: (A^T q, A^-1 p) for T1, Phi for T2/T3.
  const PolyMap& chart_map() const { return chart_map_; }

  /// Hamiltonian in the chart: H*(q,p) + W(z).
  Polynomial chart_hamiltonian() const;

  TheoremInstance to_float() const;
  /// Exact copy when every coefficient snaps to a rational within tol and the
  /// snapped map still inverts exactly; nullopt otherwise.
  std::optional<TheoremInstance> rationalized(double tol = kFloatIdentityTolerance) const;

 private:
  TheoremInstance(TheoremKind kind, NaturalSpec spec, std::optional<CoeffMatrix> a, PolyMap map, std::size_t s,
                  std::optional<Polynomial> w);

  TheoremKind kind_;
  NaturalSpec spec_;
  std::optional<CoeffMatrix> a_;
  PolyMap chart_map_;
  std::size_t s_;
  std::optional<Polynomial> w_;
};

struct Theorem1System {
  PoissonSystem system;
  /// B = diag((A^-1)^T, A), with (q,p) = B (Q,P).
  CoeffMatrix B;
};

/// J = S_{2m} and H(q,p) = H*(A^T q, A^-1 p). Throws std::invalid_argument on
/// a singular A, std::logic_error if B S B^T != S.
Theorem1System build_theorem1_system(const CoeffMatrix& a, const NaturalSpec& spec, const VarTable& vars);

/// J = M(Phi) S_{2m,s} M(Phi)^T, H = H*(Phi_H) + W(Phi_D), Casimirs Phi_D.
PoissonSystem build_poisson_from_diffeo(const TheoremInstance& inst, const VarTable& vars);

/// Dispatches on the kind of inst.
PoissonSystem build_system(const TheoremInstance& inst, const VarTable& vars);

/// The system in chart coordinates: (S_{2m,s}, H* + W, Casimirs z).
PoissonSystem chart_system(const TheoremInstance& inst);

struct IntegralConstruction {
  Polynomial F;         // as given, in the chart
  Polynomial cofactor;  // X F / F in the chart
  bool proper = false;
  Polynomial chart;     // F(q,p) F(q,-p)
  Polynomial native;    // chart composed with the chart map
  bool rationalized = false;
};

/// Certifies F as a Darboux polynomial of the chart system and builds
/// H_F = F(q,p) F(q,-p), rationalized when possible, then pulled back to the
/// native coordinates. F lives in the chart (2m+s variables) and must not
/// depend on z. Throws NotDarboux when the cofactor division fails, and
/// std::invalid_argument when F is improper and require_proper is set.
IntegralConstruction construct_HF(const TheoremInstance& inst, const Polynomial& f, bool require_proper = true);

struct FirstIntegralReport {
  bool ok = false;
  Polynomial residual{1, Mode::Exact};
};

/// residual = X I. Exact: ok iff zero. Float: ok iff every coefficient is below tol.
FirstIntegralReport verify_first_integral(const PoissonSystem& sys, const Polynomial& integral, double tol = 1e-9);

struct IndependenceReport {
  bool additional = false;
  std::vector<std::size_t> ranks;
};

/// Rank of (grad H, grad D_1..D_s, grad I) at random rational points;
/// additional iff some sample reaches s + 2.
IndependenceReport independence_report(const PoissonSystem& sys, const Polynomial& integral, std::size_t samples = 8,
                                       std::uint64_t seed = 0);

struct HypothesisFlag {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisFlag> flags;
  bool all_ok() const;
};

/// Checks (i) diffeomorphism, (ii) structure reconstruction, (iii) deg V >= 3,
/// (iv) F proper (when F is given) and the additionality clause
/// m >= 2 with two nonzero mu_i. Failures are reported, never thrown.
HypothesisReport hypothesis_report(const TheoremInstance& inst, const std::optional<Polynomial>& f = std::nullopt);

}  // namespace pfi
